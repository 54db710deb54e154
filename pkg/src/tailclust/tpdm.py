"""Tail pairwise dependence matrix (TPDM) and extremal dependence measure.

For a standardized B x D panel the estimator is

    G_jk = (D / c) * sum_b  Z_jb * Z_kb / ||Z_b||^2   over blocks with
                                                      ||Z_b|| > r_n,

where r_n is the empirical q-quantile of the block radii and c the number of
radial exceedances (strict inequality, c recounted after thresholding). The
result is symmetric positive semidefinite with trace exactly D, because each
exceedance contributes a unit-norm angle.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .ingest import ChannelPartition


@dataclass
class Tpdm:
    """Estimated D x D tail pairwise dependence matrix plus threshold info."""

    matrix: np.ndarray
    channels: list[str] | None = None
    partition: ChannelPartition | None = None
    threshold_quantile: float = 0.95
    exceedance_count: int = 0
    radius: float = 0.0

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValidationError("TPDM matrix must be square")
        if self.channels is not None and len(self.channels) != self.matrix.shape[0]:
            raise ValidationError("channel labels do not match matrix dimension")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def block_sizes(self) -> tuple[int, int]:
        if self.partition is None:
            raise ValidationError("TPDM carries no channel partition")
        return self.partition.p, self.partition.q

    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(XX, XY, YY) sub-matrices under the stored partition."""
        p, _ = self.block_sizes()
        return (
            self.matrix[:p, :p],
            self.matrix[:p, p:],
            self.matrix[p:, p:],
        )


def estimate_tpdm(panel, q: float = 0.95, channels: list[str] | None = None,
                  partition: ChannelPartition | None = None) -> Tpdm:
    """Estimate the TPDM of a standardized panel at tail quantile q.

    If a partition is given, its channels are selected from `channels` in
    partition order (X block first), and the estimate is joint over the
    selected sub-panel.
    """
    values = np.asarray(panel, dtype=float)
    if values.ndim != 2:
        raise ValidationError("panel must be a B x D matrix")
    if not np.all(np.isfinite(values)):
        raise ValidationError("non-finite value in panel")
    n_blocks = values.shape[0]
    if n_blocks < 50:
        raise ValidationError(f"need at least 50 blocks, got {n_blocks}")
    if not 0.5 < q < 1.0:
        raise ValidationError(f"tail quantile must lie in (0.5, 1), got {q}")

    if partition is not None:
        if channels is None:
            raise ValidationError("partition given but no channel labels")
        x_idx, y_idx = partition.resolve(channels)
        values = values[:, x_idx + y_idx]
        channels = partition.channels
    dim = values.shape[1]

    squared = values * values
    norms_sq = squared.sum(axis=1)
    radii = np.sqrt(norms_sq)
    radius = float(np.quantile(radii, q))
    mask = radii > radius
    count = int(mask.sum())
    if count == 0:
        raise ValidationError(
            f"threshold r={radius:.6g} at q={q} exceeds every block radius"
        )
    if count < dim:
        warnings.warn(
            f"only {count} radial exceedances for dimension {dim}; "
            "the TPDM estimate is rank-deficient by construction",
            stacklevel=2,
        )

    exceed = values[mask]
    # Outer products divided per entry keep the matrix bit-symmetric and the
    # trace within rounding of D (each exceedance contributes a unit angle).
    outer = exceed[:, :, None] * exceed[:, None, :]
    outer /= norms_sq[mask][:, None, None]
    accum = outer.sum(axis=0)
    matrix = (dim * accum) / count
    matrix = (matrix + matrix.T) / 2.0
    return Tpdm(
        matrix=matrix,
        channels=list(channels) if channels is not None else None,
        partition=partition,
        threshold_quantile=q,
        exceedance_count=count,
        radius=radius,
    )


def write_tpdm_csv(tpdm: Tpdm, path) -> None:
    """Write a D x D TPDM CSV with `# q=`, `# c=`, `# r=` metadata lines."""
    from pathlib import Path

    labels = tpdm.channels or [f"c{j + 1}" for j in range(tpdm.dim)]
    lines = [
        f"# q={tpdm.threshold_quantile:.17g}",
        f"# c={tpdm.exceedance_count}",
        f"# r={tpdm.radius:.17g}",
    ]
    if tpdm.partition is not None:
        x_list = ",".join(tpdm.partition.x_channels)
        y_list = ",".join(tpdm.partition.y_channels)
        lines.append(f"# partition={x_list}:{y_list}")
    lines.append(",".join(labels))
    for row in tpdm.matrix:
        lines.append(",".join(f"{x:.17g}" for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_tpdm_csv(path, partition: ChannelPartition | None = None) -> Tpdm:
    """Load a TPDM CSV written by `write_tpdm_csv`.

    If a partition is given, rows and columns are reordered to put its X
    block first; otherwise any `# partition=` metadata line is honored.
    """
    from .ingest import _read_rows, _parse_matrix, parse_partition

    from pathlib import Path

    path = Path(path)
    metadata, header, rows, line_numbers = _read_rows(path)
    matrix = _parse_matrix(path, header, rows, line_numbers)
    if matrix.shape[0] != matrix.shape[1] or matrix.shape[0] != len(header):
        raise ValidationError(f"{path}: TPDM must be square with matching labels")
    if partition is None and "partition" in metadata:
        partition = parse_partition(metadata["partition"])
    channels = header
    if partition is not None:
        x_idx, y_idx = partition.resolve(header)
        order = x_idx + y_idx
        matrix = matrix[np.ix_(order, order)]
        channels = partition.channels
    return Tpdm(
        matrix=matrix,
        channels=channels,
        partition=partition,
        threshold_quantile=float(metadata.get("q", "nan")),
        exceedance_count=int(metadata.get("c", "0")),
        radius=float(metadata.get("r", "nan")),
    )


def edm(pair_panel, q: float = 0.95) -> float:
    """Extremal dependence measure of a standardized B x 2 panel.

    Estimated as the off-diagonal of the 2 x 2 TPDM. The value can fall
    below 0 for symmetric margins (angular mass off the positive orthant);
    the [0, 1] range of the positive-orthant theory is not enforced.
    """
    values = np.asarray(pair_panel, dtype=float)
    if values.ndim != 2 or values.shape[1] != 2:
        raise ValidationError("edm expects a B x 2 panel")
    return float(estimate_tpdm(values, q=q).matrix[0, 1])
