"""Rank transforms to common regularly-varying margins of order 2.

Each feature column is replaced by quantiles of a fixed heavy-tailed law
evaluated at plotting positions of the within-column ranks, so downstream
tail-dependence estimates depend on the data only through per-channel ranks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import ValidationError

FAMILIES = ("frechet2", "symmetric_pareto2")


def _check_open_unit(u: np.ndarray) -> None:
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise ValidationError("quantile argument must lie strictly inside (0, 1)")


def frechet2_quantile(u):
    """Quantile of the unit Frechet law with tail exponent 2.

    P(V <= v) = exp(-v**-2), so quantile(u) = (-log u)**-0.5; the survival
    function satisfies P(V > v) ~ v**-2.
    """
    u = np.asarray(u, dtype=float)
    _check_open_unit(u)
    return (-np.log(u)) ** -0.5


def symmetric_pareto2_quantile(u):
    """Quantile of the unit symmetric Pareto law with tail exponent 2.

    P(|Z| > z) = z**-2 for z >= 1, with mass split evenly between the two
    tails; there is no support inside (-1, 1). u = 1/2 maps to +1.
    """
    u = np.asarray(u, dtype=float)
    _check_open_unit(u)
    lower = -((2.0 * u) ** -0.5)
    upper = (2.0 * (1.0 - u)) ** -0.5
    return np.where(u < 0.5, lower, upper)


_QUANTILES = {
    "frechet2": frechet2_quantile,
    "symmetric_pareto2": symmetric_pareto2_quantile,
}


@dataclass
class MarginSpec:
    """Target margin family plus the plotting-position constant.

    rank_offset = 0 gives u = r / (B + 1), which keeps every u strictly
    inside (0, 1) so all quantiles are finite.
    """

    family: str = "frechet2"
    rank_offset: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(
                f"unknown margin family {self.family!r}; expected one of {FAMILIES}"
            )
        if not 0.0 <= self.rank_offset < 1.0:
            raise ValidationError("rank_offset must lie in [0, 1)")

    def quantile(self, u):
        return _QUANTILES[self.family](u)


def rank_standardize(matrix, spec: MarginSpec | None = None, channels=None) -> np.ndarray:
    """Standardize each column of a B x D matrix to the spec's margins.

    Ranks are averaged over ties. The value of rank r maps to quantile(u)
    with u = (r - rank_offset) / (B - 2 * rank_offset + 1). Output depends
    on the input only through within-column ranks, so any strictly
    increasing per-column transformation of the input leaves the output
    bit-identical.
    """
    if spec is None:
        spec = MarginSpec()
    values = np.asarray(matrix, dtype=float)
    if values.ndim != 2:
        raise ValidationError("rank_standardize expects a 2-D matrix")
    n_rows, n_cols = values.shape
    if n_rows < 10:
        raise ValidationError(f"need at least 10 rows per column, got {n_rows}")
    if not np.all(np.isfinite(values)):
        raise ValidationError("non-finite value in input matrix")

    out = np.empty_like(values)
    denom = n_rows - 2.0 * spec.rank_offset + 1.0
    for j in range(n_cols):
        col = values[:, j]
        if np.all(col == col[0]):
            name = channels[j] if channels is not None else f"column {j}"
            raise ValidationError(
                f"channel {name} is constant; rank transform is undefined"
            )
        ranks = rankdata(col, method="average")
        u = (ranks - spec.rank_offset) / denom
        out[:, j] = spec.quantile(u)
    return out
