"""CSV ingest: signal panels, feature panels, manifests, channel partitions.

File schemas
------------
Signal CSV     header = channel labels; body = T rows x D real columns.
Feature CSV    leading comment lines `# key=value` (at least `# band=...`),
               header = channel labels, body = B rows x D columns.
Manifest CSV   columns subject_id,path,label (label: integer >= 1 or empty);
               paths are resolved relative to the manifest's directory.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .spectral import BAND_EDGES_HZ, BandPeriodogramPanel, BandSpec


@dataclass
class SignalPanel:
    """Multichannel time series, D channels x T samples."""

    subject_id: str
    channels: list[str]
    samples: np.ndarray
    sampling_rate_hz: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 2:
            raise ValidationError("samples must be a D x T matrix")
        if self.samples.shape[0] != len(self.channels):
            raise ValidationError(
                f"{self.samples.shape[0]} sample rows but {len(self.channels)} channel labels"
            )
        if len(set(self.channels)) != len(self.channels):
            raise ValidationError("duplicate channel labels")
        if self.sampling_rate_hz <= 0:
            raise ValidationError("sampling_rate_hz must be positive")
        if not np.all(np.isfinite(self.samples)):
            raise ValidationError("non-finite value in signal panel")

    @property
    def n_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]


@dataclass
class ChannelPartition:
    """Disjoint X/Y channel groups selecting the analyzed sub-panel."""

    x_channels: list[str]
    y_channels: list[str]

    def __post_init__(self):
        if len(self.x_channels) < 2 or len(self.y_channels) < 2:
            raise ValidationError("both partition groups need at least 2 channels")
        overlap = set(self.x_channels) & set(self.y_channels)
        if overlap:
            raise ValidationError(f"partition groups overlap: {sorted(overlap)}")
        if len(set(self.x_channels)) != len(self.x_channels) or len(
            set(self.y_channels)
        ) != len(self.y_channels):
            raise ValidationError("duplicate channel label within a partition group")

    @property
    def p(self) -> int:
        return len(self.x_channels)

    @property
    def q(self) -> int:
        return len(self.y_channels)

    @property
    def channels(self) -> list[str]:
        return list(self.x_channels) + list(self.y_channels)

    def resolve(self, channels: list[str]) -> tuple[list[int], list[int]]:
        """Column indices of the X and Y groups within `channels`.

        Selection follows the partition's own list order, so reordering a
        partition list reorders columns within that block but never changes
        which columns are selected.
        """
        index = {label: i for i, label in enumerate(channels)}
        missing = [c for c in self.channels if c not in index]
        if missing:
            raise ValidationError(f"partition channels not in panel: {missing}")
        return (
            [index[c] for c in self.x_channels],
            [index[c] for c in self.y_channels],
        )


def parse_partition(text: str) -> ChannelPartition:
    """Parse the CLI partition syntax 'F3,F7:P3,P4' (colon splits X and Y)."""
    if ":" not in text:
        raise ValidationError("partition must be 'x1,x2,...:y1,y2,...'")
    x_part, y_part = text.split(":", 1)
    x_channels = [c.strip() for c in x_part.split(",") if c.strip()]
    y_channels = [c.strip() for c in y_part.split(",") if c.strip()]
    return ChannelPartition(x_channels, y_channels)


def _read_rows(path: Path) -> tuple[dict, list[str], list[list[str]], list[int]]:
    """Split a CSV file into comment metadata, header, and body rows."""
    metadata: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[str]] = []
    line_numbers: list[int] = []
    with open(path, newline="") as handle:
        for line_no, line in enumerate(csv.reader(handle), start=1):
            if not line or all(not cell.strip() for cell in line):
                continue
            first = line[0].lstrip()
            if first.startswith("#"):
                text = ",".join(line).lstrip("# ").strip()
                if "=" in text:
                    key, value = text.split("=", 1)
                    metadata[key.strip()] = value.strip()
                continue
            if header is None:
                header = [cell.strip() for cell in line]
                continue
            rows.append(line)
            line_numbers.append(line_no)
    if header is None:
        raise ParseError(f"{path}: empty file (no header row)")
    return metadata, header, rows, line_numbers


def _parse_matrix(path: Path, header: list[str], rows: list[list[str]],
                  line_numbers: list[int]) -> np.ndarray:
    if not rows:
        raise ParseError(f"{path}: no data rows")
    width = len(header)
    try:
        return np.array(rows, dtype=float).reshape(len(rows), width)
    except ValueError:
        pass
    # Slow path only to localize the offending cell for the error message.
    out = np.empty((len(rows), width), dtype=float)
    for i, (row, line_no) in enumerate(zip(rows, line_numbers)):
        if len(row) != width:
            raise ParseError(
                f"{path}: line {line_no}: expected {width} columns, found {len(row)}"
            )
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: line {line_no}: cannot parse {cell!r} as a number"
                ) from None
    return out


def load_signal_panel(path, sampling_rate_hz: float, subject_id: str | None = None) -> SignalPanel:
    """Load a signal CSV (header = channel labels, one row per time sample)."""
    path = Path(path)
    _, header, rows, line_numbers = _read_rows(path)
    if len(set(header)) != len(header):
        dupes = sorted({c for c in header if header.count(c) > 1})
        raise ValidationError(f"{path}: duplicate channel labels {dupes}")
    matrix = _parse_matrix(path, header, rows, line_numbers)
    bad = np.argwhere(~np.isfinite(matrix))
    if bad.size:
        i, j = bad[0]
        raise ValidationError(
            f"{path}: non-finite value in channel {header[j]!r} at row {i + 1}"
        )
    return SignalPanel(
        subject_id=subject_id or path.stem,
        channels=header,
        samples=matrix.T,
        sampling_rate_hz=float(sampling_rate_hz),
    )


def _band_from_metadata(metadata: dict) -> BandSpec | None:
    tag = metadata.get("band", "none")
    if tag == "none":
        return None
    if tag == "custom":
        lo = float(metadata.get("band_lo_hz", "nan"))
        hi = float(metadata.get("band_hi_hz", "nan"))
        if not (math.isfinite(lo) and math.isfinite(hi)):
            return None
        return BandSpec.custom(lo, hi)
    if tag in BAND_EDGES_HZ:
        return BandSpec.named(tag)
    raise ValidationError(f"unknown band tag {tag!r} in feature metadata")


def load_feature_panel(path, subject_id: str | None = None) -> BandPeriodogramPanel:
    """Load a feature CSV (B rows x D strictly positive columns)."""
    path = Path(path)
    metadata, header, rows, line_numbers = _read_rows(path)
    if len(set(header)) != len(header):
        dupes = sorted({c for c in header if header.count(c) > 1})
        raise ValidationError(f"{path}: duplicate channel labels {dupes}")
    matrix = _parse_matrix(path, header, rows, line_numbers)
    if not np.all(np.isfinite(matrix)):
        raise ValidationError(f"{path}: non-finite value in feature panel")
    bad = np.argwhere(matrix <= 0.0)
    if bad.size:
        i, j = bad[0]
        raise ValidationError(
            f"{path}: non-positive entry {matrix[i, j]!r} in channel "
            f"{header[j]!r} at row {i + 1}; periodogram features must be positive"
        )
    block_length = metadata.get("block_length")
    sampling_rate = metadata.get("sampling_rate_hz")
    return BandPeriodogramPanel(
        subject_id=subject_id or metadata.get("subject", path.stem),
        channels=header,
        values=matrix,
        band=_band_from_metadata(metadata),
        block_length=int(block_length) if block_length else None,
        sampling_rate_hz=float(sampling_rate) if sampling_rate else None,
        metadata=metadata,
    )


def write_feature_panel(panel: BandPeriodogramPanel, path) -> None:
    """Write a feature CSV; floats carry 17 significant digits (round trip)."""
    path = Path(path)
    band = panel.band
    lines = []
    lines.append(f"# band={band.name if band is not None else 'none'}")
    if band is not None and band.name == "custom":
        lines.append(f"# band_lo_hz={band.lo_hz:.17g}")
        lines.append(f"# band_hi_hz={band.hi_hz:.17g}")
    if panel.block_length:
        lines.append(f"# block_length={panel.block_length}")
    if panel.sampling_rate_hz:
        lines.append(f"# sampling_rate_hz={panel.sampling_rate_hz:.17g}")
    if panel.subject_id:
        lines.append(f"# subject={panel.subject_id}")
    for key, value in panel.metadata.items():
        if key not in {"band", "band_lo_hz", "band_hi_hz", "block_length",
                       "sampling_rate_hz", "subject"}:
            lines.append(f"# {key}={value}")
    lines.append(",".join(panel.channels))
    for row in panel.values:
        lines.append(",".join(f"{x:.17g}" for x in row))
    path.write_text("\n".join(lines) + "\n")


@dataclass
class ManifestEntry:
    subject_id: str
    path: Path
    label: int | None = None


def load_manifest(path) -> list[ManifestEntry]:
    """Load a manifest CSV mapping subject_id -> panel path -> optional label."""
    path = Path(path)
    _, header, rows, line_numbers = _read_rows(path)
    expected = ["subject_id", "path", "label"]
    if [h.strip() for h in header[: len(expected)]] != expected[: len(header)] or len(header) < 2:
        raise ParseError(
            f"{path}: manifest header must be subject_id,path[,label]; got {header}"
        )
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for row, line_no in zip(rows, line_numbers):
        if len(row) < 2:
            raise ParseError(f"{path}: line {line_no}: manifest row needs subject_id,path")
        subject = row[0].strip()
        rel = row[1].strip()
        label_cell = row[2].strip() if len(row) > 2 else ""
        if subject in seen:
            raise ValidationError(f"{path}: duplicate subject_id {subject!r}")
        seen.add(subject)
        label: int | None = None
        if label_cell:
            try:
                label = int(label_cell)
            except ValueError:
                raise ParseError(
                    f"{path}: line {line_no}: label {label_cell!r} is not an integer"
                ) from None
            if label < 1:
                raise ValidationError(
                    f"{path}: line {line_no}: label must be an integer >= 1"
                )
        entries.append(ManifestEntry(subject, (path.parent / rel).resolve(), label))
    if not entries:
        raise ParseError(f"{path}: manifest has no entries")
    return entries


def write_manifest(entries: list[ManifestEntry], path) -> None:
    path = Path(path)
    lines = ["subject_id,path,label"]
    for entry in entries:
        rel = entry.path
        try:
            rel = entry.path.relative_to(path.parent.resolve())
        except ValueError:
            pass
        label = "" if entry.label is None else str(entry.label)
        lines.append(f"{entry.subject_id},{rel},{label}")
    path.write_text("\n".join(lines) + "\n")
