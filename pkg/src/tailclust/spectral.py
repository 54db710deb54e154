"""Block-wise local DFTs, local periodograms, and band aggregation.

The record is cut into disjoint consecutive blocks of A samples (trailing
partial block dropped). Per block and channel, the local periodogram at
fundamental frequency a/A is the squared magnitude of the 1/sqrt(A)-normalized
DFT; band features average it over the Fourier bins whose physical frequency
SR * a / A falls in the band's half-open interval (lo, hi]. Bin a = 0 carries
the block mean, not oscillation, and is excluded from every band; only bins
a <= floor(A/2) are considered (real signals have symmetric spectra) and the
retained bin powers are not doubled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

BAND_EDGES_HZ = {
    "delta": (0.0, 4.0),
    "theta": (4.0, 8.0),
    "alpha": (8.0, 12.0),
    "beta": (12.0, 30.0),
    "gamma": (30.0, 50.0),
}

BAND_NAMES = tuple(BAND_EDGES_HZ) + ("custom",)


@dataclass
class BandSpec:
    """A named or custom frequency band (lo_hz, hi_hz]."""

    name: str
    lo_hz: float
    hi_hz: float

    def __post_init__(self):
        if self.name not in BAND_NAMES:
            raise ValidationError(
                f"unknown band name {self.name!r}; expected one of {BAND_NAMES}"
            )
        if self.name != "custom":
            lo, hi = BAND_EDGES_HZ[self.name]
            if (self.lo_hz, self.hi_hz) != (lo, hi):
                raise ValidationError(
                    f"band {self.name!r} is bound to ({lo}, {hi}] Hz"
                )
        if not (self.lo_hz >= 0.0 and self.hi_hz > self.lo_hz):
            raise ValidationError("band requires 0 <= lo_hz < hi_hz")

    @classmethod
    def named(cls, name: str) -> "BandSpec":
        if name not in BAND_EDGES_HZ:
            raise ValidationError(
                f"unknown band name {name!r}; expected one of {tuple(BAND_EDGES_HZ)}"
            )
        lo, hi = BAND_EDGES_HZ[name]
        return cls(name, lo, hi)

    @classmethod
    def custom(cls, lo_hz: float, hi_hz: float) -> "BandSpec":
        return cls("custom", float(lo_hz), float(hi_hz))


@dataclass
class BandPeriodogramPanel:
    """Per-subject band-aggregated local periodograms, blocks x channels."""

    subject_id: str
    channels: list[str]
    values: np.ndarray
    band: BandSpec | None = None
    block_length: int | None = None
    sampling_rate_hz: float | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValidationError("panel values must be a 2-D matrix")
        if self.values.shape[1] != len(self.channels):
            raise ValidationError(
                f"{self.values.shape[1]} columns but {len(self.channels)} channel labels"
            )
        if len(set(self.channels)) != len(self.channels):
            raise ValidationError("duplicate channel labels")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("non-finite value in panel")

    @property
    def n_blocks(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]


def local_dft(block) -> np.ndarray:
    """Length-A complex DFT of one block with 1/sqrt(A) normalization.

    output[a] = (1/sqrt(A)) * sum_{t=1..A} block[t] * exp(-i 2 pi (a/A) t),
    with the block's samples indexed t = 1..A (block-local phase origin).
    """
    x = np.asarray(block, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValidationError("local_dft expects a 1-D block with A >= 2 samples")
    a = x.size
    # np.fft.fft sums over t = 0..A-1; shift the phase origin to t = 1..A.
    phase = np.exp(-2j * np.pi * np.arange(a) / a)
    return phase * np.fft.fft(x) / np.sqrt(a)


def band_bins(band: BandSpec, block_length: int, sampling_rate_hz: float) -> np.ndarray:
    """Fourier bin indices a with SR * a / A in (lo, hi], 1 <= a <= A // 2."""
    a = np.arange(1, block_length // 2 + 1)
    freqs = sampling_rate_hz * a / block_length
    return a[(freqs > band.lo_hz) & (freqs <= band.hi_hz)]


def band_periodogram(panel, band: BandSpec, block_length: int,
                     detrend: bool = False) -> BandPeriodogramPanel:
    """Band-aggregated local periodograms of a signal panel.

    Returns a panel of B = floor(T / A) rows (one per disjoint block) and D
    columns. Each entry is the mean local periodogram over the band's
    qualifying bins; the trailing partial block is dropped. `detrend`
    removes the per-channel mean of the whole record before blocking.
    """
    a_len = int(block_length)
    if a_len < 2:
        raise ValidationError("block_length must be at least 2 samples")
    sr = float(panel.sampling_rate_hz)
    if band.hi_hz > sr / 2.0:
        raise ValidationError(
            f"band upper edge {band.hi_hz} Hz exceeds Nyquist {sr / 2.0} Hz"
        )
    samples = panel.samples
    n_channels, n_samples = samples.shape
    n_blocks = n_samples // a_len
    if n_blocks < 2:
        raise ValidationError(
            f"record of {n_samples} samples is shorter than two blocks of {a_len}"
        )
    bins = band_bins(band, a_len, sr)
    if bins.size == 0:
        raise ValidationError(
            f"band {band.name!r} ({band.lo_hz}, {band.hi_hz}] Hz contains no "
            f"DFT bins at block length A={a_len}"
        )
    if detrend:
        samples = samples - samples.mean(axis=1, keepdims=True)
    blocks = samples[:, : n_blocks * a_len].reshape(n_channels, n_blocks, a_len)
    spectra = np.fft.fft(blocks, axis=2)
    periodogram = (spectra.real ** 2 + spectra.imag ** 2) / a_len
    values = periodogram[:, :, bins].mean(axis=2).T  # (B, D)
    metadata = {"detrend": "mean" if detrend else "none"}
    return BandPeriodogramPanel(
        subject_id=panel.subject_id,
        channels=list(panel.channels),
        values=values,
        band=band,
        block_length=a_len,
        sampling_rate_hz=sr,
        metadata=metadata,
    )
