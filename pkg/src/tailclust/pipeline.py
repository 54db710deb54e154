"""End-to-end orchestration: features -> margins -> TPDM -> canonical solve ->
stack -> fuzzy clustering -> evaluation, plus the report exporter the viz
frontend consumes.

All randomness flows from the config seed through named derivations, so a
rerun with the same seed reproduces summary.json byte-for-byte (timings live
in a separate file).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cluster as cluster_mod
from .ctd import CtdSolution, solve_ctd
from .errors import TailclustError, ValidationError
from .ingest import (
    ChannelPartition,
    ManifestEntry,
    load_feature_panel,
    load_manifest,
    load_signal_panel,
    parse_partition,
)
from .margins import MarginSpec, rank_standardize
from .spectral import BandSpec, band_periodogram
from .seeds import derive_seed_sequence
from .tpdm import estimate_tpdm

DEFAULT_FUZZINESS_GRID = (1.1, 1.2, 1.5, 1.8, 2.0, 2.2, 2.5)


@dataclass
class PipelineConfig:
    """Aggregated per-stage parameters of the clustering pipeline."""

    partition: ChannelPartition
    band: BandSpec | None = None
    block_seconds: float = 2.0
    margin: MarginSpec = field(default_factory=MarginSpec)
    tail_quantile: float = 0.95
    clusters: int = 2
    fuzziness_grid: tuple[float, ...] = DEFAULT_FUZZINESS_GRID
    cutoff: float = 0.7
    seed: int = 0
    method: str = "ctd"
    restarts: int = 10
    sampling_rate_hz: float | None = None
    detrend: bool = False

    def __post_init__(self):
        if self.method not in ("ctd", "cca", "raw"):
            raise ValidationError("method must be 'ctd', 'cca' or 'raw'")
        if not self.fuzziness_grid:
            raise ValidationError("fuzziness grid must be non-empty")
        for m in self.fuzziness_grid:
            if not 1.0 < m < 3.0:
                raise ValidationError(f"fuzziness m={m} must lie in (1, 3)")
        if not 0.5 < self.tail_quantile < 1.0:
            raise ValidationError("tail_quantile must lie in (0.5, 1)")
        if self.clusters < 2:
            raise ValidationError("need at least 2 clusters")
        if self.block_seconds <= 0:
            raise ValidationError("block_seconds must be positive")

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        data = dict(raw)
        if "partition" in data and isinstance(data["partition"], str):
            data["partition"] = parse_partition(data["partition"])
        if "band" in data and data["band"] is not None:
            band = data["band"]
            if isinstance(band, str):
                data["band"] = None if band == "none" else _parse_band(band)
        if "margin" in data and isinstance(data["margin"], str):
            data["margin"] = MarginSpec(data["margin"].replace("-", "_"))
        if "fuzziness_grid" in data:
            data["fuzziness_grid"] = tuple(float(m) for m in data["fuzziness_grid"])
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config fields: {sorted(unknown)}")
        if "partition" not in data:
            raise ValidationError("config requires a channel partition")
        return cls(**data)

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "PipelineConfig":
        with open(path) as handle:
            raw = json.load(handle)
        if overrides:
            raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(raw)


def _parse_band(text: str) -> BandSpec:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return BandSpec.custom(float(lo), float(hi))
    return BandSpec.named(text)


@dataclass
class SubjectResult:
    subject_id: str
    label: int | None
    canonical_value: float | None  # tail dependence (ctd) or squared rho (cca)
    topology: np.ndarray
    condition: dict | None
    timings: dict[str, float]
    exceedances: int | None = None
    radius: float | None = None


@dataclass
class ClusteringResult:
    fuzziness: float
    memberships: np.ndarray
    hard_labels: np.ndarray
    fuzzy_flags: np.ndarray
    objective: float
    accuracy: float | None
    confusion: np.ndarray | None


@dataclass
class RunReport:
    subjects: list[str]
    channels: list[str]
    method: str
    band: str
    subject_results: list[SubjectResult]
    clusterings: list[ClusteringResult]
    config: PipelineConfig
    stage_timings: list[tuple[str, str, float]]  # (subject or '-', stage, seconds)


def _load_panel_for_subject(entry: ManifestEntry, config: PipelineConfig):
    """Feature CSVs are recognized by their leading comment metadata; plain
    CSVs are treated as signal panels and need a sampling rate + band."""
    with open(entry.path) as handle:
        first = handle.readline().lstrip()
    if first.startswith("#"):
        panel = load_feature_panel(entry.path, subject_id=entry.subject_id)
        return panel.values, panel.channels
    if config.sampling_rate_hz is None:
        raise ValidationError(
            f"{entry.path} looks like a signal CSV; config needs sampling_rate_hz"
        )
    if config.band is None:
        raise ValidationError("signal input requires a band in the config")
    signal = load_signal_panel(entry.path, config.sampling_rate_hz,
                               subject_id=entry.subject_id)
    block_length = int(round(config.block_seconds * config.sampling_rate_hz))
    panel = band_periodogram(signal, config.band, block_length, detrend=config.detrend)
    return panel.values, panel.channels


def _subject_stage(entry: ManifestEntry, config: PipelineConfig,
                   timings: list) -> SubjectResult:
    stage = "load"
    try:
        start = time.perf_counter()
        values, channels = _load_panel_for_subject(entry, config)
        timings.append((entry.subject_id, "features", time.perf_counter() - start))

        x_idx, y_idx = config.partition.resolve(channels)
        subject_timings: dict[str, float] = {}
        if config.method == "ctd":
            stage = "standardize"
            start = time.perf_counter()
            standardized = rank_standardize(values, config.margin, channels=channels)
            subject_timings["standardize"] = time.perf_counter() - start

            stage = "tpdm"
            start = time.perf_counter()
            tpdm = estimate_tpdm(standardized, q=config.tail_quantile,
                                 channels=channels, partition=config.partition)
            subject_timings["tpdm"] = time.perf_counter() - start

            stage = "ctd"
            start = time.perf_counter()
            solution = solve_ctd(tpdm)
            subject_timings["solve_ctd"] = time.perf_counter() - start
            report = solution.condition_report
            condition = {
                "min_eig_xx": report.min_eig_xx,
                "min_eig_yy": report.min_eig_yy,
                "ridge_xx": report.ridge_xx,
                "ridge_yy": report.ridge_yy,
                "degenerate": report.degenerate,
            }
            result = SubjectResult(
                subject_id=entry.subject_id,
                label=entry.label,
                canonical_value=solution.tau,
                topology=solution.topology,
                condition=condition,
                timings=subject_timings,
                exceedances=tpdm.exceedance_count,
                radius=tpdm.radius,
            )
        elif config.method == "cca":
            stage = "cca"
            start = time.perf_counter()
            ordered = values[:, x_idx + y_idx]
            rho, lambda0 = cluster_mod.cca_canonical_vectors(ordered, config.partition.p)
            subject_timings["cca"] = time.perf_counter() - start
            result = SubjectResult(
                subject_id=entry.subject_id,
                label=entry.label,
                canonical_value=rho,
                topology=np.abs(lambda0),
                condition=None,
                timings=subject_timings,
            )
        else:
            # plain fuzzy C-means baseline on raw features: per-channel
            # block averages, no dependence structure extracted
            stage = "raw-features"
            start = time.perf_counter()
            ordered = values[:, x_idx + y_idx]
            means = ordered.mean(axis=0)
            subject_timings["raw-features"] = time.perf_counter() - start
            result = SubjectResult(
                subject_id=entry.subject_id,
                label=entry.label,
                canonical_value=None,
                topology=np.abs(means),
                condition=None,
                timings=subject_timings,
            )
        for name, seconds in subject_timings.items():
            timings.append((entry.subject_id, name, seconds))
        return result
    except TailclustError as err:
        raise type(err)(
            f"subject {entry.subject_id!r}, stage {stage!r}: {err}"
        ) from err


def run_pipeline(config: PipelineConfig, manifest_path) -> RunReport:
    """Run the per-band clustering pipeline over a manifest of subjects."""
    entries = load_manifest(manifest_path)
    if len(entries) < 2:
        raise ValidationError("pipeline needs at least 2 subjects")
    timings: list[tuple[str, str, float]] = []
    subject_results = [_subject_stage(entry, config, timings) for entry in entries]

    features = np.vstack([r.topology for r in subject_results])
    stack = cluster_mod.FeatureStack(
        subjects=[r.subject_id for r in subject_results], features=features
    )
    labels = None
    if all(r.label is not None for r in subject_results):
        labels = np.array([r.label for r in subject_results], dtype=int)

    clusterings: list[ClusteringResult] = []
    errors: list[str] = []
    for m in config.fuzziness_grid:
        try:
            start = time.perf_counter()
            seed = derive_seed_sequence(config.seed, "fcm", f"m={m:g}").generate_state(1)[0]
            membership = cluster_mod.fuzzy_cmeans(
                stack, s=config.clusters, m=m, seed=int(seed),
                restarts=config.restarts, cutoff=config.cutoff,
            )
            timings.append(("-", f"fcm_m={m:g}", time.perf_counter() - start))
            acc = None
            confusion = None
            if labels is not None and config.clusters == 2 and set(labels) <= {1, 2}:
                acc = cluster_mod.accuracy(membership.hard_labels, labels)
                confusion = cluster_mod.confusion_matrix(membership.hard_labels, labels).m
            clusterings.append(
                ClusteringResult(
                    fuzziness=m,
                    memberships=membership.u,
                    hard_labels=membership.hard_labels,
                    fuzzy_flags=membership.fuzzy_flags,
                    objective=membership.objective_trace[-1],
                    accuracy=acc,
                    confusion=confusion,
                )
            )
        except TailclustError as err:
            errors.append(f"m={m:g}: {err}")
    if not clusterings:
        raise ValidationError(
            "every fuzziness value failed: " + "; ".join(errors)
        )

    return RunReport(
        subjects=[r.subject_id for r in subject_results],
        channels=config.partition.channels,
        method=config.method,
        band=config.band.name if config.band is not None else "none",
        subject_results=subject_results,
        clusterings=clusterings,
        config=config,
        stage_timings=timings,
    )


def _format_m(m: float) -> str:
    return f"{m:g}"


def write_membership_csv(result: ClusteringResult, subjects: list[str], path) -> None:
    n_clusters = result.memberships.shape[1]
    header = ["subject_id"] + [f"u_{s + 1}" for s in range(n_clusters)]
    header += ["hard_label", "fuzzy_flag"]
    lines = [",".join(header)]
    for i, subject in enumerate(subjects):
        cells = [subject]
        cells += [f"{x:.17g}" for x in result.memberships[i]]
        cells.append(str(int(result.hard_labels[i])))
        cells.append("true" if result.fuzzy_flags[i] else "false")
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def run_report_export(report: RunReport, out_dir) -> list[Path]:
    """Write memberships_m*.csv, topologies.csv, summary.json, timings.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for result in report.clusterings:
        path = out / f"memberships_m{_format_m(result.fuzziness)}.csv"
        write_membership_csv(result, report.subjects, path)
        written.append(path)

    topo_path = out / "topologies.csv"
    lines = [",".join(["subject_id"] + report.channels)]
    for res in report.subject_results:
        lines.append(",".join([res.subject_id] + [f"{x:.17g}" for x in res.topology]))
    topo_path.write_text("\n".join(lines) + "\n")
    written.append(topo_path)

    summary = {
        "method": report.method,
        "band": report.band,
        "channels": report.channels,
        "subjects": report.subjects,
        "clusters": report.config.clusters,
        "cutoff": report.config.cutoff,
        "tail_quantile": report.config.tail_quantile,
        "margin": report.config.margin.family,
        "seed": report.config.seed,
        "canonical_values": {
            r.subject_id: r.canonical_value for r in report.subject_results
        },
        "condition_reports": {
            r.subject_id: r.condition for r in report.subject_results
        },
        "per_m": [
            {
                "m": c.fuzziness,
                "objective": c.objective,
                "accuracy": c.accuracy,
                "confusion": c.confusion.tolist() if c.confusion is not None else None,
                "hard_labels": c.hard_labels.tolist(),
                "fuzzy_flags": c.fuzzy_flags.tolist(),
                "n_fuzzy": int(c.fuzzy_flags.sum()),
            }
            for c in report.clusterings
        ],
    }
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written.append(summary_path)

    timing_path = out / "timings.csv"
    lines = ["subject_id,stage,seconds"]
    for subject, stage, seconds in report.stage_timings:
        lines.append(f"{subject},{stage},{seconds:.6f}")
    timing_path.write_text("\n".join(lines) + "\n")
    written.append(timing_path)
    return written
