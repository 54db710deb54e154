"""Command-line interface.

Subcommands: simulate, features, standardize, tpdm, ctd, cluster, pipeline,
evaluate. Exit codes: 0 success, 2 validation/parse error, 3 numerical
error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import cluster as cluster_mod
from .ctd import numeric_ctd_oracle, solve_ctd
from .errors import NumericalError, ValidationError
from .ingest import (
    ManifestEntry,
    load_feature_panel,
    load_manifest,
    load_signal_panel,
    parse_partition,
    write_feature_panel,
    write_manifest,
)
from .margins import MarginSpec, rank_standardize
from .pipeline import (
    PipelineConfig,
    run_pipeline,
    run_report_export,
    write_membership_csv,
    _parse_band,
)
from .simgen import SimulationSpec, cluster_truth, default_cluster_deltas, simulate_panel
from .spectral import BandPeriodogramPanel
from .tpdm import estimate_tpdm, load_tpdm_csv, write_tpdm_csv


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _write_json(payload: dict, path: str | None) -> None:
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cmd_simulate(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if (args.delta1 is None) != (args.delta2 is None):
        raise ValidationError("provide both --delta1 and --delta2 or neither")
    if args.delta1 is not None:
        delta1 = np.loadtxt(args.delta1, delimiter=",")
        delta2 = np.loadtxt(args.delta2, delimiter=",")
    else:
        delta1, delta2 = default_cluster_deltas(args.p, args.q)
    spec = SimulationSpec(
        delta1=delta1,
        delta2=delta2,
        n_subjects=args.n,
        n_blocks=args.blocks,
        fuzzy_fraction=args.fuzzy_frac,
        p=args.p,
        q=args.q,
        seed=args.seed,
    )
    result = simulate_panel(spec, convention=args.truth_convention)
    if args.channel_names:
        named = parse_partition(args.channel_names)
        if named.p != args.p or named.q != args.q:
            raise ValidationError(
                f"--channel-names needs {args.p}:{args.q} labels, got {named.p}:{named.q}"
            )
        channels = named.channels
    else:
        channels = [f"x{i + 1}" for i in range(args.p)] + [f"y{i + 1}" for i in range(args.q)]
    entries = []
    for n, raw in enumerate(result.raw_panels):
        subject = f"subj{n + 1:03d}"
        panel = BandPeriodogramPanel(subject_id=subject, channels=channels, values=raw)
        path = out_dir / f"{subject}.csv"
        write_feature_panel(panel, path)
        entries.append(ManifestEntry(subject, path.resolve(),
                                     int(result.truth.labels[n])))
    write_manifest(entries, out_dir / "manifest.csv")

    truth = result.truth
    alt = "precision" if args.truth_convention == "tpdm" else "tpdm"
    alt_truth = cluster_truth(spec, convention=alt)
    payload = {
        "labels": truth.labels,
        "fuzzy_subjects": truth.fuzzy_subjects,
        "subjects": [e.subject_id for e in entries],
        "channels": channels,
        "partition": ",".join(channels[:args.p]) + ":" + ",".join(channels[args.p:]),
        "delta1": spec.delta1,
        "delta2": spec.delta2,
        "truth_convention": args.truth_convention,
        "tpdm_per_cluster": truth.tpdm_per_cluster,
        "tail_topology_per_cluster": truth.tail_topology_per_cluster,
        f"tail_topology_per_cluster_{alt}": alt_truth.tail_topology_per_cluster,
        "seed": args.seed,
        "n_blocks": args.blocks,
        "fuzzy_fraction": args.fuzzy_frac,
    }
    _write_json(payload, str(out_dir / "truth.json"))
    print(f"wrote {len(entries)} subject panels, manifest.csv and truth.json to {out_dir}")
    return 0


def _cmd_features(args) -> int:
    from .spectral import band_periodogram

    band = _parse_band(args.band)
    panel = load_signal_panel(args.input, args.sampling_rate, subject_id=args.subject_id)
    block_length = int(round(args.block_seconds * args.sampling_rate))
    features = band_periodogram(panel, band, block_length, detrend=args.detrend)
    write_feature_panel(features, args.output)
    print(f"wrote {features.n_blocks} x {features.n_channels} feature panel to {args.output}")
    return 0


def _cmd_standardize(args) -> int:
    panel = load_feature_panel(args.input)
    spec = MarginSpec(args.margin.replace("-", "_"))
    standardized = rank_standardize(panel.values, spec, channels=panel.channels)
    # symmetric margins produce negative values, so the output is written as
    # a standardized panel rather than through the feature writer's
    # strictly-positive contract
    lines = [f"# band={panel.band.name if panel.band else 'none'}",
             f"# margin={spec.family}"]
    lines.append(",".join(panel.channels))
    for row in standardized:
        lines.append(",".join(f"{x:.17g}" for x in row))
    Path(args.output).write_text("\n".join(lines) + "\n")
    print(f"standardized {standardized.shape[0]} x {standardized.shape[1]} panel "
          f"to {spec.family} margins -> {args.output}")
    return 0


def _load_numeric_panel(path):
    """Numeric panel with comment/header handling but no positivity check."""
    from .ingest import _parse_matrix, _read_rows

    metadata, header, rows, line_numbers = _read_rows(Path(path))
    matrix = _parse_matrix(Path(path), header, rows, line_numbers)
    return matrix, header, metadata


def _cmd_tpdm(args) -> int:
    if args.standardized:
        matrix, channels, _ = _load_numeric_panel(args.input)
    else:
        panel = load_feature_panel(args.input)
        spec = MarginSpec(args.margin.replace("-", "_"))
        matrix = rank_standardize(panel.values, spec, channels=panel.channels)
        channels = panel.channels
    partition = parse_partition(args.partition) if args.partition else None
    grid = [float(q) for q in args.tail_quantile_grid.split(",")] if args.tail_quantile_grid else None
    if grid:
        out_base = Path(args.output)
        for q in grid:
            result = estimate_tpdm(matrix, q=q, channels=channels, partition=partition)
            target = out_base.with_name(f"{out_base.stem}_q{q:g}{out_base.suffix}")
            write_tpdm_csv(result, target)
            print(f"q={q:g}: c={result.exceedance_count}, r={result.radius:.6g} -> {target}")
        return 0
    result = estimate_tpdm(matrix, q=args.tail_quantile, channels=channels,
                           partition=partition)
    write_tpdm_csv(result, args.output)
    print(f"wrote {result.dim} x {result.dim} TPDM (c={result.exceedance_count}, "
          f"r={result.radius:.6g}) to {args.output}")
    return 0


def _cmd_ctd(args) -> int:
    partition = parse_partition(args.partition) if args.partition else None
    tpdm = load_tpdm_csv(args.tpdm, partition=partition)
    if tpdm.partition is None:
        raise ValidationError("provide --partition or a TPDM file with partition metadata")
    start = time.perf_counter()
    solution = solve_ctd(tpdm)
    eigen_seconds = time.perf_counter() - start
    payload = {
        "tau": solution.tau,
        "gamma_star": solution.gamma_star,
        "beta_star": solution.beta_star,
        "lambda1": solution.lambda1,
        "lambda2": solution.lambda2,
        "spectrum": solution.spectrum,
        "condition_report": {
            "min_eig_xx": solution.condition_report.min_eig_xx,
            "min_eig_yy": solution.condition_report.min_eig_yy,
            "ridge_xx": solution.condition_report.ridge_xx,
            "ridge_yy": solution.condition_report.ridge_yy,
            "degenerate": solution.condition_report.degenerate,
        },
        "timings": {"eigen_seconds": eigen_seconds},
    }
    if args.oracle_restarts > 0:
        start = time.perf_counter()
        oracle = numeric_ctd_oracle(tpdm, restarts=args.oracle_restarts, seed=args.seed)
        payload["oracle_tau"] = oracle
        payload["timings"]["oracle_seconds"] = time.perf_counter() - start
    _write_json(payload, args.output)
    return 0


def _cmd_cluster(args) -> int:
    config = PipelineConfig(
        partition=parse_partition(args.partition),
        margin=MarginSpec(args.margin.replace("-", "_")),
        tail_quantile=args.tail_quantile,
        clusters=args.clusters,
        fuzziness_grid=(args.fuzziness,),
        cutoff=args.cutoff,
        seed=args.seed,
        method=args.method,
        restarts=args.restarts,
        sampling_rate_hz=args.sampling_rate,
        band=_parse_band(args.band) if args.band else None,
    )
    report = run_pipeline(config, args.manifest)
    if args.labels:
        labels = {e.subject_id: e.label for e in load_manifest(args.labels)}
        truth = [labels.get(s) for s in report.subjects]
        if all(t is not None for t in truth):
            truth = np.array(truth, dtype=int)
            for clustering in report.clusterings:
                clustering.accuracy = cluster_mod.accuracy(clustering.hard_labels, truth)
                clustering.confusion = cluster_mod.confusion_matrix(
                    clustering.hard_labels, truth).m
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = report.clusterings[0]
    membership_path = out_dir / f"memberships_m{result.fuzziness:g}.csv"
    write_membership_csv(result, report.subjects, membership_path)
    summary = {
        "accuracy": result.accuracy,
        "confusion": result.confusion.tolist() if result.confusion is not None else None,
        "m": result.fuzziness,
        "method": report.method,
        "objective": result.objective,
        "n_fuzzy": int(result.fuzzy_flags.sum()),
    }
    _write_json(summary, str(out_dir / "cluster_summary.json"))
    print(f"memberships -> {membership_path}")
    if result.accuracy is not None:
        print(f"accuracy={result.accuracy:.4f}")
    return 0


def _cmd_pipeline(args) -> int:
    overrides = {
        "band": args.band,
        "block_seconds": args.block_seconds,
        "margin": args.margin,
        "tail_quantile": args.tail_quantile,
        "clusters": args.clusters,
        "cutoff": args.cutoff,
        "seed": args.seed,
        "method": args.method,
        "partition": args.partition,
        "sampling_rate_hz": args.sampling_rate,
        "restarts": args.restarts,
    }
    if args.fuzziness_grid:
        overrides["fuzziness_grid"] = [float(m) for m in args.fuzziness_grid.split(",")]
    if args.config:
        config = PipelineConfig.from_file(args.config, overrides)
    else:
        cleaned = {k: v for k, v in overrides.items() if v is not None}
        config = PipelineConfig.from_dict(cleaned)
    report = run_pipeline(config, args.manifest)
    written = run_report_export(report, args.out_dir)
    for path in written:
        print(f"wrote {path}")
    accuracies = {f"m={c.fuzziness:g}": c.accuracy for c in report.clusterings}
    if any(a is not None for a in accuracies.values()):
        print("accuracy per m: " + json.dumps(_jsonable(accuracies)))
    return 0


def _cmd_evaluate(args) -> int:
    memberships, subjects, hard = _read_membership_csv(args.memberships)
    labels = {e.subject_id: e.label for e in load_manifest(args.labels)}
    truth = []
    for s in subjects:
        if labels.get(s) is None:
            raise ValidationError(f"no label for subject {s!r} in {args.labels}")
        truth.append(labels[s])
    truth = np.array(truth, dtype=int)
    acc = cluster_mod.accuracy(hard, truth)
    confusion = cluster_mod.confusion_matrix(hard, truth)
    flags = memberships.max(axis=1) < args.cutoff
    payload = {
        "accuracy": acc,
        "confusion": confusion.m,
        "n_total": confusion.n_total,
        "n_fuzzy": int(flags.sum()),
        "cutoff": args.cutoff,
    }
    _write_json(payload, args.output)
    return 0


def _read_membership_csv(path):
    from .ingest import _read_rows

    _, header, rows, _ = _read_rows(Path(path))
    if header[0] != "subject_id":
        raise ValidationError(f"{path}: expected a membership CSV header")
    u_cols = [i for i, name in enumerate(header) if name.startswith("u_")]
    if not u_cols:
        raise ValidationError(f"{path}: no membership columns u_1..u_S")
    label_col = header.index("hard_label") if "hard_label" in header else None
    subjects = [row[0] for row in rows]
    u = np.array([[float(row[i]) for i in u_cols] for row in rows])
    if label_col is not None:
        hard = np.array([int(row[label_col]) for row in rows])
    else:
        hard = np.argmax(u, axis=1) + 1
    return u, subjects, hard


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailclust",
        description="Joint-tail dependence features and fuzzy extremal clustering",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate synthetic heavy-tailed panels")
    sim.add_argument("--out-dir", required=True)
    sim.add_argument("--n", type=int, default=40, help="number of subjects")
    sim.add_argument("--blocks", type=int, default=2000)
    sim.add_argument("--fuzzy-frac", type=float, default=0.0)
    sim.add_argument("--p", type=int, default=6)
    sim.add_argument("--q", type=int, default=6)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--delta1", help="CSV with the cluster-1 square-root matrix")
    sim.add_argument("--delta2", help="CSV with the cluster-2 square-root matrix")
    sim.add_argument("--truth-convention", choices=("tpdm", "precision"),
                     default="tpdm")
    sim.add_argument("--channel-names",
                     help="x1,...:y1,... labels for the simulated channels")
    sim.set_defaults(func=_cmd_simulate)

    feat = sub.add_parser("features", help="band periodogram features from signals")
    feat.add_argument("--input", required=True)
    feat.add_argument("--output", required=True)
    feat.add_argument("--band", required=True,
                      help="delta|theta|alpha|beta|gamma or lo:hi in Hz")
    feat.add_argument("--block-seconds", type=float, default=2.0)
    feat.add_argument("--sampling-rate", type=float, required=True)
    feat.add_argument("--detrend", action="store_true")
    feat.add_argument("--subject-id")
    feat.set_defaults(func=_cmd_features)

    std = sub.add_parser("standardize", help="rank-standardize a feature panel")
    std.add_argument("--input", required=True)
    std.add_argument("--output", required=True)
    std.add_argument("--margin", choices=("frechet2", "symmetric-pareto2"),
                     default="frechet2")
    std.set_defaults(func=_cmd_standardize)

    tp = sub.add_parser("tpdm", help="estimate the tail pairwise dependence matrix")
    tp.add_argument("--input", required=True)
    tp.add_argument("--output", required=True)
    tp.add_argument("--tail-quantile", type=float, default=0.95)
    tp.add_argument("--tail-quantile-grid",
                    help="comma-separated q values; writes one TPDM per q")
    tp.add_argument("--partition", help="x1,x2,...:y1,y2,...")
    tp.add_argument("--margin", choices=("frechet2", "symmetric-pareto2"),
                    default="frechet2")
    tp.add_argument("--standardized", action="store_true",
                    help="input is already standardized (skip the margin step)")
    tp.set_defaults(func=_cmd_tpdm)

    ctd_cmd = sub.add_parser("ctd", help="solve the canonical tail dependence")
    ctd_cmd.add_argument("--tpdm", required=True)
    ctd_cmd.add_argument("--partition")
    ctd_cmd.add_argument("--oracle-restarts", type=int, default=0)
    ctd_cmd.add_argument("--seed", type=int, default=0)
    ctd_cmd.add_argument("--output", default="-")
    ctd_cmd.set_defaults(func=_cmd_ctd)

    clus = sub.add_parser("cluster", help="cluster subjects at one fuzziness value")
    clus.add_argument("--manifest", required=True)
    clus.add_argument("--partition", required=True)
    clus.add_argument("--clusters", type=int, default=2)
    clus.add_argument("--fuzziness", type=float, default=1.2)
    clus.add_argument("--cutoff", type=float, default=0.7)
    clus.add_argument("--seed", type=int, default=0)
    clus.add_argument("--restarts", type=int, default=10)
    clus.add_argument("--labels", help="manifest CSV carrying true labels")
    clus.add_argument("--method", choices=("ctd", "cca", "raw"), default="ctd")
    clus.add_argument("--tail-quantile", type=float, default=0.95)
    clus.add_argument("--margin", choices=("frechet2", "symmetric-pareto2"),
                      default="frechet2")
    clus.add_argument("--band")
    clus.add_argument("--sampling-rate", type=float)
    clus.add_argument("--out-dir", default=".")
    clus.set_defaults(func=_cmd_cluster)

    pipe = sub.add_parser("pipeline", help="run the full multi-m pipeline")
    pipe.add_argument("--manifest", required=True)
    pipe.add_argument("--out-dir", required=True)
    pipe.add_argument("--config", help="JSON config; flags override its fields")
    pipe.add_argument("--partition")
    pipe.add_argument("--band")
    pipe.add_argument("--block-seconds", type=float)
    pipe.add_argument("--margin", choices=("frechet2", "symmetric-pareto2"))
    pipe.add_argument("--tail-quantile", type=float)
    pipe.add_argument("--clusters", type=int)
    pipe.add_argument("--fuzziness-grid", help="comma-separated m values")
    pipe.add_argument("--cutoff", type=float)
    pipe.add_argument("--seed", type=int)
    pipe.add_argument("--method", choices=("ctd", "cca", "raw"))
    pipe.add_argument("--sampling-rate", type=float)
    pipe.add_argument("--restarts", type=int)
    pipe.set_defaults(func=_cmd_pipeline)

    ev = sub.add_parser("evaluate", help="accuracy of a membership CSV vs labels")
    ev.add_argument("--memberships", required=True)
    ev.add_argument("--labels", required=True)
    ev.add_argument("--cutoff", type=float, default=0.7)
    ev.add_argument("--output", default="-")
    ev.set_defaults(func=_cmd_evaluate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except NumericalError as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
