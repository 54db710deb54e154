import json

import numpy as np
import pytest

from tailclust import (
    BandPeriodogramPanel,
    ManifestEntry,
    MarginSpec,
    ValidationError,
    default_cluster_deltas,
    parse_partition,
    simulate_panel,
    write_feature_panel,
    write_manifest,
)
from tailclust.pipeline import PipelineConfig, run_pipeline, run_report_export
from tailclust.simgen import SimulationSpec


@pytest.fixture(scope="module")
def sim_manifest(tmp_path_factory):
    """Small simulated cohort written to disk the way the CLI does."""
    out = tmp_path_factory.mktemp("cohort")
    d1, d2 = default_cluster_deltas(3, 3)
    spec = SimulationSpec(delta1=d1, delta2=d2, n_subjects=8, n_blocks=400,
                          p=3, q=3, seed=5)
    res = simulate_panel(spec)
    channels = ["x1", "x2", "x3", "y1", "y2", "y3"]
    entries = []
    for n, raw in enumerate(res.raw_panels):
        subject = f"s{n + 1}"
        path = out / f"{subject}.csv"
        write_feature_panel(
            BandPeriodogramPanel(subject_id=subject, channels=channels, values=raw),
            path,
        )
        entries.append(ManifestEntry(subject, path, int(res.truth.labels[n])))
    manifest = out / "manifest.csv"
    write_manifest(entries, manifest)
    return manifest


def make_config(**overrides):
    base = dict(
        partition=parse_partition("x1,x2,x3:y1,y2,y3"),
        margin=MarginSpec("symmetric_pareto2"),
        tail_quantile=0.9,
        fuzziness_grid=(1.1, 2.0),
        seed=7,
        restarts=5,
    )
    base.update(overrides)
    return PipelineConfig(**base)


def test_pipeline_end_to_end(sim_manifest):
    report = run_pipeline(make_config(), sim_manifest)
    assert len(report.subjects) == 8
    assert len(report.clusterings) == 2
    for clustering in report.clusterings:
        assert clustering.accuracy == 1.0
        np.testing.assert_allclose(clustering.memberships.sum(axis=1), 1.0,
                                   atol=1e-10)
    for res in report.subject_results:
        assert res.topology.shape == (6,)
        assert 0.0 <= res.canonical_value <= 1.0 + 1e-10


def test_pipeline_cca_and_raw_methods(sim_manifest):
    cca = run_pipeline(make_config(method="cca"), sim_manifest)
    raw = run_pipeline(make_config(method="raw"), sim_manifest)
    assert all(r.condition is None for r in cca.subject_results)
    assert all(r.canonical_value is None for r in raw.subject_results)
    assert raw.clusterings[0].memberships.shape == (8, 2)


def test_pipeline_requires_two_subjects(tmp_path, sim_manifest):
    single = tmp_path / "one.csv"
    lines = sim_manifest.read_text().splitlines()
    single.write_text("\n".join(lines[:2]) + "\n")
    with pytest.raises(ValidationError, match="at least 2"):
        run_pipeline(make_config(), single)


def test_pipeline_error_carries_subject_and_stage(tmp_path):
    bad_dir = tmp_path / "bad"
    bad_dir.mkdir()
    channels = ["x1", "x2", "y1", "y2"]
    rng = np.random.default_rng(0)
    entries = []
    for i, n_rows in enumerate((100, 4)):  # second subject too short for tpdm
        panel = BandPeriodogramPanel(
            subject_id=f"s{i + 1}", channels=channels,
            values=np.abs(rng.standard_normal((n_rows, 4))) + 0.1,
        )
        path = bad_dir / f"s{i + 1}.csv"
        write_feature_panel(panel, path)
        entries.append(ManifestEntry(f"s{i + 1}", path, 1))
    manifest = bad_dir / "m.csv"
    write_manifest(entries, manifest)
    config = make_config(partition=parse_partition("x1,x2:y1,y2"))
    with pytest.raises(ValidationError, match="subject 's2'"):
        run_pipeline(config, manifest)


def test_report_export_schemas(sim_manifest, tmp_path):
    report = run_pipeline(make_config(), sim_manifest)
    out = tmp_path / "export"
    written = run_report_export(report, out)
    names = {p.name for p in written}
    assert {"memberships_m1.1.csv", "memberships_m2.csv", "topologies.csv",
            "summary.json", "timings.csv"} <= names

    topo_lines = (out / "topologies.csv").read_text().strip().splitlines()
    assert len(topo_lines) == 9  # header + 8 subjects
    assert topo_lines[0] == "subject_id,x1,x2,x3,y1,y2,y3"
    assert len(topo_lines[1].split(",")) == 7

    membership_lines = (out / "memberships_m1.1.csv").read_text().strip().splitlines()
    assert membership_lines[0] == "subject_id,u_1,u_2,hard_label,fuzzy_flag"
    assert len(membership_lines) == 9

    summary = json.loads((out / "summary.json").read_text())
    assert summary["method"] == "ctd"
    assert len(summary["per_m"]) == 2
    assert summary["per_m"][0]["accuracy"] == 1.0

    timing_lines = (out / "timings.csv").read_text().strip().splitlines()
    assert timing_lines[0] == "subject_id,stage,seconds"
    assert len(timing_lines) > 1


def test_summary_json_byte_stable(sim_manifest, tmp_path):
    config = make_config()
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    run_report_export(run_pipeline(config, sim_manifest), out_a)
    run_report_export(run_pipeline(config, sim_manifest), out_b)
    assert (out_a / "summary.json").read_bytes() == (out_b / "summary.json").read_bytes()
    for name in ("memberships_m1.1.csv", "memberships_m2.csv", "topologies.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_config_from_dict_and_file(tmp_path):
    raw = {
        "partition": "a,b:c,d",
        "band": "gamma",
        "margin": "symmetric-pareto2",
        "fuzziness_grid": [1.2, 1.5],
        "seed": 3,
    }
    config = PipelineConfig.from_dict(raw)
    assert config.partition.p == 2
    assert config.band.name == "gamma"
    assert config.margin.family == "symmetric_pareto2"

    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw))
    config2 = PipelineConfig.from_file(path, overrides={"seed": 9, "band": None})
    assert config2.seed == 9

    with pytest.raises(ValidationError, match="unknown config fields"):
        PipelineConfig.from_dict({"partition": "a,b:c,d", "bogus": 1})
    with pytest.raises(ValidationError):
        PipelineConfig.from_dict({"partition": "a,b:c,d", "fuzziness_grid": []})


def test_config_validation():
    part = parse_partition("a,b:c,d")
    with pytest.raises(ValidationError):
        PipelineConfig(partition=part, method="psychic")
    with pytest.raises(ValidationError):
        PipelineConfig(partition=part, tail_quantile=0.3)
    with pytest.raises(ValidationError):
        PipelineConfig(partition=part, fuzziness_grid=(0.9,))
