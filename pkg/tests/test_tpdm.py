import warnings

import numpy as np
import pytest

from tailclust import (
    ChannelPartition,
    MarginSpec,
    ValidationError,
    edm,
    estimate_tpdm,
    load_tpdm_csv,
    rank_standardize,
    write_tpdm_csv,
)


def frechet_panel(rng, n_rows, n_cols):
    u = rng.random((n_rows, n_cols))
    return (-np.log(np.maximum(u, 1e-300))) ** -0.5


def test_duplicated_channel_gives_exact_ones():
    rng = np.random.default_rng(0)
    z = frechet_panel(rng, 400, 1)
    panel = np.column_stack([z, z])
    result = estimate_tpdm(panel, q=0.9)
    np.testing.assert_array_equal(result.matrix, np.ones((2, 2)))


def test_trace_equals_dimension():
    rng = np.random.default_rng(1)
    for d in (2, 5, 12):
        panel = frechet_panel(rng, 500, d)
        result = estimate_tpdm(panel, q=0.9)
        assert abs(np.trace(result.matrix) - d) <= 1e-10


def test_matrix_is_bit_symmetric_and_psd():
    rng = np.random.default_rng(2)
    for _ in range(10):
        panel = rng.standard_normal((300, 6)) * (1 + 10 * rng.random(6))
        result = estimate_tpdm(panel, q=0.8)
        np.testing.assert_array_equal(result.matrix, result.matrix.T)
        assert np.linalg.eigvalsh(result.matrix).min() >= -1e-10


def test_independent_columns_near_zero_symmetric_margins():
    # under symmetric margins the non-extreme coordinate's sign cancels, so
    # asymptotic independence drives the off-diagonal toward 0 already at
    # q = 0.95 (Monte-Carlo oracle: |value| < 0.015 across seeds)
    rng = np.random.default_rng(3)
    panel = rank_standardize(frechet_panel(rng, 20_000, 2),
                             MarginSpec("symmetric_pareto2"))
    result = estimate_tpdm(panel, q=0.95)
    assert abs(result.matrix[0, 1]) <= 0.1


def test_independent_frechet_columns_pre_asymptotic_bias():
    # all-positive margins leave the non-extreme coordinate at a typical
    # positive value, so the angle product decays only like 1/r: the
    # Monte-Carlo oracle gives ~0.33 at q=0.95 and the bias shrinks as q
    # grows; the [0, 0.1] band holds only for symmetric margins
    rng = np.random.default_rng(3)
    panel = frechet_panel(rng, 200_000, 2)
    at_95 = estimate_tpdm(panel, q=0.95).matrix[0, 1]
    at_999 = estimate_tpdm(panel, q=0.999).matrix[0, 1]
    assert 0.25 <= at_95 <= 0.40
    assert at_999 < at_95 / 3.0


def test_edm_perfect_dependence():
    rng = np.random.default_rng(4)
    z = frechet_panel(rng, 200, 1)[:, 0]
    assert edm(np.column_stack([z, z]), q=0.9) == 1.0


def test_edm_antipodal_is_minus_one():
    rng = np.random.default_rng(5)
    col = rank_standardize(rng.random((500, 1)), MarginSpec("symmetric_pareto2"))[:, 0]
    value = edm(np.column_stack([col, -col]), q=0.9)
    assert value == -1.0


def test_edm_independent_small():
    rng = np.random.default_rng(6)
    panel = rank_standardize(frechet_panel(rng, 20_000, 2),
                             MarginSpec("symmetric_pareto2"))
    assert abs(edm(panel, q=0.95)) <= 0.1


def test_scale_freeness_bit_exact_for_pow2():
    rng = np.random.default_rng(7)
    panel = frechet_panel(rng, 500, 4)
    base = estimate_tpdm(panel, q=0.9)
    for s in (0.125, 0.5, 2.0, 64.0):
        scaled = estimate_tpdm(panel * s, q=0.9)
        np.testing.assert_array_equal(scaled.matrix, base.matrix)
        assert scaled.exceedance_count == base.exceedance_count


def test_scale_freeness_tight_for_general_scale():
    rng = np.random.default_rng(8)
    panel = frechet_panel(rng, 500, 4)
    base = estimate_tpdm(panel, q=0.9)
    for s in (3.7, 0.0042, 981.3):
        scaled = estimate_tpdm(panel * s, q=0.9)
        np.testing.assert_allclose(scaled.matrix, base.matrix, rtol=1e-12, atol=1e-14)


def test_exceedances_decrease_with_quantile():
    rng = np.random.default_rng(9)
    panel = frechet_panel(rng, 2000, 3)
    counts = [estimate_tpdm(panel, q=q).exceedance_count
              for q in (0.6, 0.7, 0.8, 0.9, 0.95, 0.99)]
    assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_partition_selects_and_orders_columns():
    rng = np.random.default_rng(10)
    panel = frechet_panel(rng, 400, 5)
    channels = ["a", "b", "c", "d", "e"]
    part = ChannelPartition(["d", "a"], ["c", "b"])
    joint = estimate_tpdm(panel, q=0.9, channels=channels, partition=part)
    assert joint.channels == ["d", "a", "c", "b"]
    # block extraction from the joint matrix matches manual reordering
    manual = estimate_tpdm(panel[:, [3, 0, 2, 1]], q=0.9)
    np.testing.assert_array_equal(joint.matrix, manual.matrix)
    xx, xy, yy = joint.blocks()
    np.testing.assert_array_equal(xx, joint.matrix[:2, :2])
    np.testing.assert_array_equal(xy, joint.matrix[:2, 2:])
    np.testing.assert_array_equal(yy, joint.matrix[2:, 2:])


def test_preconditions():
    rng = np.random.default_rng(11)
    with pytest.raises(ValidationError):
        estimate_tpdm(frechet_panel(rng, 20, 3), q=0.9)  # too few blocks
    with pytest.raises(ValidationError):
        estimate_tpdm(frechet_panel(rng, 200, 3), q=0.4)  # q out of range
    with pytest.raises(ValidationError):
        estimate_tpdm(frechet_panel(rng, 200, 3), q=1.0)


def test_rank_deficiency_warning():
    rng = np.random.default_rng(12)
    panel = frechet_panel(rng, 60, 12)  # q=0.95 leaves ~3 exceedances < D
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        estimate_tpdm(panel, q=0.95)
    assert any("rank-deficient" in str(w.message) for w in caught)


def test_tpdm_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(13)
    panel = frechet_panel(rng, 400, 4)
    part = ChannelPartition(["a", "b"], ["c", "d"])
    result = estimate_tpdm(panel, q=0.9, channels=["a", "b", "c", "d"], partition=part)
    path = tmp_path / "tpdm.csv"
    write_tpdm_csv(result, path)
    text = path.read_text()
    assert text.startswith("# q=")
    assert "# c=" in text and "# r=" in text
    loaded = load_tpdm_csv(path)
    np.testing.assert_array_equal(loaded.matrix, result.matrix)
    assert loaded.threshold_quantile == result.threshold_quantile
    assert loaded.exceedance_count == result.exceedance_count
    assert loaded.partition.x_channels == ["a", "b"]
