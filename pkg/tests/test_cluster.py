import numpy as np
import pytest

from tailclust import (
    CtdSolution,
    FeatureStack,
    ValidationError,
    accuracy,
    assign_labels,
    cca_canonical_vectors,
    confusion_matrix,
    fuzzy_cmeans,
    membership_from_distances,
    stack_tail_topologies,
)
from tailclust.ctd import ConditionReport


def make_solution(lam1, lam2):
    lam1 = np.asarray(lam1, dtype=float)
    lam2 = np.asarray(lam2, dtype=float)
    return CtdSolution(
        tau=0.5,
        gamma_star=lam1.copy(),
        beta_star=lam2.copy(),
        lambda1=lam1,
        lambda2=lam2,
        spectrum=np.array([0.5]),
        condition_report=ConditionReport(1.0, 1.0, 0.0, 0.0),
    )


def test_stack_takes_absolute_values():
    sol = make_solution([-0.6, 0.8], [1.0, 0.0])
    stack = stack_tail_topologies([("s1", sol)])
    np.testing.assert_allclose(stack.features[0], [0.6, 0.8, 1.0, 0.0])


def test_stack_sign_invariance():
    sol_pos = make_solution([0.6, 0.8], [1.0, 0.0])
    sol_neg = make_solution([-0.6, -0.8], [-1.0, 0.0])
    stack = stack_tail_topologies([("a", sol_pos), ("b", sol_neg)])
    np.testing.assert_array_equal(stack.features[0], stack.features[1])


def test_stack_single_subject_and_mismatch():
    sol = make_solution([1.0, 0.0], [0.0, 1.0])
    stack = stack_tail_topologies([("only", sol)])
    assert stack.features.shape == (1, 4)
    other = make_solution([1.0, 0.0, 0.0], [0.0, 1.0])
    with pytest.raises(ValidationError):
        stack_tail_topologies([("a", sol), ("b", other)])


def test_membership_equidistant_is_exact_half():
    d2 = np.array([[2.0, 2.0]])
    u = membership_from_distances(d2, m=1.7)
    assert u[0, 0] == 0.5 and u[0, 1] == 0.5


def test_membership_exact_hit_rule():
    d2 = np.array([[0.0, 4.0], [1.0, 0.0], [0.0, 0.0]])
    u = membership_from_distances(d2, m=2.0)
    np.testing.assert_array_equal(u[0], [1.0, 0.0])
    np.testing.assert_array_equal(u[1], [0.0, 1.0])
    np.testing.assert_array_equal(u[2], [1.0, 0.0])  # tie -> first zero


def test_membership_rows_sum_to_one():
    rng = np.random.default_rng(0)
    d2 = rng.random((50, 4)) + 1e-3
    u = membership_from_distances(d2, m=1.3)
    np.testing.assert_allclose(u.sum(axis=1), 1.0, atol=1e-10)
    assert np.all(u >= 0)


def test_fcm_near_hard_limit_matches_kmeans_assignment():
    rng = np.random.default_rng(1)
    group_a = rng.normal(0.0, 0.05, size=(8, 3))
    group_b = rng.normal(5.0, 0.05, size=(7, 3))
    data = np.vstack([group_a, group_b])
    result = fuzzy_cmeans(data, s=2, m=1.1, seed=3, restarts=10)
    # exact nearest-true-center assignment as the oracle
    centers = np.vstack([group_a.mean(axis=0), group_b.mean(axis=0)])
    d = ((data[:, None, :] - centers[None]) ** 2).sum(axis=2)
    oracle = d.argmin(axis=1)
    own = result.u[np.arange(15), result.hard_labels - 1]
    assert np.all(own >= 0.99)
    assert accuracy(result.hard_labels, oracle + 1) == 1.0


def test_fcm_objective_non_increasing():
    rng = np.random.default_rng(2)
    data = rng.random((30, 4))
    for m in (1.1, 1.5, 2.0, 2.5):
        result = fuzzy_cmeans(data, s=3, m=m, seed=11, restarts=3)
        trace = np.array(result.objective_trace)
        assert np.all(np.diff(trace) <= 1e-12)


def test_fcm_row_stochastic_and_point_on_center():
    data = np.vstack([np.zeros((5, 2)), np.ones((5, 2)) * 4.0])
    result = fuzzy_cmeans(data, s=2, m=2.0, seed=0, restarts=5)
    np.testing.assert_allclose(result.u.sum(axis=1), 1.0, atol=1e-10)
    # points sitting exactly on a converged center get full membership
    assert result.u.max() > 0.999


def test_fcm_validation():
    data = np.random.default_rng(0).random((6, 2))
    with pytest.raises(ValidationError):
        fuzzy_cmeans(data, s=7, m=1.5, seed=0)
    with pytest.raises(ValidationError):
        fuzzy_cmeans(data, s=2, m=1.0, seed=0)
    with pytest.raises(ValidationError):
        fuzzy_cmeans(data, s=2, m=3.0, seed=0)
    with pytest.raises(ValidationError):
        fuzzy_cmeans(data, s=2, m=2.0, seed=0, tol=0.0)


def test_fcm_deterministic_given_seed():
    data = np.random.default_rng(5).random((20, 3))
    a = fuzzy_cmeans(data, s=2, m=1.8, seed=42, restarts=4)
    b = fuzzy_cmeans(data, s=2, m=1.8, seed=42, restarts=4)
    np.testing.assert_array_equal(a.u, b.u)


def test_assign_labels_examples():
    u = np.array([[0.9, 0.1], [0.6, 0.4], [0.5, 0.5]])
    labels, flags = assign_labels(u, cutoff=0.7)
    np.testing.assert_array_equal(labels, [1, 1, 1])
    np.testing.assert_array_equal(flags, [False, True, True])


def test_assign_labels_cutoff_domain():
    u = np.full((3, 2), 0.5)
    with pytest.raises(ValidationError):
        assign_labels(u, cutoff=0.5)  # must exceed 1/S
    assign_labels(u, cutoff=0.51)


def test_accuracy_known_confusions():
    # M = [[6, 0], [0, 8]] at N = 14 -> 1.0
    truth = np.array([1] * 6 + [2] * 8)
    pred = truth.copy()
    assert accuracy(pred, truth) == 1.0
    # perfectly swapped labels -> still 1.0
    assert accuracy(3 - pred, truth) == 1.0
    cm = confusion_matrix(pred, truth)
    np.testing.assert_array_equal(cm.m, [[6, 0], [0, 8]])
    assert cm.n_total == 14


def test_accuracy_chance_floor():
    # M = [[3, 3], [4, 4]] at N = 14 -> 0.5
    truth = np.array([1] * 6 + [2] * 8)
    pred = np.array([1, 1, 1, 2, 2, 2, 1, 1, 1, 1, 2, 2, 2, 2])
    assert accuracy(pred, truth) == 0.5


def test_accuracy_validation():
    with pytest.raises(ValidationError):
        accuracy([], [])
    with pytest.raises(ValidationError):
        accuracy([1, 3], [1, 2])


def test_accuracy_invariant_under_subject_permutation():
    rng = np.random.default_rng(3)
    truth = rng.integers(1, 3, size=30)
    pred = rng.integers(1, 3, size=30)
    base = accuracy(pred, truth)
    perm = rng.permutation(30)
    assert accuracy(pred[perm], truth[perm]) == base


def test_cca_duplicated_block_is_one():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((500, 3))
    panel = np.hstack([x, x])
    rho, lam0 = cca_canonical_vectors(panel, 3)
    assert rho == pytest.approx(1.0, abs=1e-8)
    assert lam0.shape == (6,)


def test_cca_independent_blocks_small():
    rng = np.random.default_rng(5)
    panel = rng.standard_normal((10_000, 6))
    rho, _ = cca_canonical_vectors(panel, 3)
    assert rho <= 0.05


def test_cca_reduces_to_squared_pearson():
    rng = np.random.default_rng(6)
    x = rng.standard_normal(2000)
    y = 0.6 * x + 0.8 * rng.standard_normal(2000)
    rho, _ = cca_canonical_vectors(np.column_stack([x, y]), 1)
    r = np.corrcoef(x, y)[0, 1]
    assert abs(rho - r ** 2) <= 1e-10


def test_cca_needs_more_rows_than_columns():
    with pytest.raises(ValidationError):
        cca_canonical_vectors(np.zeros((4, 6)), 3)


def test_feature_stack_validation():
    with pytest.raises(ValidationError):
        FeatureStack(["a"], np.array([[1.0, -0.2]]))
    with pytest.raises(ValidationError):
        FeatureStack(["a", "b"], np.array([[1.0, 0.2]]))
