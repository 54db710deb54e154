"""Feature stacking, fuzzy C-means, label assignment, and the CCA baseline.

Subjects are represented by the concatenated absolute tail topology
(|lambda1|, |lambda2|) — or |Lambda0| from classical canonical correlation on
the raw features for the baseline path — and soft-clustered with fuzzy
C-means. Hard labels come from the membership argmax; a subject whose top
membership falls below the cut-off is flagged fuzzy. Two-cluster accuracy is
invariant to label permutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ctd import CtdSolution, solve_canonical
from .errors import ValidationError
from .seeds import derive_rng


@dataclass
class FeatureStack:
    """Per-subject nonnegative feature rows (N x D)."""

    subjects: list[str]
    features: np.ndarray

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        if self.features.ndim != 2 or self.features.shape[0] != len(self.subjects):
            raise ValidationError("feature rows must match the subject list")
        if not np.all(np.isfinite(self.features)):
            raise ValidationError("non-finite feature value")
        if np.any(self.features < 0):
            raise ValidationError("stacked features must be nonnegative")


@dataclass
class MembershipMatrix:
    """Fuzzy memberships (row-stochastic), centers, and derived labels."""

    u: np.ndarray
    centers: np.ndarray
    fuzziness: float
    objective_trace: list[float]
    hard_labels: np.ndarray
    fuzzy_flags: np.ndarray
    cutoff: float = 0.7


@dataclass
class ConfusionMatrix:
    m: np.ndarray
    n_total: int


def stack_tail_topologies(solutions: list[tuple[str, CtdSolution]]) -> FeatureStack:
    """Stack per-subject absolute tail topologies into an N x (P+Q) matrix.

    Absolute values remove eigenvector sign ambiguity, so sign-flipped
    solutions stack to identical rows.
    """
    if not solutions:
        raise ValidationError("no solutions to stack")
    shapes = {(sol.lambda1.size, sol.lambda2.size) for _, sol in solutions}
    if len(shapes) != 1:
        raise ValidationError(f"solutions disagree on (P, Q): {sorted(shapes)}")
    subjects = [subject for subject, _ in solutions]
    rows = [sol.topology for _, sol in solutions]
    return FeatureStack(subjects=subjects, features=np.vstack(rows))


def membership_from_distances(sq_distances: np.ndarray, m: float) -> np.ndarray:
    """Fuzzy membership update from squared point-center distances.

    U_ns is proportional to (d_ns^2)^(-1/(m-1)), normalized over clusters;
    equivalently the inverse of the sum over clusters of the squared-distance
    ratios to the power 1/(m-1). A point at zero distance from a center gets
    full membership there (ties split to the first such center).
    """
    d2 = np.asarray(sq_distances, dtype=float)
    n, s = d2.shape
    u = np.empty_like(d2)
    zero_rows = (d2 <= 0.0).any(axis=1)
    if np.any(zero_rows):
        u[zero_rows] = 0.0
        hit = np.argmax(d2[zero_rows] <= 0.0, axis=1)
        u[np.nonzero(zero_rows)[0], hit] = 1.0
    regular = ~zero_rows
    if np.any(regular):
        d2_regular = d2[regular]
        ratios = d2_regular / d2_regular.min(axis=1, keepdims=True)
        weights = ratios ** (-1.0 / (m - 1.0))
        u[regular] = weights / weights.sum(axis=1, keepdims=True)
    return u


def _squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("nsd,nsd->ns", diff, diff)


def _fcm_objective(u: np.ndarray, d2: np.ndarray, m: float) -> float:
    return float(((u ** m) * d2).sum())


def _fcm_single_run(features: np.ndarray, s: int, m: float,
                    rng: np.random.Generator, max_iter: int, tol: float):
    n = features.shape[0]
    u = rng.random((n, s))
    u /= u.sum(axis=1, keepdims=True)
    trace: list[float] = []
    centers = None
    for _ in range(max_iter):
        weights = u ** m
        denom = weights.sum(axis=0)
        denom = np.maximum(denom, 1e-300)
        centers = (weights.T @ features) / denom[:, None]
        d2 = np.maximum(_squared_distances(features, centers), 0.0)
        u_next = membership_from_distances(d2, m)
        trace.append(_fcm_objective(u_next, d2, m))
        delta = float(np.max(np.abs(u_next - u)))
        u = u_next
        if delta < tol:
            break
    return u, centers, trace


def fuzzy_cmeans(stack, s: int, m: float, seed: int, max_iter: int = 300,
                 tol: float = 1e-6, restarts: int = 10,
                 cutoff: float = 0.7) -> MembershipMatrix:
    """Fuzzy C-means on a feature stack (or raw N x D matrix).

    Memberships are initialized uniformly at random (row-normalized, seeded);
    `restarts` independent runs keep the one with the lowest final objective.
    Alternating updates stop when max |delta U| < tol or after max_iter.
    """
    features = stack.features if isinstance(stack, FeatureStack) else np.asarray(stack, dtype=float)
    if features.ndim != 2:
        raise ValidationError("features must be an N x D matrix")
    if not np.all(np.isfinite(features)):
        raise ValidationError("non-finite feature value")
    n = features.shape[0]
    if not 2 <= s <= n:
        raise ValidationError(f"cluster count S={s} must satisfy 2 <= S <= N={n}")
    if not 1.0 < m < 3.0:
        raise ValidationError(f"fuzziness m={m} must lie in (1, 3)")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if restarts < 1:
        raise ValidationError("restarts must be at least 1")

    best = None
    for restart in range(restarts):
        rng = derive_rng(seed, "fcm-restart", restart)
        u, centers, trace = _fcm_single_run(features, s, m, rng, max_iter, tol)
        if best is None or trace[-1] < best[2][-1]:
            best = (u, centers, trace)
    u, centers, trace = best
    hard, flags = assign_labels(u, cutoff)
    return MembershipMatrix(
        u=u,
        centers=centers,
        fuzziness=m,
        objective_trace=trace,
        hard_labels=hard,
        fuzzy_flags=flags,
        cutoff=cutoff,
    )


def assign_labels(u, cutoff: float = 0.7) -> tuple[np.ndarray, np.ndarray]:
    """Hard labels (argmax, 1-based, ties to the lowest index) and fuzzy flags.

    A subject is flagged fuzzy when its top membership falls below the
    cut-off; the hard label is assigned regardless so the confusion matrix
    stays complete.
    """
    matrix = u.u if isinstance(u, MembershipMatrix) else np.asarray(u, dtype=float)
    if matrix.ndim != 2:
        raise ValidationError("membership matrix must be N x S")
    s = matrix.shape[1]
    if not (1.0 / s) < cutoff <= 1.0:
        raise ValidationError(f"cutoff {cutoff} must lie in (1/S, 1]")
    hard = np.argmax(matrix, axis=1) + 1
    flags = matrix.max(axis=1) < cutoff
    return hard.astype(int), flags


def confusion_matrix(pred, truth) -> ConfusionMatrix:
    pred = np.asarray(pred, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if pred.size == 0:
        raise ValidationError("cannot evaluate an empty label vector")
    if pred.shape != truth.shape:
        raise ValidationError("prediction/truth length mismatch")
    if np.any((truth < 1) | (truth > 2)) or np.any((pred < 1) | (pred > 2)):
        raise ValidationError("two-cluster accuracy expects labels in {1, 2}")
    m = np.zeros((2, 2), dtype=int)
    for t, p in zip(truth, pred):
        m[t - 1, p - 1] += 1
    return ConfusionMatrix(m=m, n_total=int(pred.size))


def accuracy(pred, truth) -> float:
    """Two-cluster accuracy, invariant to swapping the cluster labels.

    max(diagonal sum, antidiagonal sum) / N, so the value lies in [0.5, 1].
    """
    cm = confusion_matrix(pred, truth).m
    n = cm.sum()
    return float(max(cm[0, 0] + cm[1, 1], cm[0, 1] + cm[1, 0]) / n)


def cca_canonical_vectors(panel, p: int) -> tuple[float, np.ndarray]:
    """Classical canonical correlation of the raw features.

    Returns (rho, Lambda0) where rho is the squared top canonical
    correlation of the X block (first p columns) against the Y block, and
    Lambda0 concatenates the top canonical directions mapped through the
    covariance block square roots (the bulk-statistics mirror of the tail
    topology). Uses the same ridge policy as the tail solver.
    """
    values = np.asarray(panel, dtype=float)
    if values.ndim != 2:
        raise ValidationError("panel must be a B x D matrix")
    n_rows, dim = values.shape
    if n_rows <= dim:
        raise ValidationError(f"need more blocks than channels ({n_rows} <= {dim})")
    if not 1 <= p < dim:
        raise ValidationError(f"X block size {p} incompatible with dimension {dim}")
    cov = np.cov(values, rowvar=False)
    solution = solve_canonical(cov, p)
    lambda0 = np.concatenate([solution.lambda1, solution.lambda2])
    return solution.tau, lambda0
