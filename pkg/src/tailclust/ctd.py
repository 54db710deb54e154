"""Canonical tail dependence: eigen solution, extremal scores, numeric oracle.

Given a block TPDM with partition (P, Q), the canonical tail dependence is
the maximum of (g' G_XY b)^2 over vectors normalized to the ellipsoids
g' G_XX g = b' G_YY b = 1. Instead of the nonsymmetric product
G_XX^-1 G_XY G_YY^-1 G_YX, the solver works with the symmetric form

    M = G_XX^-1/2 G_XY G_YY^-1 G_YX G_XX^-1/2,

whose eigenvalues are real and ordered. The top eigenvalue is the canonical
tail dependence; the top unit eigenvectors of M and of its mirrored form
constitute the tail topology, and the maximizers are their images under the
inverse block square roots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularityError, ValidationError
from .seeds import derive_seed_sequence
from .tpdm import Tpdm

RIDGE_LADDER = (1e-8, 1e-6, 1e-4)
EIG_FLOOR = 1e-10
DEGENERACY_GAP = 1e-8


@dataclass
class ConditionReport:
    """Smallest block eigenvalues, applied ridges, and degeneracy flag."""

    min_eig_xx: float
    min_eig_yy: float
    ridge_xx: float
    ridge_yy: float
    degenerate: bool = False


@dataclass
class CtdSolution:
    """Canonical tail dependence value, maximizers, and tail topology."""

    tau: float
    gamma_star: np.ndarray
    beta_star: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    spectrum: np.ndarray
    condition_report: ConditionReport = field(default_factory=lambda: ConditionReport(0, 0, 0, 0))

    @property
    def topology(self) -> np.ndarray:
        """Concatenated absolute tail topology (|lambda1|, |lambda2|)."""
        return np.concatenate([np.abs(self.lambda1), np.abs(self.lambda2)])


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry positive (first index on ties)."""
    idx = int(np.argmax(np.abs(vector)))
    if vector[idx] < 0:
        return -vector
    return vector


def _ridged_eig(block: np.ndarray, scale: float) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Eigendecomposition with escalating ridge for near-singular blocks.

    Returns (eigenvalues + ridge, eigenvectors, original min eigenvalue,
    applied ridge). Caller checks the floor.
    """
    eigvals, eigvecs = np.linalg.eigh(block)
    min_eig = float(eigvals[0])
    ridge = 0.0
    if min_eig < 1e-8 * scale:
        for factor in RIDGE_LADDER:
            ridge = factor * scale
            if min_eig + ridge >= 1e-8 * scale:
                break
    return eigvals + ridge, eigvecs, min_eig, ridge


def _top_eigvec(eigvals_desc: np.ndarray, eigvecs_desc: np.ndarray) -> np.ndarray:
    """Top eigenvector; exact top ties break to the lexicographically largest
    sign-fixed candidate."""
    tied = np.nonzero(eigvals_desc[0] - eigvals_desc < DEGENERACY_GAP)[0]
    candidates = [_fix_sign(eigvecs_desc[:, i]) for i in tied]
    if len(candidates) == 1:
        return candidates[0]
    return max(candidates, key=tuple)


def solve_canonical(matrix: np.ndarray, p: int) -> CtdSolution:
    """Solve the block canonical problem for a symmetric PSD-like matrix.

    Shared by the TPDM path and the covariance (classical CCA) path; the
    input's first p rows/columns form the X block.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError("block matrix must be square")
    dim = matrix.shape[0]
    if not 1 <= p < dim:
        raise ValidationError(f"X block size {p} incompatible with dimension {dim}")
    q = dim - p
    scale = float(np.trace(matrix)) / dim
    if scale <= 0:
        raise ValidationError("matrix trace must be positive")
    asym = float(np.max(np.abs(matrix - matrix.T)))
    if asym > 1e-10 * max(scale, 1.0):
        raise ValidationError(f"matrix is not symmetric (max asymmetry {asym:.3g})")

    block_xx = matrix[:p, :p]
    block_xy = matrix[:p, p:]
    block_yy = matrix[p:, p:]

    wx, vx, min_xx, ridge_xx = _ridged_eig(block_xx, scale)
    wy, vy, min_yy, ridge_yy = _ridged_eig(block_yy, scale)
    report = ConditionReport(min_xx, min_yy, ridge_xx, ridge_yy)
    if wx.min() < EIG_FLOOR or wy.min() < EIG_FLOOR:
        raise SingularityError(
            "block matrix singular after maximum ridge "
            f"(min eigenvalues {wx.min():.3g}, {wy.min():.3g})",
            condition_report=report,
        )

    inv_sqrt_xx = (vx * wx ** -0.5) @ vx.T
    inv_sqrt_yy = (vy * wy ** -0.5) @ vy.T
    whitened_cross = inv_sqrt_xx @ block_xy @ inv_sqrt_yy
    sym = whitened_cross @ whitened_cross.T
    sym = (sym + sym.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(sym)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    lam1 = _top_eigvec(eigvals, eigvecs)
    # Pair lambda2 with lambda1 through the whitened cross block so that
    # tau = (gamma*' G_XY beta*)^2 holds even under top-eigenvalue ties.
    paired = whitened_cross.T @ lam1
    norm = float(np.linalg.norm(paired))
    if norm > 1e-12:
        lam2 = paired / norm
    else:
        mirror = whitened_cross.T @ whitened_cross
        mirror = (mirror + mirror.T) / 2.0
        m_eigvals, m_eigvecs = np.linalg.eigh(mirror)
        m_order = np.argsort(m_eigvals)[::-1]
        lam2 = _top_eigvec(m_eigvals[m_order], m_eigvecs[:, m_order])
    lam1 = _fix_sign(lam1)
    lam2 = _fix_sign(lam2)

    tau = float(max(eigvals[0], 0.0))
    report.degenerate = bool(eigvals.size > 1 and (eigvals[0] - eigvals[1]) < DEGENERACY_GAP)
    return CtdSolution(
        tau=tau,
        gamma_star=inv_sqrt_xx @ lam1,
        beta_star=inv_sqrt_yy @ lam2,
        lambda1=lam1,
        lambda2=lam2,
        spectrum=eigvals[: min(p, q)].copy(),
        condition_report=report,
    )


def solve_ctd(tpdm: Tpdm) -> CtdSolution:
    """Canonical tail dependence of a partitioned TPDM (P, Q >= 2)."""
    p, q = tpdm.block_sizes()
    if p < 2 or q < 2:
        raise ValidationError(f"partition blocks must have P, Q >= 2, got ({p}, {q})")
    return solve_canonical(tpdm.matrix, p)


def extremal_scores(panel, solution: CtdSolution, partition=None,
                    channels: list[str] | None = None) -> np.ndarray:
    """Project a standardized panel onto the canonical maximizers.

    Column 1 is gamma*' X_b, column 2 is beta*' Y_b. With a partition, the
    panel's columns are resolved by label; otherwise the first P columns are
    taken as the X block.
    """
    values = np.asarray(panel, dtype=float)
    if values.ndim != 2:
        raise ValidationError("panel must be a B x D matrix")
    p = solution.gamma_star.size
    q = solution.beta_star.size
    if partition is not None:
        if channels is None:
            raise ValidationError("resolving a partition requires channel labels")
        x_idx, y_idx = partition.resolve(channels)
        x_block = values[:, x_idx]
        y_block = values[:, y_idx]
    else:
        if values.shape[1] != p + q:
            raise ValidationError(
                f"panel has {values.shape[1]} columns; solution expects {p + q}"
            )
        x_block = values[:, :p]
        y_block = values[:, p:]
    if x_block.shape[1] != p or y_block.shape[1] != q:
        raise ValidationError("partition sizes do not match the solution")
    return np.column_stack([x_block @ solution.gamma_star, y_block @ solution.beta_star])


def _ellipsoid_normalize(vectors: np.ndarray, form: np.ndarray) -> np.ndarray:
    """Scale each row v so that v' form v = 1."""
    quad = np.einsum("ri,ij,rj->r", vectors, form, vectors)
    quad = np.maximum(quad, 1e-300)
    return vectors / np.sqrt(quad)[:, None]


def numeric_ctd_oracle(tpdm: Tpdm | np.ndarray, restarts: int, seed: int,
                       p: int | None = None, max_iter: int = 1500,
                       patience: int = 150) -> float:
    """Best (g' G_XY b)^2 found by projected gradient ascent.

    Multi-start ascent with renormalization to the constraint ellipsoids
    after every step and per-restart backtracking step sizes. Kept free of
    eigen-decompositions so it is an independent check of the closed-form
    solution (and of its runtime advantage).
    """
    if restarts < 1:
        raise ValidationError("restarts must be at least 1")
    if isinstance(tpdm, Tpdm):
        block_p, _ = tpdm.block_sizes()
        matrix = tpdm.matrix
    else:
        if p is None:
            raise ValidationError("raw matrix input requires the X block size p")
        block_p = p
        matrix = np.asarray(tpdm, dtype=float)
    dim = matrix.shape[0]
    if not 1 <= block_p < dim:
        raise ValidationError(f"X block size {block_p} incompatible with dimension {dim}")
    block_xx = matrix[:block_p, :block_p]
    block_xy = matrix[:block_p, block_p:]
    block_yy = matrix[block_p:, block_p:]
    q = dim - block_p

    starts_g = np.empty((restarts, block_p))
    starts_b = np.empty((restarts, q))
    for r in range(restarts):
        rng = np.random.default_rng(derive_seed_sequence(seed, "oracle-restart", r))
        starts_g[r] = rng.standard_normal(block_p)
        starts_b[r] = rng.standard_normal(q)
    g_vecs = _ellipsoid_normalize(starts_g, block_xx)
    b_vecs = _ellipsoid_normalize(starts_b, block_yy)

    def cross(gv, bv):
        return np.einsum("rp,pq,rq->r", gv, block_xy, bv)

    def tangent(grad, vecs, form):
        # remove the component along the ellipsoid normal (form @ v), so the
        # fixed points are exactly the constrained stationary points
        normal = vecs @ form
        coef = np.einsum("ri,ri->r", grad, normal)
        coef /= np.maximum(np.einsum("ri,ri->r", normal, normal), 1e-300)
        return grad - coef[:, None] * normal

    values = cross(g_vecs, b_vecs) ** 2
    steps = np.full(restarts, 0.2)
    best = float(values.max())
    stall = 0
    for iteration in range(max_iter):
        inner = cross(g_vecs, b_vecs)
        grad_g = tangent(2.0 * inner[:, None] * (b_vecs @ block_xy.T), g_vecs, block_xx)
        grad_b = tangent(2.0 * inner[:, None] * (g_vecs @ block_xy), b_vecs, block_yy)
        cand_g = _ellipsoid_normalize(g_vecs + steps[:, None] * grad_g, block_xx)
        cand_b = _ellipsoid_normalize(b_vecs + steps[:, None] * grad_b, block_yy)
        cand_values = cross(cand_g, cand_b) ** 2
        accept = cand_values >= values - 1e-15
        g_vecs = np.where(accept[:, None], cand_g, g_vecs)
        b_vecs = np.where(accept[:, None], cand_b, b_vecs)
        values = np.where(accept, cand_values, values)
        steps = np.where(accept, np.minimum(steps * 1.1, 10.0), steps * 0.5)
        new_best = float(values.max())
        if new_best > best + 1e-13:
            best = new_best
            stall = 0
        else:
            stall += 1
            if stall >= patience and iteration >= 300:
                break
    return best
