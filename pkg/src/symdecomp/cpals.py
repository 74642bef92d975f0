"""Dense CP alternating least squares and the symmetrization post-pass.

This is the pathway that ignores symmetry: fit an ordinary CP model (one
factor matrix per mode) to the dense tensor, then align signs and average
the modes into a single symmetric Kruskal model.  Uniqueness utilities
(`krank`, `uniqueness_sufficient`) characterize when the two problems share
their global solution.

Index conventions are fixed so `unfold` and `khatri_rao` satisfy the ALS
normal equations: mode-j unfolding keeps the remaining modes in ascending
order with the last index fastest, and the Khatri-Rao product runs over the
same ascending mode order.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .kmodel import FactorSet, KruskalSymModel

logger = logging.getLogger(__name__)

_ZERO_COLUMN = 1e-300
_KRANK_MAX_COLUMNS = 12
_KRANK_SV_TOL = 1e-10


@dataclass(frozen=True)
class AlsConfig:
    max_sweeps: int = 500
    fit_change_tolerance: float = 1e-10
    ridge: float = 0.0  # explicit Tikhonov term; ill-conditioned solves fall back anyway

    def __post_init__(self):
        if self.fit_change_tolerance <= 0:
            raise ValueError("fit_change_tolerance must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if self.ridge < 0:
            raise ValueError("ridge must be nonnegative")


@dataclass
class AlsInfo:
    sweeps: int
    fit: float
    fit_history: list
    ill_conditioned: bool = False


def khatri_rao(matrices) -> np.ndarray:
    """Columnwise Kronecker product; row count multiplies, columns must agree."""
    mats = [np.asarray(m, dtype=np.float64) for m in matrices]
    if not mats:
        raise ValueError("khatri_rao needs at least one matrix")
    cols = {m.shape[1] for m in mats}
    if len(cols) != 1:
        raise ValueError("all matrices must share the same column count")
    out = mats[0]
    for m in mats[1:]:
        out = (out[:, None, :] * m[None, :, :]).reshape(-1, m.shape[1])
    return out


def unfold(dense: np.ndarray, mode: int) -> np.ndarray:
    """Mode-`mode` matricization (0-based mode), remaining modes ascending."""
    dense = np.asarray(dense)
    if not 0 <= mode < dense.ndim:
        raise ValueError(f"mode {mode} out of range for order {dense.ndim}")
    return np.moveaxis(dense, mode, 0).reshape(dense.shape[mode], -1)


def refold(matrix: np.ndarray, mode: int, shape) -> np.ndarray:
    """Inverse of `unfold`."""
    shape = tuple(shape)
    rest = shape[:mode] + shape[mode + 1 :]
    return np.moveaxis(matrix.reshape((shape[mode],) + rest), 0, mode)


def _model_norm_sq(weights, grams):
    acc = np.ones_like(grams[0])
    for g in grams:
        acc = acc * g
    return float(weights @ acc @ weights)


def _solve_normal_equations(v: np.ndarray, w: np.ndarray) -> tuple:
    """Solve v @ x.T = w.T; rank-deficient systems get a trace-scaled ridge.

    The normal-equation matrix is positive semidefinite, so a failed
    Cholesky factorization (or a non-finite solve) detects deficiency.
    """
    rank = v.shape[0]
    try:
        chol = scipy.linalg.cho_factor(v, lower=True, check_finite=False)
        solved = scipy.linalg.cho_solve(chol, w.T, check_finite=False).T
        if np.all(np.isfinite(solved)):
            return solved, False
    except scipy.linalg.LinAlgError:
        pass
    bump = 1e-12 * max(float(np.trace(v)), 1.0)
    return np.linalg.solve(v + bump * np.eye(rank), w.T).T, True


def cp_als(dense: np.ndarray, rank: int, x0: FactorSet, config: AlsConfig | None = None):
    """Alternating least squares for a rank-`rank` CP model of a cubic tensor.

    Each half-step solves the mode-j normal equations exactly; the fit
    1 - ||A - model|| / ||A|| is nondecreasing across sweeps.  Stops when
    the fit change drops below `fit_change_tolerance` or at `max_sweeps`.

    Returns (FactorSet, AlsInfo).  Ill-conditioned normal equations are
    re-solved with a ridge of 1e-12 * trace and flagged in the info.
    """
    cfg = config or AlsConfig()
    dense = np.asarray(dense, dtype=np.float64)
    order = dense.ndim
    if rank < 1:
        raise ValueError("rank must be >= 1")
    if len(set(dense.shape)) != 1:
        raise ValueError(f"tensor must be cubic, got shape {dense.shape}")
    n = dense.shape[0]
    if x0.order != order or x0.dim != n or x0.rank != rank:
        raise ValueError("initial factors do not match tensor shape and rank")

    factors = [f.copy() for f in x0.factors]
    weights = np.ones(rank)
    grams = [f.T @ f for f in factors]
    norm_a = float(np.linalg.norm(dense.ravel()))
    if norm_a == 0.0:
        raise ValueError("cannot fit the zero tensor")
    unfoldings = [unfold(dense, j) for j in range(order)]

    fit = -np.inf
    history = []
    ill = False
    for sweep in range(cfg.max_sweeps):
        for j in range(order):
            others = [k for k in range(order) if k != j]
            z = khatri_rao([factors[k] for k in others])
            v = np.ones((rank, rank))
            for k in others:
                v = v * grams[k]
            w = unfoldings[j] @ z
            if cfg.ridge > 0:
                v = v + cfg.ridge * np.eye(rank)
            # the solve absorbs the model scale, so the old weights drop out
            solved, bad = _solve_normal_equations(v, w)
            ill = ill or bad
            norms = np.linalg.norm(solved, axis=0)
            safe = np.where(norms > _ZERO_COLUMN, norms, 1.0)
            factors[j] = solved / safe
            weights = norms
            grams[j] = factors[j].T @ factors[j]

        # ||A - M||^2 = ||A||^2 - 2<A, M> + ||M||^2 via the last solve's pieces
        inner = float(np.sum((w * weights[None, :]) * factors[order - 1]))
        model_sq = _model_norm_sq(weights, grams)
        resid_sq = max(norm_a**2 - 2.0 * inner + model_sq, 0.0)
        new_fit = 1.0 - np.sqrt(resid_sq) / norm_a
        history.append(new_fit)
        if sweep > 0 and abs(new_fit - fit) < cfg.fit_change_tolerance:
            fit = new_fit
            break
        fit = new_fit
    if ill:
        logger.warning("cp_als: ill-conditioned normal equations, used ridge fallback")

    # absorb the internal weights into the first mode
    factors[0] = factors[0] * weights
    return FactorSet(tuple(factors)), AlsInfo(len(history), fit, history, ill)


def symmetrize_kruskal(fs: FactorSet) -> KruskalSymModel:
    """Collapse a CP factor set into a normalized symmetric Kruskal model.

    Per component: normalize every mode's column (the weight accumulates the
    norms), flip any column whose inner product with mode 0's column is
    negative (negating the weight per flip), then average the aligned
    columns across modes.  The averaged column is re-normalized and the
    correction absorbed into the weight so the reported model has unit
    columns.  An inner product of exactly zero counts as aligned.
    """
    order, rank = fs.order, fs.rank
    weights = np.ones(rank)
    aligned = [f.copy() for f in fs.factors]
    for k in range(rank):
        for j in range(order):
            norm = np.linalg.norm(aligned[j][:, k])
            if norm < _ZERO_COLUMN:
                raise ValueError(f"zero column in mode {j}, component {k}")
            weights[k] *= norm
            aligned[j][:, k] /= norm
            if j > 0 and float(aligned[0][:, k] @ aligned[j][:, k]) < 0:
                weights[k] = -weights[k]
                aligned[j][:, k] = -aligned[j][:, k]
    mean = sum(aligned) / order
    norms = np.linalg.norm(mean, axis=0)
    if np.any(norms < _ZERO_COLUMN):
        bad = int(np.argmin(norms))
        raise ValueError(f"averaged column {bad} vanished; modes disagree")
    weights = weights * norms**order
    return KruskalSymModel(weights, mean / norms, normalized=True)


def krank(matrix: np.ndarray) -> int:
    """Largest k such that every k columns of `matrix` are linearly independent.

    Exhaustive over column subsets; guarded to at most 12 columns.  Rank of
    a subset is judged by its singular values at 1e-10 of the largest.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    n, p = matrix.shape
    if p > _KRANK_MAX_COLUMNS:
        raise ValueError(f"krank supports at most {_KRANK_MAX_COLUMNS} columns, got {p}")
    best = 0
    for k in range(1, min(n, p) + 1):
        for cols in itertools.combinations(range(p), k):
            sv = np.linalg.svd(matrix[:, cols], compute_uv=False)
            if sv[-1] <= _KRANK_SV_TOL * sv[0]:
                return best
        best = k
    return best


def uniqueness_sufficient(order: int, rank: int, kr: int) -> bool:
    """Sufficient condition 2p + (m-1) <= m * k-rank for essential uniqueness."""
    if order < 1 or rank < 1 or kr < 1:
        raise ValueError("order, rank and k-rank must be >= 1")
    return 2 * rank + (order - 1) <= order * kr


def minimal_sufficient_krank(order: int, rank: int) -> int:
    """Smallest k-rank satisfying `uniqueness_sufficient`: ceil((2p+m-1)/m)."""
    return -((2 * rank + order - 1) // -order)
