"""Evaluation metrics: relative error, per-component solution score,
constraint violation, and rank utilities.

The solution score compares a computed model against the truth after both
are column-normalized (weights absorb the norm correction).  Each matched
pair contributes a weight-agreement factor, clamped at zero when the
weights disagree in sign, times the absolute inner product of the unit
columns; the total is averaged over the truth's component count.  Matching
is greedy by default -- repeatedly take the best remaining pair -- which is
the convention established tensor toolkits use; an exact assignment is
available via ``matching="optimal"``.  The optimal assignment can only be
larger, and the two agree whenever matches are unambiguous.

All functions are pure and safe for concurrent use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .kmodel import KruskalSymModel, model_to_symtensor, normalize_columns
from .symspace import SymTensor, sym_norm

GREEDY = "greedy"
OPTIMAL = "optimal"

# (order, dim) pairs where the generic typical-rank count is one short
_TYPICAL_RANK_EXCEPTIONS = {(3, 5), (4, 3), (4, 4), (4, 5)}


@dataclass(frozen=True)
class SuccessThresholds:
    relative_error: float = 0.1
    solution_score: float = 0.9
    constraint_violation: float = 0.01


@dataclass
class RunRecord:
    """Metrics of one optimization run on one instance."""

    instance: str
    start_index: int
    relative_error: float
    solution_score: float
    constraint_violation: float
    runtime: float
    status: str

    CSV_FIELDS = (
        "instance",
        "start_index",
        "relative_error",
        "solution_score",
        "constraint_violation",
        "runtime",
        "status",
    )

    def to_row(self) -> list:
        return [getattr(self, f) for f in self.CSV_FIELDS]


def relative_error(tensor: SymTensor, model: KruskalSymModel) -> float:
    """||data - model|| / ||data|| in the symmetric (multiplicity) norm."""
    denom = sym_norm(tensor)
    if denom == 0.0:
        raise ValueError("relative error is undefined for the zero tensor")
    recon = model_to_symtensor(model, tensor.catalog)
    diff = SymTensor(tensor.catalog, tensor.values - recon.values)
    return sym_norm(diff) / denom


def constraint_violation(factors: np.ndarray) -> float:
    """sum_k (x_k'x_k - 1)**2 over the factor columns."""
    factors = np.asarray(factors, dtype=np.float64)
    return float(np.sum((np.sum(factors**2, axis=0) - 1.0) ** 2))


def _pair_score(lam_c, x_c, lam_t, x_t, order) -> float:
    inner = float(x_c @ x_t)
    lam = lam_c
    if order % 2 == 1 and inner < 0:
        # odd order: (w, x) and (-w, -x) are the same component
        lam, inner = -lam_c, -inner
    big = max(abs(lam), abs(lam_t))
    if big == 0.0:
        factor = 1.0  # both components vanish; compare directions only
    else:
        factor = max(1.0 - abs(lam - lam_t) / big, 0.0)
    return factor * abs(inner)


def _score_matrix(computed: KruskalSymModel, truth: KruskalSymModel, order: int):
    comp = normalize_columns(computed, order)
    tru = normalize_columns(truth, order)
    p_t, p_c = tru.rank, comp.rank
    scores = np.zeros((p_t, max(p_c, p_t)))
    for i in range(p_t):
        for j in range(p_c):
            scores[i, j] = _pair_score(
                comp.weights[j], comp.factors[:, j], tru.weights[i], tru.factors[:, i], order
            )
    # missing computed components behave as zero-weight padding (score 0)
    return scores, p_t, p_c


def _greedy_assign(scores: np.ndarray) -> np.ndarray:
    work = scores.copy()
    rows, cols = work.shape
    assign = np.full(rows, -1, dtype=int)
    for _ in range(rows):
        i, j = np.unravel_index(int(np.argmax(work)), work.shape)
        assign[i] = j
        work[i, :] = -np.inf
        work[:, j] = -np.inf
    return assign


def solution_score(
    computed: KruskalSymModel,
    truth: KruskalSymModel,
    order: int,
    matching: str = GREEDY,
) -> tuple:
    """Score in [0, 1] plus the component assignment (truth index -> computed index).

    When the computed model has more components than the truth, the surplus
    is ignored; with fewer, the unmatched truth components score zero (their
    assignment entry is -1).
    """
    scores, p_t, p_c = _score_matrix(computed, truth, order)
    if matching == GREEDY:
        assign = _greedy_assign(scores)
    elif matching == OPTIMAL:
        rows, cols = linear_sum_assignment(-scores)
        assign = np.full(p_t, -1, dtype=int)
        assign[rows] = cols
    else:
        raise ValueError(f"unknown matching {matching!r}")
    total = sum(scores[i, j] for i, j in enumerate(assign) if 0 <= j)
    assign[assign >= p_c] = -1  # padded columns
    return total / p_t, assign


def typical_symmetric_rank(order: int, dim: int) -> int:
    """Typical symmetric rank over the complex field for order > 2."""
    if order <= 2:
        raise ValueError("typical rank formula requires order > 2")
    value = math.ceil(math.comb(dim + order - 1, order) / dim)
    if (order, dim) in _TYPICAL_RANK_EXCEPTIONS:
        value += 1
    return value


def success_flags(record: RunRecord, thresholds: SuccessThresholds | None = None) -> dict:
    """Per-run success booleans at the standard thresholds."""
    t = thresholds or SuccessThresholds()
    return {
        "relative_error": record.relative_error <= t.relative_error,
        "solution_score": record.solution_score >= t.solution_score,
        "constraint_violation": record.constraint_violation <= t.constraint_violation,
    }
