"""Drivers that run one decomposition: symmetric optimization, bound-
constrained nonnegative optimization, or CP-ALS plus symmetrization.

A `Formulation` bundles the experiment knobs (weighting, penalties,
pathway).  The weighted objective is optimized with the Gram-matrix
gradient path, the unweighted one with the per-class gradients; the
sparsity penalty contributes its actual derivative to the gradient.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from . import metrics
from .cpals import AlsConfig, cp_als, khatri_rao, symmetrize_kruskal
from .kmodel import FactorSet, KruskalSymModel
from .objectives import (
    DERIVATIVE,
    PenaltyConfig,
    WeightScheme,
    eval_nonneg,
    eval_total,
    pack_parameters,
    unpack_parameters,
)
from .optim import CONVERGED, ITER_LIMIT, OptimConfig, minimize
from .symspace import SymTensor, sym_to_dense

SYM = "sym"
CPALS = "cpals"


@dataclass(frozen=True)
class Formulation:
    weighted: bool = False
    gamma: float = 0.1
    alpha: float = 10.0
    beta: float = 0.0
    nonnegative: bool = False
    pathway: str = SYM
    name: str = ""

    def __post_init__(self):
        if self.pathway not in (SYM, CPALS):
            raise ValueError(f"unknown pathway {self.pathway!r}")
        if not self.name:
            object.__setattr__(self, "name", self._default_name())

    def _default_name(self) -> str:
        if self.pathway == CPALS:
            return "cpals"
        parts = ["nonneg" if self.nonnegative else ("f1" if self.weighted else "f2")]
        if not self.nonnegative:
            parts.append(f"g{self.gamma:g}")
        if self.beta > 0:
            parts.append(f"b{self.beta:g}")
        return "-".join(parts)

    def scheme(self) -> WeightScheme:
        return WeightScheme.weighted() if self.weighted else WeightScheme.unweighted()

    def penalties(self) -> PenaltyConfig:
        return PenaltyConfig(gamma=self.gamma, alpha=self.alpha, beta=self.beta)


def fit_symmetric(
    tensor: SymTensor,
    start,
    formulation: Formulation,
    config: OptimConfig | None = None,
) -> tuple:
    """Minimize the penalized fit from one (weights0, factors0) start.

    Returns (model, OptimResult).
    """
    weights0, factors0 = start
    n, p = factors0.shape
    scheme = formulation.scheme()
    penalties = formulation.penalties()
    matrix_form = formulation.weighted

    def objective(vec):
        weights, factors = unpack_parameters(vec, n, p)
        model = KruskalSymModel(weights, factors)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            ev = eval_total(
                tensor, model, scheme, penalties,
                matrix_form=matrix_form, l1_grad_form=DERIVATIVE,
            )
        return ev.value, pack_parameters(ev.grad_weights, ev.grad_factors)

    x0 = pack_parameters(np.asarray(weights0, dtype=np.float64), factors0)
    result = minimize(objective, x0, config)
    weights, factors = unpack_parameters(result.point, n, p)
    return KruskalSymModel(weights, factors), result


def fit_nonnegative(
    tensor: SymTensor,
    factors0: np.ndarray,
    formulation: Formulation,
    config: OptimConfig | None = None,
) -> tuple:
    """Bound-constrained fit with implicit unit weights; factors stay >= 0.

    Returns (model, OptimResult); the model carries all-ones weights.
    """
    factors0 = np.asarray(factors0, dtype=np.float64)
    n, p = factors0.shape
    scheme = formulation.scheme()

    def objective(vec):
        factors = vec.reshape((n, p), order="F")
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            value, grad = eval_nonneg(tensor, factors, scheme)
        return value, grad.ravel(order="F")

    cfg = config or OptimConfig()
    cfg = replace(cfg, lower_bounds=np.zeros(n * p))
    result = minimize(objective, factors0.ravel(order="F"), cfg)
    factors = result.point.reshape((n, p), order="F")
    return KruskalSymModel(np.ones(p), factors), result


def factorset_to_dense(fs: FactorSet) -> np.ndarray:
    """Dense reconstruction of a CP factor set."""
    rest = khatri_rao(fs.factors[1:])
    mat = fs.factors[0] @ rest.T
    return mat.reshape((fs.dim,) * fs.order)


def fit_cpals(
    tensor: SymTensor,
    start,
    config: AlsConfig | None = None,
    dense: np.ndarray | None = None,
) -> tuple:
    """CP-ALS on the dense expansion, then symmetrize.

    The start's factor matrix seeds every mode (start weights, if any, are
    absorbed into the first mode).  Pass `dense` to reuse a precomputed
    expansion across several starts.  Returns (model, factor_set, AlsInfo).
    """
    weights0, factors0 = start
    mats = [np.array(factors0, dtype=np.float64) for _ in range(tensor.order)]
    if weights0 is not None:
        mats[0] = mats[0] * np.asarray(weights0, dtype=np.float64)
    if dense is None:
        dense = sym_to_dense(tensor)
    fs, info = cp_als(dense, factors0.shape[1], FactorSet(tuple(mats)), config)
    return symmetrize_kruskal(fs), fs, info


def run_one(
    instance,
    start,
    start_index: int,
    formulation: Formulation,
    instance_label: str,
    opt_config: OptimConfig | None = None,
    als_config: AlsConfig | None = None,
    matching: str = metrics.GREEDY,
    dense: np.ndarray | None = None,
) -> tuple:
    """Run one (instance, start, formulation) and score it against the truth.

    Returns (model, RunRecord).  `dense` is an optional precomputed dense
    expansion of the instance data, reused by the CP-ALS pathway.
    """
    tensor = instance.data
    began = time.perf_counter()
    if formulation.pathway == CPALS:
        model, _, info = fit_cpals(tensor, start, als_config, dense=dense)
        status = CONVERGED if info.sweeps < (als_config or AlsConfig()).max_sweeps else ITER_LIMIT
    elif formulation.nonnegative:
        model, result = fit_nonnegative(tensor, start[1], formulation, opt_config)
        status = result.status
    else:
        model, result = fit_symmetric(tensor, start, formulation, opt_config)
        status = result.status
    runtime = time.perf_counter() - began

    score, _ = metrics.solution_score(model, instance.truth, tensor.order, matching)
    record = metrics.RunRecord(
        instance=instance_label,
        start_index=start_index,
        relative_error=metrics.relative_error(tensor, model),
        solution_score=score,
        constraint_violation=metrics.constraint_violation(model.factors),
        runtime=runtime,
        status=status,
    )
    return model, record
