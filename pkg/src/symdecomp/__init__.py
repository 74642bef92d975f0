"""Symmetric tensor decomposition by first-order numerical optimization.

Decompose a real symmetric tensor as a sum of symmetric rank-one terms
(optionally nonnegative), either by direct penalized least squares over the
distinct entries or by ordinary CP-ALS followed by symmetrization, plus a
seeded benchmark harness for recovery experiments.
"""
from ._kernels import BACKEND
from .cpals import (
    AlsConfig,
    cp_als,
    khatri_rao,
    krank,
    minimal_sufficient_krank,
    symmetrize_kruskal,
    unfold,
    uniqueness_sufficient,
)
from .fitting import Formulation, fit_cpals, fit_nonnegative, fit_symmetric
from .kmodel import (
    FactorSet,
    KruskalSymModel,
    contract,
    contract_full,
    model_entry,
    model_to_symtensor,
    normalize_columns,
)
from .metrics import (
    RunRecord,
    SuccessThresholds,
    constraint_violation,
    relative_error,
    solution_score,
    success_flags,
    typical_symmetric_rank,
)
from .objectives import (
    ObjectiveEvaluation,
    PenaltyConfig,
    WeightScheme,
    eval_f1_matrixform,
    eval_fw,
    eval_gamma_penalty,
    eval_l1_penalty,
    eval_nonneg,
    eval_total,
)
from .optim import OptimConfig, OptimResult, minimize, minimize_restarts
from .probgen import (
    InstanceSpec,
    ProblemInstance,
    gen_collinear,
    gen_nonnegative,
    gen_standard,
    gen_starts,
    generate,
)
from .symspace import (
    IndexCatalog,
    SymTensor,
    build_catalog,
    distinct_entry_count,
    index_to_monomial,
    monomial_to_index,
    multiplicity,
    sym_from_dense,
    sym_norm,
    sym_to_dense,
)

__version__ = "0.1.0"
