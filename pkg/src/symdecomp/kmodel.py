"""Symmetric Kruskal models and tensor contractions.

A symmetric Kruskal model is a weight vector and a factor matrix whose
columns generate the rank-one terms: the modeled tensor is
sum_k weights[k] * factors[:, k]^(outer power m).  The nonsymmetric
counterpart (one factor matrix per mode) lives in `FactorSet`.

Models are value types; every operation here is pure and safe to call
concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .symspace import IndexCatalog, SymTensor

_NORMALIZED_TOL = 1e-10
_MIN_COLUMN_NORM = 1e-300


@dataclass(frozen=True)
class KruskalSymModel:
    """Weights and factor columns of a symmetric rank-p model.

    `normalized=True` asserts unit-norm columns (checked to 1e-10); use
    `normalize_columns` to produce one.
    """

    weights: np.ndarray  # (p,)
    factors: np.ndarray  # (n, p), column k is the k-th component vector
    normalized: bool = False

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64).reshape(-1)
        factors = np.array(self.factors, dtype=np.float64)
        if factors.ndim != 2:
            raise ValueError("factors must be a matrix")
        if weights.size < 1:
            raise ValueError("model needs at least one component")
        if factors.shape[1] != weights.size:
            raise ValueError(
                f"weights ({weights.size}) and factor columns "
                f"({factors.shape[1]}) disagree"
            )
        if self.normalized:
            norms = np.linalg.norm(factors, axis=0)
            if np.any(np.abs(norms - 1.0) > _NORMALIZED_TOL):
                raise ValueError("normalized flag set but columns are not unit-norm")
        weights.setflags(write=False)
        factors.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "factors", factors)

    @property
    def dim(self) -> int:
        return self.factors.shape[0]

    @property
    def rank(self) -> int:
        return self.factors.shape[1]


@dataclass(frozen=True)
class FactorSet:
    """One factor matrix per mode for the nonsymmetric pathway."""

    factors: tuple

    def __post_init__(self):
        mats = tuple(np.array(f, dtype=np.float64) for f in self.factors)
        if len(mats) < 2:
            raise ValueError("a factor set needs at least two modes")
        shape = mats[0].shape
        if any(f.shape != shape for f in mats):
            raise ValueError("all factor matrices must share the same shape")
        if len(shape) != 2:
            raise ValueError("factor matrices must be 2-d")
        for f in mats:
            f.setflags(write=False)
        object.__setattr__(self, "factors", mats)

    @property
    def order(self) -> int:
        return len(self.factors)

    @property
    def dim(self) -> int:
        return self.factors[0].shape[0]

    @property
    def rank(self) -> int:
        return self.factors[0].shape[1]


def model_entry(model: KruskalSymModel, counts) -> float:
    """Model value at the entry with monomial representation `counts`."""
    counts = np.asarray(counts, dtype=np.intp)
    if counts.size != model.dim:
        raise ValueError("monomial length does not match model dimension")
    terms = np.prod(model.factors ** counts[:, None], axis=0)
    return float(model.weights @ terms)


def model_to_symtensor(model: KruskalSymModel, catalog: IndexCatalog) -> SymTensor:
    """Evaluate the model at every index class of `catalog`."""
    if catalog.dim != model.dim:
        raise ValueError(
            f"catalog dimension {catalog.dim} does not match model dimension {model.dim}"
        )
    rank_one = _kernels.monomial_values(catalog.reps, model.factors)
    return SymTensor(catalog, rank_one @ model.weights)


def contract(tensor: SymTensor, x: np.ndarray) -> np.ndarray:
    """Contract the tensor with x in all modes but one.

    Component j is sum over the remaining indices of
    a[j, i_2, ..., i_m] * x[i_2] * ... * x[i_m], computed from distinct
    entries: each class with counts c contributes through
    sigma * c_j / m permutations that put axis value j first.
    For m = 2 this is the matrix-vector product.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != tensor.dim:
        raise ValueError("vector length does not match tensor dimension")
    cat = tensor.catalog
    coeff = cat.multiplicities * tensor.values / cat.order
    return _kernels.all_but_one_scatter(cat.reps, coeff, x[:, None]).ravel()


def contract_full(tensor: SymTensor, x: np.ndarray) -> float:
    """Full contraction sum_i a_i x_{i_1} ... x_{i_m} (= x . contract(tensor, x))."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != tensor.dim:
        raise ValueError("vector length does not match tensor dimension")
    cat = tensor.catalog
    powers = _kernels.monomial_values(cat.reps, x[:, None]).ravel()
    return float(np.sum(cat.multiplicities * tensor.values * powers))


def normalize_columns(model: KruskalSymModel, order: int) -> KruskalSymModel:
    """Rescale so every column has unit norm, preserving the modeled tensor.

    The k-th weight absorbs ||x_k||**order, which leaves each rank-one term
    unchanged.  `order` is the tensor order the model is used at.
    """
    norms = np.linalg.norm(model.factors, axis=0)
    if np.any(norms < _MIN_COLUMN_NORM):
        bad = int(np.argmin(norms))
        raise ValueError(f"cannot normalize zero column {bad}")
    return KruskalSymModel(
        model.weights * norms**order, model.factors / norms, normalized=True
    )
