"""Objective and gradient evaluation for symmetric tensor fitting.

Two least-squares formulations over the distinct entries of a symmetric
tensor: the *weighted* one counts each index class by its multiplicity
(equivalent to summing the squared residual over all n**m raw entries),
the *unweighted* one counts each class once.  Custom per-class weights
cover missing data (weight zero drops an entry).

Additional terms:

* a column-norm penalty  gamma * sum_k (x_k'x_k - 1)**2  removing the
  scaling ambiguity of the model, and
* a smooth surrogate for beta*||weights||_1 built from paired softplus
  terms, used for rank determination by sparsifying the weight vector.

Evaluators are pure functions; residuals are reduced in a fixed order so
results are deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .kmodel import KruskalSymModel
from .symspace import IndexCatalog, SymTensor

WEIGHTED = "weighted"
UNWEIGHTED = "unweighted"
CUSTOM = "custom"


@dataclass(frozen=True)
class WeightScheme:
    """Per-class weights: multiplicity-weighted, unit, or an explicit vector."""

    kind: str
    values: np.ndarray | None = None

    @staticmethod
    def weighted() -> "WeightScheme":
        return WeightScheme(WEIGHTED)

    @staticmethod
    def unweighted() -> "WeightScheme":
        return WeightScheme(UNWEIGHTED)

    @staticmethod
    def custom(values) -> "WeightScheme":
        values = np.asarray(values, dtype=np.float64)
        if np.any(values < 0):
            raise ValueError("custom weights must be nonnegative")
        return WeightScheme(CUSTOM, values)

    def vector(self, catalog: IndexCatalog) -> np.ndarray:
        if self.kind == WEIGHTED:
            return catalog.multiplicities.astype(np.float64)
        if self.kind == UNWEIGHTED:
            return np.ones(catalog.size)
        if self.kind == CUSTOM:
            if self.values is None or self.values.shape != (catalog.size,):
                raise ValueError(
                    f"custom weight vector must have length {catalog.size}"
                )
            return self.values
        raise ValueError(f"unknown weight scheme kind {self.kind!r}")


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty weights: `gamma` for column norms, (`alpha`, `beta`) for sparsity."""

    gamma: float = 0.0
    alpha: float = 10.0
    beta: float = 0.0

    def __post_init__(self):
        if self.gamma < 0 or self.beta < 0:
            raise ValueError("gamma and beta must be nonnegative")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass
class ObjectiveEvaluation:
    value: float
    grad_weights: np.ndarray  # (p,)
    grad_factors: np.ndarray  # (n, p)
    residuals: np.ndarray | None = None  # per-class data-minus-model


def _check_shapes(tensor: SymTensor, model: KruskalSymModel) -> None:
    if tensor.dim != model.dim:
        raise ValueError(
            f"tensor dimension {tensor.dim} does not match model dimension {model.dim}"
        )


def eval_fw(
    tensor: SymTensor,
    model: KruskalSymModel,
    scheme: WeightScheme,
    keep_residuals: bool = False,
) -> ObjectiveEvaluation:
    """Weighted least squares over distinct entries, with analytic gradients.

    value = sum_i w_i * (a_i - sum_k weights_k * (x_k^m)_i)**2.  The factor
    gradient follows the product rule per monomial count; a count of 1
    contributes the leave-one-out product even where the factor entry is 0.
    """
    _check_shapes(tensor, model)
    cat = tensor.catalog
    w = scheme.vector(cat)
    rank_one = _kernels.monomial_values(cat.reps, model.factors)
    residuals = tensor.values - rank_one @ model.weights
    weighted = w * residuals
    value = float(residuals @ weighted)
    grad_weights = -2.0 * (rank_one.T @ weighted)
    grad_factors = -2.0 * model.weights * _kernels.all_but_one_scatter(
        cat.reps, weighted, model.factors
    )
    return ObjectiveEvaluation(
        value,
        grad_weights,
        grad_factors,
        residuals if keep_residuals else None,
    )


def eval_f1_matrixform(tensor: SymTensor, model: KruskalSymModel) -> ObjectiveEvaluation:
    """Multiplicity-weighted objective via Gram-matrix identities.

    Value and gradients are assembled from the component contractions
    A x_k^m, A x_k^(m-1) and the pairwise inner products (x_k'x_l)^m, which
    avoids the leave-one-out scatter and pays off for larger dimensions:

        value        = ||A||^2 - 2 sum_k w_k A x_k^m + sum_kl w_k w_l (x_k'x_l)^m
        d/dw_k       = -2 A x_k^m + 2 sum_l w_l (x_k'x_l)^m
        d/dx_k       = -2m w_k A x_k^(m-1) + 2m w_k sum_l w_l (x_k'x_l)^(m-1) x_l

    Agrees with `eval_fw(..., WeightScheme.weighted())`.
    """
    _check_shapes(tensor, model)
    cat = tensor.catalog
    m = cat.order
    lam, X = model.weights, model.factors
    sigma_a = cat.multiplicities * tensor.values

    rank_one = _kernels.monomial_values(cat.reps, X)
    ax_m = rank_one.T @ sigma_a  # (p,) full contractions A x_k^m
    ax_m1 = _kernels.all_but_one_scatter(cat.reps, sigma_a / m, X)  # A x_k^(m-1)

    gram = X.T @ X
    gram_m = gram**m
    norm_sq = float(np.sum(cat.multiplicities * tensor.values**2))
    value = float(norm_sq - 2.0 * (lam @ ax_m) + lam @ gram_m @ lam)

    grad_weights = -2.0 * ax_m + 2.0 * (gram_m @ lam)
    cross = X @ (gram ** (m - 1) * lam[:, None])  # column k: sum_l w_l (x_k'x_l)^(m-1) x_l
    grad_factors = -2.0 * m * lam * ax_m1 + 2.0 * m * lam * cross
    return ObjectiveEvaluation(value, grad_weights, grad_factors)


def eval_gamma_penalty(factors: np.ndarray, gamma: float) -> tuple:
    """Column-norm penalty gamma * sum_k (x_k'x_k - 1)**2 and its gradient."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    factors = np.asarray(factors, dtype=np.float64)
    excess = np.sum(factors**2, axis=0) - 1.0
    value = float(gamma * np.sum(excess**2))
    grad = 4.0 * gamma * excess * factors
    return value, grad


PUBLISHED = "published"
DERIVATIVE = "derivative"


def eval_l1_penalty(
    weights: np.ndarray, alpha: float, beta: float, grad_form: str = PUBLISHED
) -> tuple:
    """Smooth l1 surrogate on the weight vector.

    value = (beta/alpha) * sum_k [softplus(-alpha w_k) + softplus(alpha w_k)],
    which approaches beta*||w||_1 (plus a constant) as alpha grows.  Values
    are computed with log1p-based softplus, so no overflow occurs for
    |alpha*w| up to ~700 and beyond.

    Two gradient forms are available:

    * ``"published"``: beta * [sigmoid(alpha w_k) + sigmoid(-alpha w_k)].
      The two sigmoids sum to one, so this is the constant beta per
      component; it is kept verbatim for reference but is *not* the
      derivative of the value.
    * ``"derivative"``: the actual derivative beta * tanh(alpha w_k / 2),
      which behaves like the l1 subgradient beta*sign(w_k) away from zero.
      This is the form the fitting drivers use.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    weights = np.asarray(weights, dtype=np.float64)
    z = alpha * weights
    value = float(beta / alpha * np.sum(np.logaddexp(0.0, -z) + np.logaddexp(0.0, z)))
    if grad_form == PUBLISHED:
        grad = beta * (_sigmoid(z) + _sigmoid(-z))
    elif grad_form == DERIVATIVE:
        grad = beta * np.tanh(z / 2.0)
    else:
        raise ValueError(f"unknown l1 gradient form {grad_form!r}")
    return value, grad


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def eval_total(
    tensor: SymTensor,
    model: KruskalSymModel,
    scheme: WeightScheme,
    penalties: PenaltyConfig,
    matrix_form: bool = False,
    l1_grad_form: str = DERIVATIVE,
    keep_residuals: bool = False,
) -> ObjectiveEvaluation:
    """Fit term plus penalties, with summed gradients.

    `matrix_form` selects the Gram-matrix gradient path and requires the
    multiplicity-weighted scheme.
    """
    if matrix_form:
        if scheme.kind != WEIGHTED:
            raise ValueError("matrix form is only defined for the weighted scheme")
        ev = eval_f1_matrixform(tensor, model)
    else:
        ev = eval_fw(tensor, model, scheme, keep_residuals=keep_residuals)
    if penalties.gamma > 0:
        pv, pg = eval_gamma_penalty(model.factors, penalties.gamma)
        ev.value += pv
        ev.grad_factors = ev.grad_factors + pg
    if penalties.beta > 0:
        lv, lg = eval_l1_penalty(
            model.weights, penalties.alpha, penalties.beta, grad_form=l1_grad_form
        )
        ev.value += lv
        ev.grad_weights = ev.grad_weights + lg
    return ev


def eval_nonneg(
    tensor: SymTensor, factors: np.ndarray, scheme: WeightScheme
) -> tuple:
    """Unit-weight fit term for the nonnegative problem (no weight vector).

    value = sum_i w_i * (a_i - sum_k (x_k^m)_i)**2 with gradient over the
    factor matrix only.  Feasibility (factors >= 0) is the optimizer's job,
    not the evaluator's.
    """
    factors = np.asarray(factors, dtype=np.float64)
    if factors.ndim != 2 or factors.shape[0] != tensor.dim:
        raise ValueError("factor matrix does not match tensor dimension")
    cat = tensor.catalog
    w = scheme.vector(cat)
    rank_one = _kernels.monomial_values(cat.reps, factors)
    residuals = tensor.values - rank_one.sum(axis=1)
    weighted = w * residuals
    value = float(residuals @ weighted)
    grad = -2.0 * _kernels.all_but_one_scatter(cat.reps, weighted, factors)
    return value, grad


def pack_parameters(weights: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """Serialize (weights, factors) as [weights; factors column-major]."""
    return np.concatenate([np.ravel(weights), np.ravel(factors, order="F")])


def unpack_parameters(vec: np.ndarray, dim: int, rank: int) -> tuple:
    """Inverse of `pack_parameters`."""
    vec = np.asarray(vec, dtype=np.float64)
    if vec.size != rank + dim * rank:
        raise ValueError("parameter vector has the wrong length")
    weights = vec[:rank].copy()
    factors = vec[rank:].reshape((dim, rank), order="F").copy()
    return weights, factors
