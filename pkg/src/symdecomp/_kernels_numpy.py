"""Pure-numpy implementations of the hot evaluation kernels.

These are the fallback used when the compiled extension is unavailable.
Both backends must produce identical results; tests compare them directly.
"""
from __future__ import annotations

import numpy as np


def monomial_values(reps: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """Per-class products of factor entries.

    out[i, k] = prod_t factors[reps[i, t], k], i.e. the value of the k-th
    rank-one term at index class i (before weighting).
    """
    return np.prod(factors[reps, :], axis=1)


def all_but_one_scatter(
    reps: np.ndarray, coeff: np.ndarray, factors: np.ndarray
) -> np.ndarray:
    """Scatter-accumulated leave-one-out products.

    out[j, k] = sum_i coeff[i] * sum_{t: reps[i,t]=j} prod_{s != t} factors[reps[i,s], k]

    The inner sum equals c_j * x_jk**(c_j - 1) * prod_{l != j} x_lk**c_l with
    product semantics (a count of 1 contributes the factor 1 even at
    x_jk = 0), which is the building block of both the objective gradients
    and the (m-1)-fold contraction.
    """
    gathered = factors[reps, :]  # (classes, order, rank)
    n_classes, order, rank = gathered.shape
    n = factors.shape[0]

    prefix = np.ones_like(gathered)
    np.cumprod(gathered[:, :-1, :], axis=1, out=prefix[:, 1:, :])
    suffix = np.ones_like(gathered)
    suffix[:, :-1, :] = np.cumprod(gathered[:, :0:-1, :], axis=1)[:, ::-1, :]

    # same multiplication order as the compiled kernel, so results match bitwise
    partials = coeff[:, None, None] * prefix * suffix
    flat_rows = reps.ravel()
    flat = partials.reshape(n_classes * order, rank)
    out = np.empty((n, rank))
    for k in range(rank):
        out[:, k] = np.bincount(flat_rows, weights=flat[:, k], minlength=n)
    return out
