"""Backend dispatch for the evaluation kernels.

The compiled extension (`symdecomp._core`) is preferred when importable;
otherwise the numpy implementation is used.  Set SYMDECOMP_FORCE_PYTHON=1
to force the fallback.  `BACKEND` records which one is active.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_numpy

_IMPLS = {"numpy": _kernels_numpy}
try:
    from . import _core

    _IMPLS["cython"] = _core
except ImportError:
    _core = None

if os.environ.get("SYMDECOMP_FORCE_PYTHON"):
    BACKEND = "numpy"
else:
    BACKEND = "cython" if _core is not None else "numpy"


def available_backends() -> tuple:
    return tuple(sorted(_IMPLS))


def get_impl(name: str | None = None):
    return _IMPLS[name or BACKEND]


def _clean(reps, coeff, factors):
    reps = np.ascontiguousarray(reps, dtype=np.intp)
    factors = np.ascontiguousarray(factors, dtype=np.float64)
    if coeff is not None:
        coeff = np.ascontiguousarray(coeff, dtype=np.float64)
    return reps, coeff, factors


def monomial_values(reps, factors, impl: str | None = None) -> np.ndarray:
    reps, _, factors = _clean(reps, None, factors)
    return get_impl(impl).monomial_values(reps, factors)


def all_but_one_scatter(reps, coeff, factors, impl: str | None = None) -> np.ndarray:
    reps, coeff, factors = _clean(reps, coeff, factors)
    return get_impl(impl).all_but_one_scatter(reps, coeff, factors)
