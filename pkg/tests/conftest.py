import numpy as np
import pytest

import symdecomp as sd


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture(scope="session")
def cat32():
    return sd.build_catalog(3, 2)


def fd_gradient(fun, theta, step=1e-5):
    """Central finite differences, step scaled per coordinate."""
    grad = np.empty_like(theta)
    for i in range(theta.size):
        h = step * (1.0 + abs(theta[i]))
        tp = theta.copy()
        tm = theta.copy()
        tp[i] += h
        tm[i] -= h
        grad[i] = (fun(tp) - fun(tm)) / (2.0 * h)
    return grad


def fd_relative_error(value_fun, grad_analytic, theta):
    fd = fd_gradient(value_fun, theta)
    denom = max(np.max(np.abs(fd)), np.max(np.abs(grad_analytic)), 1e-12)
    return np.max(np.abs(grad_analytic - fd)) / denom
