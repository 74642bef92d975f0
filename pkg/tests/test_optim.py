import numpy as np
import pytest

import symdecomp as sd
from symdecomp.optim import CONVERGED, LINE_SEARCH_FAIL, minimize, minimize_restarts


def quadratic(center):
    def fun(x):
        return 0.5 * float(np.sum((x - center) ** 2)), x - center

    return fun


def rosenbrock(x):
    f = (1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2
    g = np.array([
        -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] ** 2),
        200.0 * (x[1] - x[0] ** 2),
    ])
    return f, g


def test_quadratic_converges_fast():
    center = np.array([3.0, -1.0, 2.5, 0.0])
    for start in (np.zeros(4), np.full(4, 10.0), -np.ones(4)):
        res = minimize(quadratic(center), start)
        assert res.status == CONVERGED
        assert res.iterations <= 50
        assert np.max(np.abs(res.point - center)) <= 1e-8


def test_rosenbrock_classic_start():
    res = minimize(rosenbrock, np.array([-1.2, 1.0]))
    assert res.status == CONVERGED
    assert res.value <= 1e-12
    assert np.max(np.abs(res.point - 1.0)) <= 1e-5


def test_value_monotone_over_iterates():
    # truncated runs expose the accepted-iterate values one by one
    values = [
        minimize(rosenbrock, np.array([-1.2, 1.0]),
                 sd.OptimConfig(max_iterations=k)).value
        for k in range(1, 25)
    ]
    assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))


def test_bounded_active_constraint():
    cfg = sd.OptimConfig(lower_bounds=np.zeros(2))
    res = minimize(lambda x: (float(np.sum((x + 1.0) ** 2)), 2.0 * (x + 1.0)),
                   np.array([2.0, 0.5]), cfg)
    assert res.status == CONVERGED
    assert np.array_equal(res.point, np.zeros(2))  # bound hit exactly


def test_bounded_mixed_activity():
    center = np.array([-1.0, 2.0, 0.5])
    cfg = sd.OptimConfig(lower_bounds=np.zeros(3))
    res = minimize(quadratic(center), np.ones(3), cfg)
    assert res.status == CONVERGED
    assert np.allclose(res.point, [0.0, 2.0, 0.5], atol=1e-8)
    assert np.all(res.point >= 0.0)


def test_bounded_iterates_feasible_exactly():
    lb = np.full(2, 0.25)
    seen = []

    def fun(x):
        seen.append(x.copy())
        return float(np.sum((x - 0.1) ** 2)), 2.0 * (x - 0.1)

    res = minimize(fun, np.array([4.0, 9.0]), sd.OptimConfig(lower_bounds=lb))
    assert res.status == CONVERGED
    for x in seen:
        assert np.all(x >= lb)
    assert np.array_equal(res.point, lb)


def test_nonfinite_start_reports_failure():
    def fun(x):
        return np.nan, np.full_like(x, np.nan)

    res = minimize(fun, np.ones(2))
    assert res.status == LINE_SEARCH_FAIL
    assert res.iterations == 0


def test_nonfinite_region_shrinks_step():
    def fun(x):
        if x[0] > 0.5:
            return np.inf, np.array([np.nan])
        return float((x[0] + 1.0) ** 2), np.array([2.0 * (x[0] + 1.0)])

    res = minimize(fun, np.array([0.4]))
    assert res.status == CONVERGED
    assert res.point[0] == pytest.approx(-1.0, abs=1e-8)


def test_deterministic_sequences():
    a = minimize(rosenbrock, np.array([-1.2, 1.0]))
    b = minimize(rosenbrock, np.array([-1.2, 1.0]))
    assert np.array_equal(a.point, b.point)
    assert a.value == b.value
    assert a.iterations == b.iterations


def test_iteration_limit_status():
    res = minimize(rosenbrock, np.array([-1.2, 1.0]), sd.OptimConfig(max_iterations=3))
    assert res.status == "iter_limit"
    assert res.iterations == 3


def test_restarts_order_and_determinism():
    starts = [np.zeros(2), np.array([5.0, -3.0]), np.array([5.0, -3.0])]
    results = minimize_restarts(quadratic(np.array([1.0, 2.0])), starts)
    assert len(results) == 3
    assert all(r.status == CONVERGED for r in results)
    assert np.array_equal(results[1].point, results[2].point)
    with pytest.raises(ValueError):
        minimize_restarts(quadratic(np.zeros(2)), [])


def test_config_validation():
    with pytest.raises(ValueError):
        sd.OptimConfig(grad_tolerance=0.0)
    with pytest.raises(ValueError):
        sd.OptimConfig(memory=0)
    with pytest.raises(ValueError):
        minimize(quadratic(np.zeros(2)), np.zeros(2),
                 sd.OptimConfig(lower_bounds=np.zeros(3)))
