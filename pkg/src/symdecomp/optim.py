"""First-order minimizers for smooth problems with optional lower bounds.

`minimize` runs limited-memory BFGS with a strong-Wolfe line search; when
lower bounds are supplied it switches to projected backtracking with
quasi-Newton scaling on the free variables, so every iterate satisfies the
bounds exactly.  Both paths are deterministic: identical inputs produce
bit-identical iterate sequences.

Non-finite objective values encountered during a line search shrink the
step instead of aborting; a start point where the objective itself is
non-finite yields a `line_search_fail` result rather than an exception.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

CONVERGED = "converged"
ITER_LIMIT = "iter_limit"
LINE_SEARCH_FAIL = "line_search_fail"

_C1 = 1e-4  # sufficient decrease
_C2 = 0.9  # curvature (unbounded path only)
_CURVATURE_SKIP = 1e-10


@dataclass(frozen=True)
class OptimConfig:
    max_iterations: int = 10000
    grad_tolerance: float = 1e-8
    step_tolerance: float = 1e-12
    memory: int = 10
    max_line_search: int = 40
    lower_bounds: np.ndarray | None = None

    def __post_init__(self):
        if self.grad_tolerance <= 0 or self.step_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.memory < 1:
            raise ValueError("memory must be >= 1")


@dataclass
class OptimResult:
    point: np.ndarray
    value: float
    grad_norm: float  # projected-gradient norm when bounds are active
    iterations: int
    status: str
    wall_time: float
    message: str = ""


def _finite(value, grad) -> bool:
    return np.isfinite(value) and bool(np.all(np.isfinite(grad)))


class _LbfgsMemory:
    def __init__(self, capacity: int):
        self.capacity = capacity
        self.pairs: list = []

    def clear(self):
        self.pairs.clear()

    def push(self, s: np.ndarray, y: np.ndarray):
        sy = float(s @ y)
        if sy <= _CURVATURE_SKIP * np.linalg.norm(s) * np.linalg.norm(y):
            return
        self.pairs.append((s, y, 1.0 / sy))
        if len(self.pairs) > self.capacity:
            self.pairs.pop(0)

    def direction(self, grad: np.ndarray) -> np.ndarray:
        """Two-loop recursion applied to -grad."""
        q = grad.copy()
        alphas = []
        for s, y, rho in reversed(self.pairs):
            a = rho * (s @ q)
            alphas.append(a)
            q -= a * y
        if self.pairs:
            s, y, _ = self.pairs[-1]
            q *= (s @ y) / (y @ y)
        for (s, y, rho), a in zip(self.pairs, reversed(alphas)):
            b = rho * (y @ q)
            q += (a - b) * s
        return -q


def _initial_step(iteration: int, memory: _LbfgsMemory, grad: np.ndarray) -> float:
    if iteration > 0 and memory.pairs:
        return 1.0
    return min(1.0, 1.0 / (1.0 + float(np.sum(np.abs(grad)))))


def _strong_wolfe(fun, x, f0, g0, d, alpha0, budget):
    """Bracket-and-zoom search for the strong Wolfe conditions.

    Returns (alpha, f, g, evals) or None when the budget is exhausted.
    Non-finite trial values shrink the step toward the last good point.
    """
    dphi0 = float(g0 @ d)
    evals = 0
    prev_alpha, prev_f, prev_dphi = 0.0, f0, dphi0
    alpha = alpha0
    max_expand_alpha = 1e20

    def zoom(lo, f_lo, dphi_lo, hi, f_hi, evals):
        while evals < budget:
            span = hi - lo
            denom = f_hi - f_lo - dphi_lo * span
            if np.isfinite(denom) and abs(denom) > 1e-300:
                trial = lo - 0.5 * dphi_lo * span * span / denom
            else:
                trial = lo + 0.5 * span
            low, high = (lo, hi) if lo < hi else (hi, lo)
            margin = 0.1 * (high - low)
            if not np.isfinite(trial) or trial < low + margin or trial > high - margin:
                trial = lo + 0.5 * span
            f_t, g_t = fun(x + trial * d)
            evals += 1
            if not _finite(f_t, g_t) or f_t > f0 + _C1 * trial * dphi0 or f_t >= f_lo:
                hi, f_hi = trial, f_t if np.isfinite(f_t) else np.inf
            else:
                dphi_t = float(g_t @ d)
                if abs(dphi_t) <= -_C2 * dphi0:
                    return trial, f_t, g_t, evals
                if dphi_t * (hi - lo) >= 0:
                    hi, f_hi = lo, f_lo
                lo, f_lo, dphi_lo = trial, f_t, dphi_t
            if abs(hi - lo) * max(1.0, abs(lo)) < 1e-18:
                return None
        return None

    first = True
    while evals < budget:
        f_a, g_a = fun(x + alpha * d)
        evals += 1
        if not _finite(f_a, g_a):
            alpha = prev_alpha + 0.5 * (alpha - prev_alpha)
            continue
        if f_a > f0 + _C1 * alpha * dphi0 or (not first and f_a >= prev_f):
            return zoom(prev_alpha, prev_f, prev_dphi, alpha, f_a, evals)
        dphi_a = float(g_a @ d)
        if abs(dphi_a) <= -_C2 * dphi0:
            return alpha, f_a, g_a, evals
        if dphi_a >= 0:
            return zoom(alpha, f_a, dphi_a, prev_alpha, prev_f, evals)
        prev_alpha, prev_f, prev_dphi = alpha, f_a, dphi_a
        alpha = min(2.0 * alpha, max_expand_alpha)
        first = False
    return None


def minimize(fun, x0, config: OptimConfig | None = None) -> OptimResult:
    """Minimize `fun` (returning (value, gradient)) from `x0`.

    Convergence means the max-norm of the gradient -- the projected
    gradient `x - P(x - g)` when bounds are active -- is at or below
    `grad_tolerance`.  The objective is nonincreasing across accepted
    iterates.
    """
    cfg = config or OptimConfig()
    x = np.array(x0, dtype=np.float64).reshape(-1)
    if cfg.lower_bounds is not None:
        lb = np.asarray(cfg.lower_bounds, dtype=np.float64).reshape(-1)
        if lb.shape != x.shape:
            raise ValueError("lower_bounds length does not match x0")
        return _minimize_bounded(fun, x, lb, cfg)
    return _minimize_unbounded(fun, x, cfg)


def _minimize_unbounded(fun, x, cfg: OptimConfig) -> OptimResult:
    start = time.perf_counter()
    f, g = fun(x)
    if not _finite(f, g):
        return OptimResult(
            x, float(f), np.inf, 0, LINE_SEARCH_FAIL, time.perf_counter() - start,
            "objective non-finite at the start point",
        )
    memory = _LbfgsMemory(cfg.memory)
    status, message = ITER_LIMIT, ""
    iterations = 0
    for iteration in range(cfg.max_iterations):
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        if gnorm <= cfg.grad_tolerance:
            status = CONVERGED
            break
        d = memory.direction(g)
        if float(g @ d) >= 0:
            memory.clear()
            d = -g
        alpha0 = _initial_step(iteration, memory, g)
        found = _strong_wolfe(fun, x, f, g, d, alpha0, cfg.max_line_search)
        if found is None and memory.pairs:
            # retry once along steepest descent before giving up
            memory.clear()
            found = _strong_wolfe(fun, x, f, g, -g, _initial_step(0, memory, g),
                                  cfg.max_line_search)
        if found is None:
            status, message = LINE_SEARCH_FAIL, "no acceptable step"
            break
        alpha, f_new, g_new, _ = found
        s = alpha * d
        memory.push(s, g_new - g)
        x = x + s
        f, g = f_new, g_new
        iterations = iteration + 1
        if float(np.max(np.abs(s))) <= cfg.step_tolerance * (1.0 + float(np.max(np.abs(x)))):
            gnorm = float(np.max(np.abs(g)))
            if gnorm <= cfg.grad_tolerance:
                status = CONVERGED
            else:
                status, message = LINE_SEARCH_FAIL, "step size underflow"
            break
    gnorm = float(np.max(np.abs(g)))
    return OptimResult(x, float(f), gnorm, iterations, status,
                       time.perf_counter() - start, message)


def _minimize_bounded(fun, x, lb, cfg: OptimConfig) -> OptimResult:
    start = time.perf_counter()
    x = np.maximum(x, lb)
    f, g = fun(x)
    if not _finite(f, g):
        return OptimResult(
            x, float(f), np.inf, 0, LINE_SEARCH_FAIL, time.perf_counter() - start,
            "objective non-finite at the start point",
        )
    memory = _LbfgsMemory(cfg.memory)
    status, message = ITER_LIMIT, ""
    iterations = 0

    def projected_grad_norm(x, g):
        return float(np.max(np.abs(x - np.maximum(x - g, lb)))) if x.size else 0.0

    for iteration in range(cfg.max_iterations):
        pgnorm = projected_grad_norm(x, g)
        if pgnorm <= cfg.grad_tolerance:
            status = CONVERGED
            break
        free = (x > lb) | (g < 0)
        gf = np.where(free, g, 0.0)
        d = memory.direction(gf)
        d[~free] = 0.0
        if float(gf @ d) >= 0:
            memory.clear()
            d = -gf
        alpha = _initial_step(iteration, memory, gf)
        accepted = None
        for _ in range(cfg.max_line_search):
            x_try = np.maximum(x + alpha * d, lb)
            f_try, g_try = fun(x_try)
            if _finite(f_try, g_try):
                decrease = float(g @ (x_try - x))
                if f_try <= f + _C1 * decrease and decrease < 0:
                    accepted = (x_try, f_try, g_try)
                    break
            alpha *= 0.5
        if accepted is None:
            status, message = LINE_SEARCH_FAIL, "no acceptable projected step"
            break
        x_new, f_new, g_new = accepted
        memory.push(x_new - x, g_new - g)
        step = float(np.max(np.abs(x_new - x)))
        x, f, g = x_new, f_new, g_new
        iterations = iteration + 1
        if step <= cfg.step_tolerance * (1.0 + float(np.max(np.abs(x)))):
            if projected_grad_norm(x, g) <= cfg.grad_tolerance:
                status = CONVERGED
            else:
                status, message = LINE_SEARCH_FAIL, "step size underflow"
            break
    return OptimResult(x, float(f), projected_grad_norm(x, g), iterations, status,
                       time.perf_counter() - start, message)


def minimize_restarts(fun, starts, config: OptimConfig | None = None) -> list:
    """Run `minimize` from each start in order; one result per start."""
    starts = list(starts)
    if not starts:
        raise ValueError("at least one start point is required")
    return [minimize(fun, x0, config) for x0 in starts]
