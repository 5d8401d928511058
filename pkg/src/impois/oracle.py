"""Brute-force references for the test suite and ``impois oracle-check``.

Soundness of the endpoint enumeration: at every step each row of
``(I + dt Q_sel) g`` is affine in its own rate, so no interior rate can do
better than ``lower`` or ``upper``.  With ``dt * upper <= 1`` every factor is
monotone, hence the componentwise minimum over all per-step, per-state
endpoint sequences equals the backward recursion that minimises greedily.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import OracleBudgetError, StepTooLargeError
from .generator import RateInterval, WindowFunction, operator_norm
from .semigroup import TimeGrid, phi_apply


@dataclass(frozen=True)
class OracleBudget:
    max_window: int = 5
    max_steps: int = 4

    def __post_init__(self):
        if self.max_window > 5 or self.max_steps > 4:
            raise OracleBudgetError("oracle budget is capped at window 5 and 4 steps")
        if (self.max_window - 1) * self.max_steps > 16:
            raise OracleBudgetError("enumeration would exceed 2**16 rate sequences")


def brute_force_phi(interval: RateInterval, grid, g: WindowFunction, budget: OracleBudget = OracleBudget()):
    size, n = len(g), grid.steps
    if size > budget.max_window or n > budget.max_steps:
        raise OracleBudgetError(
            f"window {size} / steps {n} exceed budget {budget.max_window} / {budget.max_steps}"
        )
    if grid.granularity * operator_norm(interval) > 2.0:
        raise StepTooLargeError("grid is not step-valid")
    if n == 0 or size == 1:
        return g
    dt = grid.granularity
    ends = sorted({interval.lower, interval.upper})
    rates = np.array(list(itertools.product(ends, repeat=size - 1)))  # (S, size-1)
    products = g.values[None, :]
    # every row of `products` is one full sequence of per-step selections
    for _ in range(n):
        diff = products[:, 1:] - products[:, :-1]
        moved = products[:, None, :-1] + dt * (rates[None, :, :] * diff[:, None, :])
        top = np.broadcast_to(products[:, None, -1:], moved.shape[:2] + (1,))
        products = np.concatenate([moved, top], axis=2).reshape(-1, size)
    best = products.min(axis=0)
    return g.replace(best)


def series_expectation_oracle(rate: float, t: float, s: float, x: int, f, terms: int) -> float:
    """First ``terms`` terms of sum_k f(x+k) psi(k), Neumaier-summed, with
    the pmf built by the ratio recurrence psi(k) = psi(k-1) * mean / k."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    mean = rate * (s - t)
    total, comp = 0.0, 0.0
    log_p = -mean
    for k in range(terms):
        if k > 0:
            if mean == 0:
                break
            log_p += math.log(mean) - math.log(k)
        term = f(x + k) * math.exp(log_p)
        tmp = total + term
        if abs(total) >= abs(term):
            comp += (total - tmp) + term
        else:
            comp += (term - tmp) + total
        total = tmp
    return total + comp


def random_instance(rng: np.random.Generator, max_window: int = 4, max_steps: int = 3):
    """A random in-budget (interval, grid, window) triple."""
    lo = float(rng.uniform(0.0, 3.0))
    hi = lo + float(rng.choice([0.0, rng.uniform(0.0, 3.0)], p=[0.1, 0.9]))
    interval = RateInterval(lo, hi)
    size = int(rng.integers(1, max_window + 1))
    n = int(rng.integers(1, max_steps + 1))
    base = int(rng.integers(0, 5))
    t = float(rng.uniform(0.0, 2.0))
    # keep dt * 2 * hi <= 2
    max_dur = 0.999 * n / hi if hi > 0 else 2.0
    dur = float(rng.uniform(0.0, min(2.0, max_dur)))
    grid = TimeGrid(t, t + dur, n) if dur > 0 else TimeGrid(t, t, 0)
    g = WindowFunction(base, rng.normal(size=size) * float(rng.uniform(0.1, 10.0)))
    return interval, grid, g


def run_oracle_check(cases: int, seed: int, engine=None, tol: float = 1e-12):
    """Compare ``engine`` (default ``phi_apply``) with :func:`brute_force_phi`
    on random instances; returns the list of failing instances."""
    engine = engine or phi_apply
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(cases):
        interval, grid, g = random_instance(rng)
        fast = engine(interval, grid, g).values
        slow = brute_force_phi(interval, grid, g).values
        gap = float(np.max(np.abs(fast - slow)))
        if not gap <= tol:
            failures.append(dict(case=i, interval=interval, grid=grid, g=g, gap=gap))
    return failures
