"""Compiled inner loops of the backward recursion."""

import numba
import numpy as np


@numba.njit(cache=True)
def backward_recursion(values, lo, hi, dt, steps):
    """Apply ``steps`` Euler factors ``I + dt Q`` to ``values`` (top row fixed)."""
    g = values.copy()
    last = g.shape[0] - 1
    for _ in range(steps):
        for x in range(last):
            d = g[x + 1] - g[x]
            rate = lo if d >= 0.0 else hi
            g[x] = g[x] + dt * (rate * d)
    return g


@numba.njit(cache=True)
def backward_recursion_at_base(values, lo, hi, dt, steps):
    """Value at index 0 after ``steps`` factors.

    Step ``i`` only refreshes indices ``< steps - i``: nothing above can reach
    index 0 in the remaining steps, so the work is about ``steps**2 / 2`` when
    the window has ``steps + 1`` states.
    """
    g = values.copy()
    last = g.shape[0] - 1
    for i in range(steps):
        hi_idx = min(last, steps - i)
        for x in range(hi_idx):
            d = g[x + 1] - g[x]
            rate = lo if d >= 0.0 else hi
            g[x] = g[x] + dt * (rate * d)
    return g[0]


def warm_up():
    v = np.zeros(2)
    backward_recursion(v, 0.0, 0.0, 0.0, 1)
    backward_recursion_at_base(v, 0.0, 0.0, 0.0, 1)
