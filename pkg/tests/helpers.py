"""Random instance generators shared by the property and acceptance tests."""

import numpy as np

from impois import RateInterval, TimeGrid, WindowFunction, from_values


def random_interval(rng, max_rate=3.0):
    lo = float(rng.uniform(0, max_rate))
    return RateInterval(lo, lo + float(rng.uniform(0, max_rate)))


def random_valid_grid(rng, interval, max_steps=40):
    """Uniform grid with dt * ||Q|| <= 1."""
    n = int(rng.integers(1, max_steps + 1))
    t = float(rng.uniform(0, 3))
    hi = interval.upper
    max_dur = n / (2 * hi) if hi > 0 else 3.0
    return TimeGrid(t, t + float(rng.uniform(0.01, 1.0)) * min(3.0, max_dur), n)


def random_window(rng, size=None, scale=1.0, base=None):
    size = size or int(rng.integers(1, 7))
    base = int(rng.integers(0, 6)) if base is None else base
    return WindowFunction(base, rng.uniform(-scale, scale, size=size))


def random_ev_const(rng, max_top=5):
    top = int(rng.integers(1, max_top + 1))
    vals = rng.uniform(-1, 1, size=top)
    return from_values(vals, float(rng.uniform(-1, 1)))


def coherence_violations(phi, interval, grid, g, h, gamma, mu, slack=1e-12):
    """Names of the coherence properties that fail for one instance."""
    from impois import WindowFunction

    bad = []
    Tg = phi(interval, grid, g).values
    Th = phi(interval, grid, h).values
    T_scaled = phi(interval, grid, g.replace(gamma * g.values)).values
    if np.max(np.abs(T_scaled - gamma * Tg)) > slack:
        bad.append("homogeneity")
    T_sum = phi(interval, grid, g.replace(g.values + h.values)).values
    if np.any(T_sum < Tg + Th - slack):
        bad.append("super-additivity")
    if np.any(Tg < g.values.min() - slack) or np.any(Tg > g.values.max() + slack):
        bad.append("bounds")
    T_shift = phi(interval, grid, g.replace(g.values + mu)).values
    if np.max(np.abs(T_shift - (Tg + mu))) > slack:
        bad.append("constant-shift")
    dominating = g.replace(g.values + np.abs(h.values))
    if np.any(phi(interval, grid, dominating).values < Tg - slack):
        bad.append("monotonicity")
    size = len(g)
    for xi in range(size):
        zeroed = g.values.copy()
        zeroed[:xi] = 0.0
        if abs(phi(interval, grid, WindowFunction(g.base, zeroed)).values[xi] - Tg[xi]) > slack:
            bad.append("counting")
            break
    return bad
