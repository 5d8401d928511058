"""Lower and upper expectations of ``f(X_s)`` given ``X_t = x``.

Two sets of processes share the rate interval:

* ``poisson``: Poisson processes with a fixed rate in the interval.  The
  bound is a one-parameter optimisation over the rate.
* ``consistent``: every counting process whose rate stays in the interval.
  The bound comes from the backward recursion in :mod:`impois.semigroup`.

For monotone f both sets give the Poisson expectation at an endpoint rate,
which is used directly unless ``use_monotone=False``.
"""

from __future__ import annotations

import enum
import math
from typing import Callable, Tuple

import numpy as np

from .errors import InvalidParameterError, UnsupportedFunctionError
from .functions import FunctionSpec, Monotonicity
from .generator import RateInterval
from .pois_exact import envelope_tail, poisson_series
from .semigroup import BoundResult, lower_prevision, upper_prevision

DEFAULT_GRID_POINTS = 129
REFINE_WIDTH = 1e-8
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class SetKind(str, enum.Enum):
    POISSON = "poisson"
    CONSISTENT = "consistent"


def expected_count_bounds(interval: RateInterval, t: float, s: float, x: int) -> Tuple[float, float]:
    """Tight bounds on E[X_s | X_t = x]: ``x + lower (s-t)`` and ``x + upper (s-t)``."""
    if not (t <= s):
        raise InvalidParameterError(f"need t <= s, got t={t}, s={s}")
    return x + interval.lower * (s - t), x + interval.upper * (s - t)


def lower_expectation(
    set_kind, interval: RateInterval, t: float, s: float, x: int, f: FunctionSpec, eps: float,
    *, use_monotone: bool = True, grid_points: int = DEFAULT_GRID_POINTS,
) -> BoundResult:
    return _expectation(SetKind(set_kind), interval, t, s, x, f, eps, False, use_monotone, grid_points)


def upper_expectation(
    set_kind, interval: RateInterval, t: float, s: float, x: int, f: FunctionSpec, eps: float,
    *, use_monotone: bool = True, grid_points: int = DEFAULT_GRID_POINTS,
) -> BoundResult:
    return _expectation(SetKind(set_kind), interval, t, s, x, f, eps, True, use_monotone, grid_points)


def expectation_bounds(set_kind, interval, t, s, x, f, eps, **kw) -> BoundResult:
    """Both sides in one result; ``error_bound`` is the larger of the two."""
    lo = lower_expectation(set_kind, interval, t, s, x, f, eps, **kw)
    up = upper_expectation(set_kind, interval, t, s, x, f, eps, **kw)
    tops = [v for v in (lo.truncation_top, up.truncation_top) if v is not None]
    return BoundResult(
        lower=lo.lower,
        upper=up.upper,
        error_bound=max(lo.error_bound, up.error_bound),
        truncation_top=max(tops) if tops else None,
        steps=max(lo.steps, up.steps),
    )


def _endpoint_rate(interval: RateInterval, f: FunctionSpec, upper: bool):
    if f.monotonicity is Monotonicity.NON_DECREASING:
        return interval.upper if upper else interval.lower
    if f.monotonicity is Monotonicity.NON_INCREASING:
        return interval.lower if upper else interval.upper
    return None


def _expectation(set_kind, interval, t, s, x, f, eps, upper, use_monotone, grid_points) -> BoundResult:
    if not (0 <= t <= s) or not math.isfinite(s):
        raise InvalidParameterError(f"need 0 <= t <= s < inf, got t={t}, s={s}")
    if not (eps > 0):
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    if int(x) != x or x < 0:
        raise InvalidParameterError(f"x must be a count, got {x}")
    x = int(x)
    side = "upper" if upper else "lower"
    if t == s:
        return BoundResult(**{side: f(x)}, truncation_top=x)
    rate = _endpoint_rate(interval, f, upper) if use_monotone else None
    if rate is not None:
        series = poisson_series(rate * (s - t), x, f, eps)
        return BoundResult(**{side: series.value}, error_bound=series.error, truncation_top=series.top)
    if set_kind is SetKind.CONSISTENT:
        engine = upper_prevision if upper else lower_prevision
        return engine(interval, t, s, x, f, eps)
    return _optimize_rate(interval, s - t, x, f, eps, upper, grid_points)


def golden_section(objective: Callable[[float], float], a: float, b: float, width: float):
    """Minimise on ``[a, b]`` down to bracket ``width``.

    Returns ``(argmin, minimum, final_width)`` where the minimum is the best
    value actually evaluated, endpoints included.
    """
    best_x, best_f = (a, objective(a))
    fb = objective(b)
    if fb < best_f:
        best_x, best_f = b, fb
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > width:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = objective(d)
    for xv, fv in ((c, fc), (d, fd)):
        if fv < best_f:
            best_x, best_f = xv, fv
    return best_x, best_f, b - a


def _rate_lipschitz(interval: RateInterval, duration: float, x: int, f: FunctionSpec) -> float:
    """Crude bound on |d/dlam E_lam f| = duration |E f(x+Y+1) - E f(x+Y)|."""
    norm = f.sup_norm()
    if norm is not None:
        return 2.0 * duration * norm
    env, low = f.growth_envelope, f.infimum()
    if env is None or low is None:
        raise UnsupportedFunctionError(f"{f.name}: no summability certificate")
    const, b = abs(env.a) + abs(low), env.b
    if env.p == 0:
        const, b = const + b, 0.0
    return 2.0 * duration * envelope_tail(interval.upper * duration, x + 1, 0, const, b, env.p)


def _optimize_rate(interval, duration, x, f, eps, upper, grid_points) -> BoundResult:
    """Coarse rate grid, then golden-section refinement around the best node.

    The rate-to-expectation map need not be unimodal, so this is a heuristic
    for the global optimum; the reported bound covers the series truncation
    and the final bracket width times a Lipschitz constant.
    """
    tol = eps / 2
    sign = -1.0 if upper else 1.0
    side = "upper" if upper else "lower"
    evaluated = {}

    def objective(lam: float) -> float:
        if lam not in evaluated:
            evaluated[lam] = poisson_series(lam * duration, x, f, tol)
        return sign * evaluated[lam].value

    lo, hi = interval.lower, interval.upper
    if interval.is_degenerate:
        best_lam, h = lo, 0.0
    else:
        lams = np.linspace(lo, hi, grid_points)
        scores = [objective(float(lam)) for lam in lams]
        i = int(np.argmin(scores))
        a, b = float(lams[max(i - 1, 0)]), float(lams[min(i + 1, grid_points - 1)])
        best_lam, best_val, h = golden_section(objective, a, b, REFINE_WIDTH * (hi - lo))
        if scores[i] <= best_val:
            best_lam = float(lams[i])
    series = evaluated.get(best_lam) or poisson_series(best_lam * duration, x, f, tol)
    slack = _rate_lipschitz(interval, duration, x, f) * h if h else 0.0
    top = max(sv.top for sv in evaluated.values()) if evaluated else series.top
    return BoundResult(**{side: series.value}, error_bound=series.error + slack, truncation_top=top)
