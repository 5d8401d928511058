"""Backward recursion for the lower transition operator.

``phi_apply`` evaluates ``prod_i (I + dt Q) g`` on a finite window, rightmost
factor first.  On a uniform grid with ``n`` steps over ``[t, s]`` the
distance to the exact lower transition operator is at most

    ((s - t) / n) * (s - t) * (2 * upper)**2 * ||g||

which is what :func:`choose_grid` inverts.  The ``lower_prevision_*``
functions turn a :class:`~impois.functions.FunctionSpec` into a window, run
the recursion and report the value together with that a-priori bound.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import (
    InvalidParameterError,
    StepTooLargeError,
    ToleranceError,
    UnsupportedFunctionError,
)
from .functions import FunctionSpec
from .generator import RateInterval, WindowFunction, operator_norm
from .pois_exact import envelope_tail

DEFAULT_MAX_STEPS = 10**8
GROWTH_FIRST_WIDTH = 16
GROWTH_MAX_WIDTH = 2**20


def max_steps() -> int:
    """Grid-size cap; ``IMPOIS_MAX_STEPS`` overrides the default of 10**8."""
    raw = os.environ.get("IMPOIS_MAX_STEPS")
    if raw is None:
        return DEFAULT_MAX_STEPS
    try:
        cap = int(float(raw))
    except ValueError:
        raise InvalidParameterError(f"IMPOIS_MAX_STEPS={raw!r} is not an integer") from None
    if cap < 1:
        raise InvalidParameterError("IMPOIS_MAX_STEPS must be positive")
    return cap


@dataclass(frozen=True)
class TimeGrid:
    """Uniform partition of ``[start, end]`` into ``steps`` pieces."""

    start: float
    end: float
    steps: int

    def __post_init__(self):
        if not (0 <= self.start <= self.end) or not math.isfinite(self.end):
            raise InvalidParameterError(f"need 0 <= start <= end < inf, got [{self.start}, {self.end}]")
        if self.start == self.end:
            object.__setattr__(self, "steps", 0)
        elif int(self.steps) != self.steps or self.steps < 1:
            raise InvalidParameterError("a non-trivial grid needs at least one step")
        else:
            object.__setattr__(self, "steps", int(self.steps))

    @property
    def duration(self) -> float:
        return self.end - self.start

    @property
    def granularity(self) -> float:
        return self.duration / self.steps if self.steps else 0.0

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.end, self.steps + 1)

    def is_step_valid(self, interval: RateInterval) -> bool:
        return self.granularity * operator_norm(interval) <= 2.0


@dataclass(frozen=True)
class ApproxResult:
    values: WindowFunction
    a_priori_error: float
    grid: TimeGrid
    window: tuple  # (base, top)


@dataclass(frozen=True)
class BoundResult:
    """A lower and/or upper value, each within ``error_bound`` of the truth."""

    lower: Optional[float] = None
    upper: Optional[float] = None
    error_bound: float = 0.0
    truncation_top: Optional[int] = None
    steps: int = 0

    @property
    def value(self) -> float:
        if (self.lower is None) == (self.upper is None):
            raise AttributeError("value is only defined for one-sided results")
        return self.lower if self.lower is not None else self.upper

    def conjugate(self) -> "BoundResult":
        """Map a result for ``-f`` to the opposite side for ``f``."""
        neg = lambda v: None if v is None else -v  # noqa: E731
        return BoundResult(neg(self.upper), neg(self.lower), self.error_bound, self.truncation_top, self.steps)


def grid_error(interval: RateInterval, grid: TimeGrid, g_norm: float) -> float:
    norm = operator_norm(interval)
    return grid.granularity * grid.duration * norm * norm * g_norm


def _check_times(t: float, s: float):
    if not (0 <= t <= s) or not math.isfinite(s):
        raise InvalidParameterError(f"need 0 <= t <= s < inf, got t={t}, s={s}")


def _check_eps(eps: float):
    if not (eps > 0):
        raise InvalidParameterError(f"eps must be positive, got {eps}")


def choose_grid(interval: RateInterval, t: float, s: float, g_norm: float, eps: float) -> TimeGrid:
    """Coarsest uniform grid whose a-priori error is ``<= eps`` and whose
    steps satisfy ``dt * ||Q|| <= 1``."""
    _check_times(t, s)
    _check_eps(eps)
    if t == s:
        return TimeGrid(t, s, 0)
    duration = s - t
    norm = operator_norm(interval)

    def ok(n):
        return (duration / n) * duration * norm * norm * g_norm <= eps and (duration / n) * norm <= 1.0

    guess = max(1, math.ceil(duration * duration * norm * norm * g_norm / eps), math.ceil(duration * norm))
    n = guess
    while n > 1 and ok(n - 1):
        n -= 1
    while not ok(n):
        n += 1
    return TimeGrid(t, s, n)


def _enforce_cap(interval: RateInterval, grid: TimeGrid, g_norm: float):
    cap = max_steps()
    if grid.steps > cap:
        norm = operator_norm(interval)
        achievable = grid.duration**2 * norm * norm * g_norm / cap
        raise ToleranceError(
            f"tolerance needs {grid.steps} steps, above the cap of {cap}; "
            f"smallest reachable eps is {achievable:.3g}",
            achievable_eps=achievable,
        )


def euler_step(interval: RateInterval, g: WindowFunction, dt: float) -> WindowFunction:
    """``g + dt * Q g``; refuses steps with ``dt * ||Q|| > 2``."""
    if not (dt >= 0) or dt * operator_norm(interval) > 2.0:
        raise StepTooLargeError(f"step {dt} violates dt * ||Q|| <= 2 for {interval}")
    v = g.values
    d = np.diff(v)
    out = v.copy()
    out[:-1] = v[:-1] + dt * (np.where(d >= 0, interval.lower, interval.upper) * d)
    return g.replace(out)


def phi_apply(interval: RateInterval, grid: TimeGrid, g: WindowFunction) -> WindowFunction:
    if not grid.is_step_valid(interval):
        raise StepTooLargeError(
            f"grid step {grid.granularity} violates dt * ||Q|| <= 2 for {interval}"
        )
    if grid.steps == 0 or len(g) == 1:
        return g
    out = _kernels.backward_recursion(
        np.ascontiguousarray(g.values), interval.lower, interval.upper, grid.granularity, grid.steps
    )
    return g.replace(out)


def lower_transition(
    interval: RateInterval, t: float, s: float, g: WindowFunction, eps: float
) -> ApproxResult:
    """Approximate the lower transition operator on the whole window within ``eps``."""
    g_norm = g.sup_norm()
    grid = choose_grid(interval, t, s, g_norm, eps)
    _enforce_cap(interval, grid, g_norm)
    return ApproxResult(phi_apply(interval, grid, g), grid_error(interval, grid, g_norm), grid, (g.base, g.top))


def lower_prevision_ev_const(
    interval: RateInterval, t: float, s: float, x: int, f: FunctionSpec, eps: float
) -> BoundResult:
    top = f.eventual_constant_at
    if top is None:
        raise UnsupportedFunctionError(f"{f.name}: no eventual-constant index declared")
    _check_times(t, s)
    _check_eps(eps)
    if x >= top:
        return BoundResult(lower=f(top), truncation_top=top)
    res = lower_transition(interval, t, s, WindowFunction(x, f.values(x, top)), eps)
    return BoundResult(
        lower=res.values(x), error_bound=res.a_priori_error, truncation_top=top, steps=res.grid.steps
    )


def lower_prevision_bounded(
    interval: RateInterval, t: float, s: float, x: int, f: FunctionSpec, eps: float
) -> BoundResult:
    """Bounded f: after ``n`` backward steps the value at ``x`` only sees
    ``f`` on ``x..x+n``, so truncating there is exact for that grid."""
    norm = f.sup_norm()
    if norm is None:
        raise UnsupportedFunctionError(f"{f.name}: no finite bound certificate")
    _check_times(t, s)
    _check_eps(eps)
    grid = choose_grid(interval, t, s, norm, eps)
    _enforce_cap(interval, grid, norm)
    n = grid.steps
    if n == 0:
        return BoundResult(lower=f(x), truncation_top=x)
    vals = f.values(x, x + n)
    value = _kernels.backward_recursion_at_base(vals, interval.lower, interval.upper, grid.granularity, n)
    return BoundResult(
        lower=float(value), error_bound=grid_error(interval, grid, norm), truncation_top=x + n, steps=n
    )


def _growth(interval, t, s, x, f: FunctionSpec, eps, upper: bool) -> BoundResult:
    env = f.growth_envelope
    if env is None:
        raise UnsupportedFunctionError(f"{f.name}: no growth envelope declared")
    low = f.infimum()
    if low is None:
        raise UnsupportedFunctionError(f"{f.name}: no lower-bound certificate")
    _check_times(t, s)
    _check_eps(eps)
    side = "upper" if upper else "lower"
    if t == s or interval.upper == 0:
        return BoundResult(**{side: f(x)}, truncation_top=x)
    mean = interval.upper * (s - t)
    # |f(y) - f(top)| <= env(y) - inf f for y > top, and that bound is
    # non-decreasing, so its upper expectation is the Poisson one at `upper`.
    const, slope = env.a - low, env.b
    if env.p == 0:
        const, slope = const + slope, 0.0
    sign = -1.0 if upper else 1.0
    width = GROWTH_FIRST_WIDTH
    prev = None
    while True:
        top = x + width
        vals = f.values(x, top)
        f.check_envelope(x, vals)
        res = lower_transition(interval, t, s, WindowFunction(x, sign * vals), eps / 2)
        value = sign * res.values(x)
        tail = envelope_tail(mean, x, width + 1, const, slope, env.p)
        if prev is not None and abs(value - prev) <= eps / 2 and tail <= eps / 2:
            return BoundResult(
                **{side: value},
                error_bound=res.a_priori_error + tail,
                truncation_top=top,
                steps=res.grid.steps,
            )
        if width >= GROWTH_MAX_WIDTH:
            raise ToleranceError(f"{f.name}: truncation did not settle below window width {width}")
        prev = value
        width *= 2


def lower_prevision_growth(
    interval: RateInterval, t: float, s: float, x: int, f: FunctionSpec, eps: float
) -> BoundResult:
    """Bounded-below f with ``f(y) <= a + b y^p``, via truncations on a
    doubling window ``x+16, x+32, ...``."""
    return _growth(interval, t, s, x, f, eps, upper=False)


def lower_prevision(
    interval: RateInterval, t: float, s: float, x: int, f: FunctionSpec, eps: float
) -> BoundResult:
    """Pick the engine from the function's metadata."""
    if f.is_eventually_constant:
        return lower_prevision_ev_const(interval, t, s, x, f, eps)
    if f.growth_envelope is not None:
        return lower_prevision_growth(interval, t, s, x, f, eps)
    if f.sup_norm() is not None:
        return lower_prevision_bounded(interval, t, s, x, f, eps)
    raise UnsupportedFunctionError(
        f"{f.name}: need an eventual-constant index, a bound or a growth envelope"
    )


def upper_prevision(
    interval: RateInterval, t: float, s: float, x: int, f: FunctionSpec, eps: float
) -> BoundResult:
    """Conjugate upper value ``-lower(-f)``; unbounded f uses upper truncations."""
    if not f.is_bounded and f.growth_envelope is not None:
        return _growth(interval, t, s, x, f, eps, upper=True)
    return lower_prevision(interval, t, s, x, f.negated(), eps).conjugate()
