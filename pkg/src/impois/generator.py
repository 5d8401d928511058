"""The lower Poisson generator on a finite count window.

For a window ``base..top`` the reduced generator acts as

    [Q g](x) = min_{lam in [lo, hi]} lam * (g(x+1) - g(x))   for x < top
    [Q g](top) = 0

The minimum of a linear function of ``lam`` sits at an endpoint, so every
row picks ``lo`` when the forward difference is non-negative and ``hi``
otherwise.  Each such choice is one "dominating" linear generator; the lower
generator is their pointwise minimum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DimensionError, InvalidParameterError


@dataclass(frozen=True)
class RateInterval:
    """Admissible event rates ``[lower, upper]``."""

    lower: float
    upper: float

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if not (math.isfinite(lo) and math.isfinite(hi)) or not (0 <= lo <= hi):
            raise InvalidParameterError(f"need 0 <= lower <= upper < inf, got [{lo}, {hi}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def degenerate(cls, rate: float) -> "RateInterval":
        return cls(rate, rate)

    @property
    def is_degenerate(self) -> bool:
        return self.lower == self.upper

    def __contains__(self, rate: float) -> bool:
        return self.lower <= rate <= self.upper


@dataclass(frozen=True, eq=False)
class WindowFunction:
    """Values of a function on the counts ``base .. base+len(values)-1``.

    ``tail`` is the value taken on every count above the window; it defaults
    to the last window value, which makes the object represent the truncation
    ``I_{<=top} f + f(top) I_{>top}``.
    """

    base: int
    values: np.ndarray
    tail: Optional[float] = None

    def __post_init__(self):
        if int(self.base) != self.base or self.base < 0:
            raise InvalidParameterError("window base must be a non-negative integer")
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size < 1:
            raise DimensionError("a window holds at least one state")
        if not np.all(np.isfinite(vals)):
            raise InvalidParameterError("window values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "base", int(self.base))
        object.__setattr__(self, "values", vals)
        tail = vals[-1] if self.tail is None else float(self.tail)
        if not math.isfinite(tail):
            raise InvalidParameterError("window tail must be finite")
        object.__setattr__(self, "tail", float(tail))

    @classmethod
    def from_function(cls, f, base: int, top: int) -> "WindowFunction":
        return cls(base, [f(y) for y in range(base, top + 1)])

    @property
    def top(self) -> int:
        return self.base + self.values.size - 1

    def __len__(self) -> int:
        return self.values.size

    def __call__(self, y: int) -> float:
        if y < self.base:
            raise IndexError(f"count {y} lies below the window base {self.base}")
        if y > self.top:
            return self.tail
        return float(self.values[y - self.base])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def replace(self, values, tail: Optional[float] = None) -> "WindowFunction":
        return WindowFunction(self.base, values, self.tail if tail is None else tail)

    def __repr__(self):
        return f"WindowFunction(base={self.base}, values={self.values.tolist()}, tail={self.tail})"


@dataclass(frozen=True)
class RateSelection:
    """One rate per window state below the top: a dominating linear generator."""

    rates: tuple

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        if any(not math.isfinite(r) or r < 0 for r in rates):
            raise InvalidParameterError("selected rates must be finite and non-negative")
        object.__setattr__(self, "rates", rates)

    def __len__(self):
        return len(self.rates)

    def within(self, interval: RateInterval) -> bool:
        return all(r in interval for r in self.rates)


def apply_lower_generator(interval: RateInterval, g: WindowFunction) -> WindowFunction:
    d = np.diff(g.values)
    out = np.empty_like(g.values)
    out[:-1] = np.where(d >= 0, interval.lower, interval.upper) * d
    out[-1] = 0.0
    return WindowFunction(g.base, out, 0.0)


def lower_selection(interval: RateInterval, g: WindowFunction) -> RateSelection:
    """The endpoint selection attaining the minimum; ties go to the lower rate."""
    d = np.diff(g.values)
    return RateSelection(np.where(d >= 0, interval.lower, interval.upper))


def apply_selected_generator(selection: RateSelection, g: WindowFunction) -> WindowFunction:
    if len(selection) != len(g) - 1:
        raise DimensionError(
            f"selection has {len(selection)} rates, window needs {len(g) - 1}"
        )
    out = np.empty_like(g.values)
    out[:-1] = np.asarray(selection.rates, dtype=float) * np.diff(g.values)
    out[-1] = 0.0
    return WindowFunction(g.base, out, 0.0)


def endpoint_selections(interval: RateInterval, size: int) -> Iterator[RateSelection]:
    """All ``2**(size-1)`` selections with rates in ``{lower, upper}``."""
    ends: Sequence[float] = (interval.lower,) if interval.is_degenerate else (interval.lower, interval.upper)
    for rates in itertools.product(ends, repeat=size - 1):
        yield RateSelection(rates)


def operator_norm(interval: RateInterval) -> float:
    """Sup-norm operator norm of the lower generator, ``2 * upper``."""
    return 2.0 * interval.upper
