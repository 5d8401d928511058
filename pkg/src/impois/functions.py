"""Functions on the count space together with the metadata the engines need.

A :class:`FunctionSpec` wraps an evaluator ``count -> real`` and carries the
certificates (bounds, eventual constancy, monotonicity, growth envelope) that
decide which computation path is admissible.  Declared metadata is
spot-checked on construction; it is never inferred.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ContractViolationError, InvalidParameterError, UnsupportedFunctionError

CHECK_RANGE = 64
_REL_SLACK = 1e-12


class Monotonicity(str, enum.Enum):
    NON_DECREASING = "non-decreasing"
    NON_INCREASING = "non-increasing"
    NONE = "none"

    def flipped(self) -> "Monotonicity":
        if self is Monotonicity.NON_DECREASING:
            return Monotonicity.NON_INCREASING
        if self is Monotonicity.NON_INCREASING:
            return Monotonicity.NON_DECREASING
        return self


@dataclass(frozen=True)
class GrowthEnvelope:
    """Upper envelope ``y -> a + b * y**p`` with ``b >= 0`` and integer ``p >= 0``."""

    a: float
    b: float
    p: int

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidParameterError("envelope coefficients must be finite")
        if self.b < 0:
            raise InvalidParameterError("envelope slope b must be non-negative")
        if int(self.p) != self.p or self.p < 0:
            raise InvalidParameterError("envelope power p must be a non-negative integer")
        object.__setattr__(self, "p", int(self.p))

    def __call__(self, y: int) -> float:
        return self.a + self.b * float(y) ** self.p


def _allowed_excess(ref: float) -> float:
    return _REL_SLACK * max(1.0, abs(ref))


@dataclass(frozen=True)
class FunctionSpec:
    evaluator: Callable[[int], float]
    monotonicity: Monotonicity = Monotonicity.NONE
    eventual_constant_at: Optional[int] = None
    bound: Optional[float] = None
    growth_envelope: Optional[GrowthEnvelope] = None
    lower_bound: Optional[float] = None
    name: str = "f"
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "monotonicity", Monotonicity(self.monotonicity))
        if self.eventual_constant_at is not None and self.eventual_constant_at < 0:
            raise InvalidParameterError("eventual_constant_at must be a count (>= 0)")
        if self.bound is not None and not (self.bound >= 0 and math.isfinite(self.bound)):
            raise InvalidParameterError("bound must be a finite non-negative real")
        if self.growth_envelope is not None and not isinstance(self.growth_envelope, GrowthEnvelope):
            object.__setattr__(self, "growth_envelope", GrowthEnvelope(*self.growth_envelope))
        self._spot_check()

    def _spot_check(self):
        pts = range(CHECK_RANGE + 1)
        vals = [self(y) for y in pts]
        if any(not math.isfinite(v) for v in vals):
            raise ContractViolationError(f"{self.name}: evaluator returned a non-finite value")
        if self.monotonicity is Monotonicity.NON_DECREASING:
            if any(b < a for a, b in zip(vals, vals[1:])):
                raise ContractViolationError(f"{self.name}: declared non-decreasing but is not")
        elif self.monotonicity is Monotonicity.NON_INCREASING:
            if any(b > a for a, b in zip(vals, vals[1:])):
                raise ContractViolationError(f"{self.name}: declared non-increasing but is not")
        top = self.eventual_constant_at
        if top is not None:
            ref = self(top)
            probes = [top + k for k in range(1, CHECK_RANGE + 1)] + [top + 2**k for k in range(7, 21, 3)]
            if any(self(y) != ref for y in probes):
                raise ContractViolationError(f"{self.name}: not constant from {top} onward")
        if self.bound is not None:
            if any(abs(v) > self.bound + _allowed_excess(self.bound) for v in vals):
                raise ContractViolationError(f"{self.name}: |f| exceeds the declared bound")
        if self.lower_bound is not None:
            if any(v < self.lower_bound - _allowed_excess(self.lower_bound) for v in vals):
                raise ContractViolationError(f"{self.name}: f falls below the declared lower bound")
        if self.growth_envelope is not None:
            self.check_envelope(0, vals)

    def check_envelope(self, start: int, values: Sequence[float]):
        """Raise if ``values`` (f at ``start, start+1, ...``) exceed the envelope."""
        env = self.growth_envelope
        if env is None:
            return
        for k, v in enumerate(values):
            e = env(start + k)
            if v > e + _allowed_excess(e):
                raise ContractViolationError(
                    f"{self.name}: f({start + k})={v} exceeds envelope {env.a}+{env.b}*y^{env.p}"
                )

    def __call__(self, y: int) -> float:
        y = int(y)
        try:
            return self._cache[y]
        except KeyError:
            v = float(self.evaluator(y))
            self._cache[y] = v
            return v

    def values(self, lo: int, hi: int) -> np.ndarray:
        """f evaluated on ``lo..hi`` inclusive."""
        return np.array([self(y) for y in range(lo, hi + 1)], dtype=float)

    @property
    def is_eventually_constant(self) -> bool:
        return self.eventual_constant_at is not None

    def sup_norm(self) -> Optional[float]:
        """A certificate for sup|f|, or None when f may be unbounded."""
        if self.bound is not None:
            return self.bound
        if self.eventual_constant_at is not None:
            return float(np.max(np.abs(self.values(0, self.eventual_constant_at))))
        if self.monotonicity is Monotonicity.NON_INCREASING and self.lower_bound is not None:
            return max(abs(self(0)), abs(self.lower_bound))
        return None

    def infimum(self) -> Optional[float]:
        """A certificate for inf f, or None."""
        if self.lower_bound is not None:
            return self.lower_bound
        if self.eventual_constant_at is not None:
            return float(np.min(self.values(0, self.eventual_constant_at)))
        if self.bound is not None:
            return -self.bound
        if self.monotonicity is Monotonicity.NON_DECREASING:
            return self(0)
        return None

    @property
    def is_bounded(self) -> bool:
        return self.sup_norm() is not None

    def negated(self) -> "FunctionSpec":
        """The function ``-f``; only defined for bounded f."""
        norm = self.sup_norm()
        if norm is None:
            raise UnsupportedFunctionError(f"{self.name}: -f is not bounded below")
        return FunctionSpec(
            lambda y, f=self: -f(y),
            monotonicity=self.monotonicity.flipped(),
            eventual_constant_at=self.eventual_constant_at,
            bound=norm,
            lower_bound=-norm,
            name=f"-{self.name}",
        )

    def shifted(self, x: int) -> "FunctionSpec":
        """``z -> f(x + z)``."""
        env = self.growth_envelope
        if env is not None and env.p >= 1 and x > 0:
            # (x+z)^p <= 2^(p-1) (x^p + z^p)
            c = 2.0 ** (env.p - 1)
            env = GrowthEnvelope(env.a + env.b * c * float(x) ** env.p, env.b * c, env.p)
        top = self.eventual_constant_at
        return FunctionSpec(
            lambda z, f=self: f(x + z),
            monotonicity=self.monotonicity,
            eventual_constant_at=None if top is None else max(top - x, 0),
            bound=self.bound,
            growth_envelope=env,
            lower_bound=self.lower_bound,
            name=f"{self.name}(x+{x})",
        )

    def truncated(self, top: int) -> "FunctionSpec":
        """``I_{<=top} f + f(top) I_{>top}``: constant from ``top`` onward."""
        vals = self.values(0, top)
        return FunctionSpec(
            lambda y, f=self: f(min(y, top)),
            monotonicity=self.monotonicity,
            eventual_constant_at=top,
            bound=float(np.max(np.abs(vals))),
            lower_bound=self.lower_bound,
            name=f"{self.name}|<={top}",
        )


def constant(c: float) -> FunctionSpec:
    return FunctionSpec(
        lambda y: c,
        monotonicity=Monotonicity.NON_DECREASING,
        eventual_constant_at=0,
        bound=abs(c),
        lower_bound=c,
        name=f"const:{c}",
    )


def indicator(k: int) -> FunctionSpec:
    """Indicator of the single count ``k``."""
    return FunctionSpec(
        lambda y: 1.0 if y == k else 0.0,
        monotonicity=Monotonicity.NON_INCREASING if k == 0 else Monotonicity.NONE,
        eventual_constant_at=k + 1,
        bound=1.0,
        lower_bound=0.0,
        name=f"ind:{k}",
    )


def indicator_ge(k: int) -> FunctionSpec:
    """Indicator of ``{y >= k}``."""
    return FunctionSpec(
        lambda y: 1.0 if y >= k else 0.0,
        monotonicity=Monotonicity.NON_DECREASING,
        eventual_constant_at=k,
        bound=1.0,
        lower_bound=0.0,
        name=f"indge:{k}",
    )


def indicator_le(k: int) -> FunctionSpec:
    """Indicator of ``{y <= k}``."""
    return FunctionSpec(
        lambda y: 1.0 if y <= k else 0.0,
        monotonicity=Monotonicity.NON_INCREASING,
        eventual_constant_at=k + 1,
        bound=1.0,
        lower_bound=0.0,
        name=f"indle:{k}",
    )


def polynomial(a: float, b: float, p: int) -> FunctionSpec:
    """``y -> a + b * y**p`` with ``b >= 0``; its own growth envelope."""
    env = GrowthEnvelope(a, b, p)
    if env.p == 0 or env.b == 0:
        c = a + (b if env.p == 0 else 0.0)
        spec = constant(c)
        return FunctionSpec(spec.evaluator, spec.monotonicity, 0, abs(c), env, c, name=f"poly:{a},{b},{p}")
    return FunctionSpec(
        env,
        monotonicity=Monotonicity.NON_DECREASING,
        growth_envelope=env,
        lower_bound=a,
        name=f"poly:{a},{b},{env.p}",
    )


def identity() -> FunctionSpec:
    return FunctionSpec(
        lambda y: float(y),
        monotonicity=Monotonicity.NON_DECREASING,
        growth_envelope=GrowthEnvelope(0.0, 1.0, 1),
        lower_bound=0.0,
        name="id",
    )


def from_values(values: Sequence[float], tail: float, name: str = "table") -> FunctionSpec:
    """f(y) = values[y] for y < len(values), and ``tail`` beyond."""
    vals = [float(v) for v in values]
    tail = float(tail)
    n = len(vals)
    allv = vals + [tail]
    return FunctionSpec(
        lambda y: vals[y] if y < n else tail,
        eventual_constant_at=n,
        bound=max(abs(v) for v in allv),
        lower_bound=min(allv),
        name=name,
    )


def read_table(path) -> FunctionSpec:
    """Load newline-separated values for counts 0..n-1 followed by ``tail=<v>``."""
    values, tail = [], None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("tail="):
            tail = float(line[5:])
            continue
        if tail is not None:
            raise InvalidParameterError(f"{path}:{lineno}: value after the tail line")
        values.append(float(line))
    if tail is None:
        raise InvalidParameterError(f"{path}: missing 'tail=<v>' line")
    return from_values(values, tail, name=f"file:{path}")


def parse_function(text: str) -> FunctionSpec:
    """Parse the textual descriptors ``ind:k``, ``indge:k``, ``indle:k``, ``id``,
    ``poly:a,b,p`` and ``file:PATH``."""
    kind, _, arg = text.strip().partition(":")
    try:
        if kind == "id" and not arg:
            return identity()
        if kind == "ind":
            return indicator(_count(arg))
        if kind == "indge":
            return indicator_ge(_count(arg))
        if kind == "indle":
            return indicator_le(_count(arg))
        if kind == "poly":
            a, b, p = arg.split(",")
            return polynomial(float(a), float(b), int(p))
        if kind == "file" and arg:
            return read_table(arg)
    except (ValueError, OSError) as exc:
        raise InvalidParameterError(f"bad function descriptor {text!r}: {exc}") from exc
    raise InvalidParameterError(f"unknown function descriptor {text!r}")


def _count(arg: str) -> int:
    k = int(arg)
    if k < 0:
        raise ValueError("count must be non-negative")
    return k
