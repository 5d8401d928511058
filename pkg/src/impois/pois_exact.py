"""Precise Poisson quantities: pmf, transition probabilities, expectations.

Series truncation is chosen a priori from a tail bound, never by watching
terms get small:

* bounded f: ``sup|f| * P(Y >= m) <= tol`` with the Chernoff bound
  ``P(Y >= m) <= exp(-mu) (e mu / m)^m`` for ``m > mu``;
* enveloped f (``|f(y)| <= A + b y^p``): the remainder is dominated by a
  geometric series once the term ratio ``mu/(k+1) ((x+k+1)/(x+k))^p`` drops
  below one;
* eventually constant f: no truncation, the tail is a regularized
  incomplete gamma value.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy import special

from .errors import InvalidParameterError, UnsupportedFunctionError
from .functions import FunctionSpec


def _check_mean(mean: float) -> float:
    mean = float(mean)
    if not math.isfinite(mean) or mean < 0:
        raise InvalidParameterError(f"Poisson mean must be finite and >= 0, got {mean}")
    return mean


def _check_count(k: int, what: str = "count") -> int:
    if int(k) != k or k < 0:
        raise InvalidParameterError(f"{what} must be a non-negative integer, got {k}")
    return int(k)


def log_pmf(mean: float, k):
    """Vectorised log psi_mean(k); ``-inf`` where the mass is zero."""
    k = np.asarray(k, dtype=float)
    if mean == 0:
        return np.where(k == 0, 0.0, -np.inf)
    return k * math.log(mean) - mean - special.gammaln(k + 1)


def pmf(mean: float, k: int) -> float:
    """psi_mean(k) = exp(-mean) mean^k / k!, computed in log space."""
    mean = _check_mean(mean)
    k = _check_count(k)
    if mean == 0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(mean) - mean - math.lgamma(k + 1))


def tail_probability(mean: float, k: int) -> float:
    """P(Y >= k) for Y ~ Poisson(mean)."""
    mean = _check_mean(mean)
    k = _check_count(k)
    if k == 0:
        return 1.0
    if mean == 0:
        return 0.0
    return float(special.gammainc(k, mean))


def chernoff_tail(mean: float, m: int) -> float:
    """Upper bound on P(Y >= m), valid for ``m > mean``."""
    if m <= mean:
        return 1.0
    if mean == 0:
        return 0.0
    return math.exp(-mean + m * (1.0 + math.log(mean) - math.log(m)))


def transition_probability(rate: float, duration: float, x: int, y: int) -> float:
    """P(X_{t+duration} = y | X_t = x) for a Poisson process with ``rate``."""
    rate, duration = float(rate), float(duration)
    if not (math.isfinite(rate) and rate >= 0 and math.isfinite(duration) and duration >= 0):
        raise InvalidParameterError("rate and duration must be finite and non-negative")
    x = _check_count(x, "x")
    y = _check_count(y, "y")
    if y < x:
        return 0.0
    if duration == 0:
        return 1.0 if y == x else 0.0
    return pmf(rate * duration, y - x)


class SeriesValue(NamedTuple):
    value: float
    top: int  # last count included in the explicit sum
    error: float  # a-priori truncation error bound


def _log_weight(const: float, b: float, p: int, u: float) -> float:
    """log(const + b u^p) for const, b >= 0 and u >= 1."""
    parts = []
    if const > 0:
        parts.append(math.log(const))
    if b > 0:
        parts.append(math.log(b) + p * math.log(u))
    if not parts:
        return -math.inf
    return float(np.logaddexp.reduce(parts))


def _geometric_tail(mean: float, x: int, k: int, const: float, b: float, p: int):
    """(bound on sum_{j>=k} (const + b (x+j)^p) psi(j), ratio) or None if the
    term ratio is not yet below one at ``k``."""
    u = x + k
    if u < 1 or k < 1:
        return None
    ratio = mean / (k + 1) * ((u + 1) / u) ** p
    if ratio >= 1:
        return None
    log_term = _log_weight(const, b, p, u) + float(log_pmf(mean, k))
    return math.exp(log_term) / (1.0 - ratio), ratio


def envelope_tail(mean: float, x: int, start: int, const: float, b: float, p: int) -> float:
    """Upper bound on ``sum_{k >= start} (const + b (x+k)^p) psi_mean(k)``.

    Terms are summed explicitly until the geometric remainder bound is
    negligible next to the partial sum, then the bound is added.
    """
    mean = _check_mean(mean)
    const = max(float(const), 0.0)
    if mean == 0:
        return const + b * float(x) ** p if start == 0 else 0.0
    total = 0.0
    k = start
    while True:
        rem = _geometric_tail(mean, x, k, const, b, p)
        if rem is not None and rem[1] <= 0.5 and rem[0] <= 1e-17 * total + 1e-300:
            # pad for the rounding of the explicit sum
            return (total + rem[0]) * (1.0 + 1e-12)
        total += (const + b * float(x + k) ** p) * pmf(mean, k)
        k += 1


def _bounded_cutoff(mean: float, norm: float, tol: float) -> int:
    """Smallest m > mean with ``norm * chernoff_tail(mean, m) <= tol``."""
    if norm == 0:
        return 1
    lo = int(math.floor(mean)) + 1
    if norm * chernoff_tail(mean, lo) <= tol:
        return lo
    hi = lo
    while norm * chernoff_tail(mean, hi) > tol:
        hi = lo + 2 * (hi - lo + 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if norm * chernoff_tail(mean, mid) <= tol:
            hi = mid
        else:
            lo = mid
    return hi


def _envelope_cutoff(mean: float, x: int, const: float, b: float, p: int, tol: float):
    m = max(int(math.floor(mean)) + 1, 1)
    while True:
        rem = _geometric_tail(mean, x, m, const, b, p)
        if rem is not None and rem[0] <= tol:
            return m, rem[0]
        m += 1


def poisson_series(mean: float, x: int, f: FunctionSpec, tol: float) -> SeriesValue:
    """sum_{y>=x} f(y) psi_mean(y - x) with truncation error <= tol."""
    mean = _check_mean(mean)
    x = _check_count(x, "x")
    if not (tol > 0):
        raise InvalidParameterError(f"tol must be positive, got {tol}")
    if mean == 0:
        return SeriesValue(f(x), x, 0.0)
    top = f.eventual_constant_at
    if top is not None:
        if x >= top:
            return SeriesValue(f(x), x, 0.0)
        ks = np.arange(top - x)
        head = math.fsum(f.values(x, top - 1) * np.exp(log_pmf(mean, ks)))
        return SeriesValue(head + f(top) * tail_probability(mean, top - x), top, 0.0)
    norm = f.sup_norm()
    if norm is not None:
        m = _bounded_cutoff(mean, norm, tol)
        err = norm * chernoff_tail(mean, m)
    elif f.growth_envelope is not None:
        low = f.infimum()
        if low is None:
            raise UnsupportedFunctionError(f"{f.name}: enveloped function needs a lower bound")
        env = f.growth_envelope
        const, b = abs(env.a) + abs(low), env.b
        if env.p == 0:
            const, b = const + b, 0.0
        m, err = _envelope_cutoff(mean, x, const, b, env.p, tol)
    else:
        raise UnsupportedFunctionError(
            f"{f.name}: unbounded function without a growth envelope has no summability certificate"
        )
    vals = f.values(x, x + m - 1)
    if f.growth_envelope is not None:
        f.check_envelope(x, vals)
    value = math.fsum(vals * np.exp(log_pmf(mean, np.arange(m))))
    return SeriesValue(value, x + m - 1, err)


def poisson_expectation(
    rate: float, t: float, s: float, x: int, f: FunctionSpec, tol: float = 1e-10
) -> float:
    """E[f(X_s) | X_t = x] for the Poisson process with ``rate``."""
    rate = _check_mean(rate)
    if not (t <= s):
        raise InvalidParameterError(f"need t <= s, got t={t}, s={s}")
    return poisson_series(rate * (s - t), x, f, tol).value
