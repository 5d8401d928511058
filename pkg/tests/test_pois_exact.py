import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from impois import (
    FunctionSpec,
    InvalidParameterError,
    UnsupportedFunctionError,
    constant,
    identity,
    indicator,
    pmf,
    poisson_expectation,
    polynomial,
    transition_probability,
)
from impois.pois_exact import chernoff_tail, envelope_tail, poisson_series, tail_probability

# frozen from mpmath at 30 digits
TWO_E_M2 = 0.270670566473225383787998989945
E_M2 = 0.135335283236612691893999494972
E_M1 = 0.367879441171442321595523770161


def mp_pmf(mean, k):
    mpmath.mp.dps = 40
    return float(mpmath.e ** (-mpmath.mpf(mean)) * mpmath.mpf(mean) ** k / mpmath.factorial(k))


class TestPmf:
    def test_zero_mean(self):
        assert pmf(0, 0) == 1.0
        assert pmf(0, 3) == 0.0

    def test_closed_form(self):
        assert pmf(2, 1) == pytest.approx(TWO_E_M2, rel=1e-14)

    def test_normalization(self):
        assert math.fsum(pmf(5, k) for k in range(201)) == pytest.approx(1.0, abs=1e-12)

    def test_large_count_does_not_overflow(self):
        assert pmf(1e6, 10**6) == pytest.approx(mp_pmf(10**6, 10**6), rel=1e-8)
        assert pmf(3.0, 10**6) == 0.0

    @pytest.mark.parametrize("bad", [-1.0, math.inf, math.nan])
    def test_bad_mean(self, bad):
        with pytest.raises(InvalidParameterError):
            pmf(bad, 1)

    @given(st.floats(0.01, 50), st.integers(0, 120))
    def test_matches_high_precision(self, mean, k):
        assert pmf(mean, k) == pytest.approx(mp_pmf(mean, k), rel=1e-10, abs=1e-300)

    @given(st.floats(0.0, 50))
    def test_normalization_up_to_cutoff(self, mean):
        from impois.pois_exact import _bounded_cutoff

        m = _bounded_cutoff(mean, 1.0, 1e-12) if mean > 0 else 1
        total = math.fsum(pmf(mean, k) for k in range(m))
        assert 1 - 1e-10 <= total <= 1 + 1e-15


class TestTransition:
    def test_downward_is_impossible(self):
        assert transition_probability(1, 1, 5, 4) == 0.0

    def test_zero_duration(self):
        assert transition_probability(7.5, 0, 3, 3) == 1.0
        assert transition_probability(7.5, 0, 3, 4) == 0.0

    def test_no_event(self):
        assert transition_probability(2, 1, 0, 0) == pytest.approx(E_M2, rel=1e-14)

    @given(st.floats(0, 5), st.floats(0, 5), st.integers(0, 20), st.integers(0, 30))
    def test_state_homogeneity(self, rate, dt, x, y):
        if y >= x:
            assert transition_probability(rate, dt, x, y) == transition_probability(rate, dt, 0, y - x)

    @given(st.floats(0, 3), st.floats(0, 3), st.floats(0, 3), st.integers(0, 5), st.integers(0, 25))
    def test_chapman_kolmogorov(self, rate, d1, d2, x, j):
        y = x + j
        lhs = math.fsum(
            transition_probability(rate, d1, x, z) * transition_probability(rate, d2, z, y) for z in range(x, y + 1)
        )
        assert lhs == pytest.approx(transition_probability(rate, d1 + d2, x, y), abs=1e-12)


class TestTails:
    @pytest.mark.parametrize("mean", [0.3, 2.0, 9.0])
    def test_chernoff_dominates_exact_tail(self, mean):
        for m in range(int(mean) + 1, int(mean) + 40):
            assert tail_probability(mean, m) <= chernoff_tail(mean, m)

    def test_tail_probability_matches_sum(self):
        assert tail_probability(2.0, 3) == pytest.approx(1 - sum(pmf(2.0, k) for k in range(3)), rel=1e-13)

    @pytest.mark.parametrize("p", [0, 1, 2, 3])
    def test_envelope_tail_is_an_upper_bound(self, p):
        mean, x, start = 2.5, 3, 6
        mpmath.mp.dps = 30
        exact = mpmath.nsum(
            lambda k: (1 + 0.5 * (x + k) ** p) * mpmath.e ** (-mean) * mpmath.mpf(mean) ** k / mpmath.factorial(k),
            [start, mpmath.inf],
        )
        bound = envelope_tail(mean, x, start, 1.0, 0.5, p)
        assert float(exact) <= bound <= float(exact) * (1 + 1e-9)


class TestExpectation:
    def test_constant(self):
        assert poisson_expectation(1.7, 0, 2, 4, constant(3.25)) == 3.25

    @pytest.mark.parametrize("rate,t,s,x", [(1, 0, 1, 0), (2.5, 1, 3.5, 7), (0.3, 0, 10, 2)])
    def test_identity_mean(self, rate, t, s, x):
        assert poisson_expectation(rate, t, s, x, identity(), tol=1e-12) == pytest.approx(x + rate * (s - t), abs=1e-10)

    def test_indicator_of_zero(self):
        assert poisson_expectation(1, 0, 1, 0, indicator(0)) == pytest.approx(E_M1, rel=1e-14)

    def test_second_moment(self):
        assert poisson_expectation(1, 0, 1, 0, polynomial(0, 1, 2), tol=1e-12) == pytest.approx(2.0, abs=1e-10)

    def test_bounded_non_eventually_constant(self):
        f = FunctionSpec(lambda y: math.sin(y), bound=1.0, lower_bound=-1.0)
        mean = 3.0
        # E sin(Y) = Im exp(mean (e^{i} - 1))
        exact = (math.exp(mean * (math.cos(1) - 1)) * math.sin(mean * math.sin(1)))
        assert poisson_expectation(1.0, 0, mean, 0, f, tol=1e-12) == pytest.approx(exact, abs=1e-11)

    @pytest.mark.parametrize("tol", [1e-3, 1e-6, 1e-9])
    def test_tolerance_refinement(self, tol):
        f = FunctionSpec(lambda y: math.cos(y / 3), bound=1.0)
        a = poisson_expectation(4.0, 0, 1, 2, f, tol)
        b = poisson_expectation(4.0, 0, 1, 2, f, tol / 10)
        assert abs(a - b) <= tol

    def test_reported_error_is_within_tol(self):
        f = FunctionSpec(lambda y: math.cos(y), bound=1.0)
        assert poisson_series(5.0, 0, f, 1e-7).error <= 1e-7

    def test_unbounded_without_envelope(self):
        f = FunctionSpec(lambda y: float(y * y), lower_bound=0.0)
        with pytest.raises(UnsupportedFunctionError):
            poisson_expectation(1, 0, 1, 0, f)

    def test_bad_tol(self):
        with pytest.raises(InvalidParameterError):
            poisson_expectation(1, 0, 1, 0, indicator(1), tol=0)

    def test_zero_duration(self):
        assert poisson_expectation(3, 2, 2, 5, identity()) == 5.0
