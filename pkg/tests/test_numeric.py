import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from inferlab.errors import ConvergenceError, DomainError
from inferlab.numeric import (
    RngStream,
    integrate,
    integrate_log,
    ln_beta,
    ln_gamma,
    log_binomial_pmf,
    normal_cdf,
    normal_quantile,
    regularized_incomplete_beta,
    standard_normal_draws,
    student_t_cdf,
    student_t_quantile,
)


def _erf_series_cdf(z):
    # Maclaurin series of erf at 50 digits; independent of math.erfc
    mpmath.mp.dps = 50
    x = mpmath.mpf(z) / mpmath.sqrt(2)
    total, n = mpmath.mpf(0), 0
    while True:
        term = (-1) ** n * x ** (2 * n + 1) / (mpmath.factorial(n) * (2 * n + 1))
        total += term
        if abs(term) < mpmath.mpf(10) ** -40:
            break
        n += 1
    return float(mpmath.mpf(0.5) + total / mpmath.sqrt(mpmath.pi))


def _exact_ibeta_integer(a, b, x):
    # I_x(a, b) for integer a, b is a binomial tail
    x = Fraction(x)
    m = a + b - 1
    return float(sum(math.comb(m, j) * x**j * (1 - x) ** (m - j) for j in range(a, m + 1)))


class TestLnGamma:
    def test_examples(self):
        assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-12)
        assert ln_gamma(0.5) == pytest.approx(0.5723649429, abs=1e-10)
        assert ln_gamma(11.0) == pytest.approx(math.log(math.factorial(10)), abs=1e-12)
        assert ln_gamma(11.0) == pytest.approx(15.1044125731, abs=1e-10)

    @pytest.mark.parametrize("n", range(1, 171, 7))
    def test_integer_factorials(self, n):
        assert ln_gamma(n) == pytest.approx(math.log(math.factorial(n - 1)), abs=1e-12)

    def test_against_mpmath_on_range(self):
        mpmath.mp.dps = 30
        for x in np.linspace(0.5, 200, 397):
            assert abs(ln_gamma(float(x)) - float(mpmath.loggamma(float(x)))) <= 1e-12

    def test_below_half_uses_reflection(self):
        assert ln_gamma(0.1) == pytest.approx(math.lgamma(0.1), abs=1e-12)

    @pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, math.nan, math.inf])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            ln_gamma(bad)


class TestIncompleteBeta:
    def test_examples(self):
        assert regularized_incomplete_beta(2.5, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.5, 3.0, 1.0) == 1.0
        assert regularized_incomplete_beta(2.0, 2.0, 0.5) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("a,b", [(1, 1), (2, 3), (5, 1), (7, 12), (30, 4), (50, 50)])
    def test_integer_parameters_exact(self, a, b):
        for x in [0.01, 0.1, 0.3, 0.5, 0.77, 0.95, 0.999]:
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(_exact_ibeta_integer(a, b, x), abs=1e-10)

    def test_against_scipy(self):
        worst = 0.0
        for a in [0.3, 0.5, 1.7, 10.0, 104 / 2, 500.0]:
            for b in [0.5, 0.9, 3.0, 40.0]:
                for x in np.linspace(0, 1, 41):
                    worst = max(worst, abs(regularized_incomplete_beta(a, b, x) - special.betainc(a, b, x)))
        assert worst <= 1e-10

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(0.05, 200.0),
        st.floats(0.05, 200.0),
        st.floats(0.0, 1.0),
    )
    def test_symmetry(self, a, b, x):
        total = regularized_incomplete_beta(a, b, x) + regularized_incomplete_beta(b, a, 1.0 - x)
        assert total == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("args", [(0, 1, 0.5), (1, -1, 0.5), (1, 1, -0.1), (1, 1, 1.1)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            regularized_incomplete_beta(*args)


class TestNormal:
    def test_examples(self):
        assert normal_cdf(0.0) == 0.5
        assert normal_cdf(1.3333) == pytest.approx(0.9088, abs=5e-5)
        assert normal_cdf(2.0) == pytest.approx(0.97725, abs=5e-6)

    @pytest.mark.parametrize("z", [-7.5, -3.0, -1.0, 0.3, 2.0, 4.5])
    def test_against_series_oracle(self, z):
        assert normal_cdf(z) == pytest.approx(_erf_series_cdf(z), abs=1e-10)

    @given(st.floats(-30, 30))
    def test_symmetry(self, z):
        assert normal_cdf(-z) + normal_cdf(z) == pytest.approx(1.0, abs=1e-12)

    def test_monotone(self):
        values = [normal_cdf(z) for z in np.linspace(-10, 10, 2001)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_quantile_examples(self):
        assert normal_quantile(0.5) == 0.0
        assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)
        assert normal_quantile(0.025) == pytest.approx(-1.959964, abs=1e-6)

    def test_quantile_matches_bisection_oracle(self):
        lo, hi = 0.0, 5.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if normal_cdf(mid) < 0.975:
                lo = mid
            else:
                hi = mid
        assert normal_quantile(0.975) == pytest.approx(lo, abs=1e-9)

    @given(st.floats(-6, 6))
    def test_quantile_round_trip(self, z):
        assert normal_quantile(normal_cdf(z)) == pytest.approx(z, abs=1e-7)

    @given(st.floats(1e-12, 1 - 1e-12))
    def test_quantile_accuracy(self, p):
        assert abs(normal_cdf(normal_quantile(p)) - p) <= 1e-9

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            normal_quantile(p)


class TestStudentT:
    def test_examples(self):
        assert student_t_cdf(0.0, 3.7) == 0.5
        assert student_t_cdf(0.162, 104) == pytest.approx(0.5642, abs=5e-5)
        assert 2 * (1 - student_t_cdf(0.162, 104)) == pytest.approx(0.872, abs=5e-4)
        assert student_t_cdf(-0.134, 104) == pytest.approx(0.4468, abs=5e-5)

    @pytest.mark.parametrize("t", [-20, -3.1, -0.5, 0.7, 2.0, 12.0])
    def test_closed_forms(self, t):
        assert student_t_cdf(t, 1) == pytest.approx(0.5 + math.atan(t) / math.pi, abs=1e-12)
        assert student_t_cdf(t, 2) == pytest.approx(0.5 + t / (2 * math.sqrt(2 + t * t)), abs=1e-12)

    def test_against_scipy(self):
        worst = 0.0
        for df in [0.5, 1, 3, 9, 19, 49, 104, 999, 1e5]:
            for t in np.linspace(-10, 10, 81):
                worst = max(worst, abs(student_t_cdf(t, df) - stats.t.cdf(t, df)))
        assert worst <= 1e-9

    @settings(max_examples=60, deadline=None)
    @given(st.floats(-4, 4))
    def test_large_df_approaches_normal(self, t):
        assert student_t_cdf(t, 1e6) == pytest.approx(normal_cdf(t), abs=1e-4)

    @pytest.mark.parametrize("df", [0, -2])
    def test_domain(self, df):
        with pytest.raises(DomainError):
            student_t_cdf(1.0, df)

    @pytest.mark.parametrize("p,df", [(0.975, 1), (0.975, 19), (0.999, 4), (0.6, 100), (0.01, 9)])
    def test_quantile(self, p, df):
        assert student_t_quantile(p, df) == pytest.approx(stats.t.ppf(p, df), rel=1e-10)
        assert student_t_cdf(student_t_quantile(p, df), df) == pytest.approx(p, abs=1e-12)


class TestBinomial:
    def test_examples(self):
        exact = Fraction(45, 1024)
        assert log_binomial_pmf(2, 10, 0.5) == pytest.approx(math.log(exact), abs=1e-14)
        assert log_binomial_pmf(0, 7, 0.0) == 0.0
        assert log_binomial_pmf(7, 7, 1.0) == 0.0
        ratio = math.exp(log_binomial_pmf(2, 10, 0.5) - log_binomial_pmf(2, 10, 0.7))
        exact_ratio = Fraction(1, 2) ** 10 / (Fraction(7, 10) ** 2 * Fraction(3, 10) ** 8)
        assert ratio == pytest.approx(float(exact_ratio), rel=1e-12)
        assert ratio == pytest.approx(30.38, abs=0.01)

    @pytest.mark.parametrize("n", [0, 1, 5, 17, 30])
    @pytest.mark.parametrize("theta", [0.0, 0.03, 0.5, 0.77, 1.0])
    def test_sums_to_one(self, n, theta):
        total = math.fsum(math.exp(log_binomial_pmf(k, n, theta)) for k in range(n + 1))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_impossible_outcomes(self):
        assert log_binomial_pmf(1, 3, 0.0) == -math.inf
        assert log_binomial_pmf(2, 3, 1.0) == -math.inf

    @pytest.mark.parametrize("args", [(3, 2, 0.5), (-1, 2, 0.5), (1, 2, 1.5), (1, 2, -0.1)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            log_binomial_pmf(*args)


class TestIntegrate:
    def test_examples(self):
        assert integrate(lambda x: 3 * x * x, 0, 1).value == pytest.approx(1.0, abs=1e-12)
        exact_b39 = math.factorial(2) * math.factorial(8) / math.factorial(11)
        r = integrate(lambda x: x**2 * (1 - x) ** 8, 0, 1)
        assert r.value == pytest.approx(exact_b39, rel=1e-12)
        assert r.value == pytest.approx(2.0202e-3, abs=1e-7)
        assert integrate(lambda x: math.exp(-x), 0, math.inf).value == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("a", range(1, 13))
    @pytest.mark.parametrize("b", [1, 2, 5, 9, 12])
    def test_beta_functions(self, a, b):
        exact = math.factorial(a - 1) * math.factorial(b - 1) / math.factorial(a + b - 1)
        r = integrate(lambda x: x ** (a - 1) * (1 - x) ** (b - 1), 0, 1, rel_tol=1e-12)
        assert r.value == pytest.approx(exact, rel=1e-9)
        assert math.exp(ln_beta(a, b)) == pytest.approx(exact, rel=1e-12)

    def test_result_invariants(self):
        r = integrate(math.sin, 0, math.pi)
        assert r.abs_error_estimate >= 0
        assert r.evaluations >= 1
        assert abs(r.value - 2.0) <= max(1e-10, r.abs_error_estimate)

    def test_other_infinite_domains(self):
        assert integrate(lambda x: math.exp(x), -math.inf, 0).value == pytest.approx(1.0, abs=1e-10)
        gauss = integrate(lambda x: math.exp(-x * x), -math.inf, math.inf)
        assert gauss.value == pytest.approx(math.sqrt(math.pi), abs=1e-10)

    def test_reversed_limits(self):
        assert integrate(lambda x: x, 1, 0).value == pytest.approx(-0.5, abs=1e-14)

    def test_nan_integrand(self):
        with pytest.raises(DomainError):
            integrate(lambda x: math.nan, 0, 1)

    def test_non_convergence(self):
        with pytest.raises(ConvergenceError):
            integrate(lambda x: math.sin(1 / x), 0, 1, tol=1e-14, max_intervals=20)

    def test_log_integral_survives_underflow(self):
        # integral of exp(-1000 - x^2/2) over R = exp(-1000) * sqrt(2 pi)
        value, res = integrate_log(lambda x: -1000.0 - 0.5 * x * x, -math.inf, math.inf)
        assert value == pytest.approx(-1000.0 + 0.5 * math.log(2 * math.pi), abs=1e-10)
        assert res.abs_error_estimate >= 0


class TestRng:
    def test_determinism(self):
        a = standard_normal_draws(RngStream(12345, 7), 5)
        b = standard_normal_draws(RngStream(12345, 7), 5)
        assert np.array_equal(a, b)

    def test_streams_and_seeds_differ(self):
        base = standard_normal_draws(RngStream(1, 0), 50)
        assert not np.array_equal(base, standard_normal_draws(RngStream(1, 1), 50))
        assert not np.array_equal(base, standard_normal_draws(RngStream(2, 0), 50))

    def test_prefix_consistency(self):
        long = standard_normal_draws(RngStream(9, 3), 100)
        assert np.array_equal(long[:10], standard_normal_draws(RngStream(9, 3), 10))

    def test_moments(self):
        x = standard_normal_draws(RngStream(2024, 0), 1_000_000)
        assert abs(x.mean()) <= 0.004
        assert abs(x.var(ddof=1) - 1.0) <= 0.005

    def test_streams_uncorrelated(self):
        x = standard_normal_draws(RngStream(5, 10), 100_000)
        y = standard_normal_draws(RngStream(5, 11), 100_000)
        assert abs(np.corrcoef(x, y)[0, 1]) <= 4 / math.sqrt(100_000)

    def test_empty_and_bad_inputs(self):
        assert standard_normal_draws(RngStream(0, 0), 0).size == 0
        with pytest.raises(DomainError):
            standard_normal_draws(RngStream(0, 0), -1)
        with pytest.raises(DomainError):
            RngStream(-1, 0)
        with pytest.raises(DomainError):
            RngStream(2**64, 0)
        RngStream(2**64 - 1, 2**64 - 1).generator()
