"""Acceptance criteria, one test per criterion.

Each test checks every number in its criterion at the stated tolerance.
The terminal summary prints one PASS/FAIL line per criterion.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from inferlab.bayes import Beta, Grid, HalfNormal, Point, bf_binomial, bf_informed_effect, bf_jzs_t
from inferlab.numeric.special import normal_cdf, student_t_cdf
from inferlab.reproduce import examples_table
from inferlab.severity import just_significant_mean, severity_below, severity_exceeds
from inferlab.simulate import (
    SimConfig,
    anova_effect_count,
    familywise_analytic,
    ks_uniformity,
    simulate_family,
    simulate_optional_stopping,
    simulate_pcurve,
)
from inferlab.stattests import EffectSummary, ZSummary, tost, z_test

SEED = 1
REPS = 10_000
REPLICATION = EffectSummary(5.47, 33.77, 104)


def _iq(x_bar, n=100):
    return ZSummary(x_bar, 100.0, 15.0, n)


def _closed_form(summary, gamma):
    return norm.cdf((summary.x_bar - (summary.mu0 + gamma)) / (summary.sigma / math.sqrt(summary.n)))


@pytest.mark.criterion(1, "severity worked examples")
def test_criterion_01_severity():
    js500 = _iq(just_significant_mean(100, 15, 500, 0.025), 500)
    cases = [
        (severity_exceeds(_iq(103), 1), 0.91, 0.9088, _closed_form(_iq(103), 1)),
        (severity_exceeds(_iq(103), 3), 0.50, 0.5, _closed_form(_iq(103), 3)),
        (severity_exceeds(_iq(105), 3), 0.91, 0.9088, _closed_form(_iq(105), 3)),
        (severity_below(_iq(102), 5), 0.98, 0.9772, 1 - _closed_form(_iq(102), 5)),
        (severity_below(_iq(102), 3), 0.75, 0.7475, 1 - _closed_form(_iq(102), 3)),
        (severity_exceeds(js500, 1), 0.68, 0.6806, _closed_form(js500, 1)),
        (severity_exceeds(js500, 0.5), 0.89, 0.8878, _closed_form(js500, 0.5)),
    ]
    for res, two_digit, four_digit, oracle in cases:
        assert abs(res.severity - two_digit) <= 0.005
        assert abs(res.severity - four_digit) <= 0.005
        assert abs(res.severity - oracle) <= 1e-9


@pytest.mark.criterion(2, "coin-flip Bayes factors")
def test_criterion_02_coin():
    assert abs(bf_binomial(2, 10, Point(0.5), Point(0.7)).bf01 - 30.38) <= 0.01
    assert abs(bf_binomial(2, 10, Point(0.5), Beta(1, 1)).bf10 - 2.07) <= 0.01
    for (a, b), published in [((0.9, 0.9), 0.5), ((5, 1), 8.78), ((10, 10), 0.66)]:
        res = bf_binomial(2, 10, Point(0.5), Beta(a, b))
        assert abs(res.bf01 - published) <= 0.05
        # exact Beta-function arithmetic: B(k+a, n-k+b) / B(a, b) over 0.5**n
        exact_m1 = math.exp(
            math.lgamma(2 + a) + math.lgamma(8 + b) - math.lgamma(10 + a + b)
            - math.lgamma(a) - math.lgamma(b) + math.lgamma(a + b)
        )
        assert abs(res.bf10 / (exact_m1 / 0.5**10) - 1) <= 1e-9
    exact = Fraction(1, 2) ** 10 / (Fraction(7, 10) ** 2 * Fraction(3, 10) ** 8)
    assert abs(bf_binomial(2, 10, Point(0.5), Point(0.7)).bf01 - float(exact)) <= 1e-9


def _jzs_riemann(t, n1, n2, scale, points=200_001):
    # trapezoid rule in s = log g; the integrand decays at both ends of [-40, 40]
    n_eff = n1 * n2 / (n1 + n2)
    df = n1 + n2 - 2
    s = np.linspace(-40.0, 40.0, points)
    g = np.exp(s)
    spread = 1 + n_eff * g * scale**2
    log_f = (
        -0.5 * np.log(spread)
        - (df + 1) / 2 * np.log1p(t * t / (spread * df))
        - 0.5 * np.log(2 * np.pi)
        - 1.5 * s
        - 0.5 / g
        + s
    )
    m1 = np.trapezoid(np.exp(log_f), s)
    m0 = (1 + t * t / df) ** (-(df + 1) / 2)
    return m1 / m0


@pytest.mark.criterion(3, "JZS default t-test")
def test_criterion_03_jzs():
    res = bf_jzs_t(0.162, 53, 53)
    assert abs(res.bf10 - 0.21) <= 0.02
    oracle = _jzs_riemann(0.162, 53, 53, math.sqrt(2) / 2)
    assert abs(res.bf10 / oracle - 1) <= 1e-6


@pytest.mark.criterion(4, "informed-prior reanalysis")
def test_criterion_04_informed():
    assert abs(bf_informed_effect(REPLICATION, HalfNormal(13.3)).bf10 - 0.97) <= 0.05


@pytest.mark.criterion(5, "TOST equivalence")
def test_criterion_05_tost():
    res = tost(REPLICATION, -10, 10)
    assert abs(res.upper_test.statistic - (-0.13)) <= 0.01
    assert abs(res.overall_p - 0.45) <= 0.01


@pytest.mark.criterion(6, "optional stopping")
def test_criterion_06_stopping():
    start = time.perf_counter()
    rep = simulate_optional_stopping(10, 1, 1000, SimConfig(seed=SEED, reps=REPS, alpha=0.05))
    elapsed = time.perf_counter() - start
    assert abs(rep.significant_rate - 0.46) <= 0.02
    assert abs(rep.median_n_significant - 56) <= 10
    assert elapsed < 60


@pytest.mark.criterion(7, "familywise error rates")
def test_criterion_07_familywise():
    assert abs(familywise_analytic(10, 0.05) - float(1 - Fraction(95, 100) ** 10)) <= 1e-15
    assert abs(familywise_analytic(3, 0.05) - float(1 - Fraction(95, 100) ** 3)) <= 1e-15
    assert round(familywise_analytic(10, 0.05), 4) == 0.4013
    assert round(familywise_analytic(3, 0.05), 4) == 0.1426
    cfg = SimConfig(seed=SEED, reps=REPS)
    for k in (10, anova_effect_count(2)):
        rate = familywise_analytic(k, 0.05)
        assert abs(simulate_family(k, cfg).empirical_rate - rate) <= 3 * math.sqrt(rate * (1 - rate) / REPS)
    k = anova_effect_count(4)
    assert k == 15
    assert abs(simulate_family(k, cfg).empirical_rate - 0.537) <= 0.015


@pytest.mark.criterion(8, "null p-value uniformity")
def test_criterion_08_null_uniformity():
    rep = simulate_pcurve(0.0, 50, SimConfig(seed=SEED, reps=REPS))
    d, p = ks_uniformity(rep.p_values)
    assert p > 0.01
    assert abs(rep.rejection_rate - 0.05) <= 0.0065


_summaries = st.builds(ZSummary, st.floats(-100, 100), st.floats(-100, 100), st.floats(0.1, 50), st.integers(1, 5000))
_binomial_priors = st.one_of(
    st.builds(Point, st.floats(0.01, 0.99)), st.builds(Beta, st.floats(0.2, 20), st.floats(0.2, 20))
)


@settings(deadline=None, max_examples=200)
@given(_summaries, st.floats(-50, 50))
def _severity_properties(summary, gamma):
    exceeds = severity_exceeds(summary, gamma).severity
    assert abs(exceeds + severity_below(summary, gamma).severity - 1) <= 1e-12
    shifted = ZSummary(summary.x_bar, summary.mu0 + gamma, summary.sigma, summary.n)
    assert abs(exceeds - (1 - z_test(shifted, "greater").p)) <= 1e-12


@settings(deadline=None, max_examples=100)
@given(_binomial_priors, _binomial_priors, st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def _bf_properties(p0, p1, k1, f1, k2, f2):
    n1, n2 = k1 + f1, k2 + f2
    ab, ba = bf_binomial(k1, n1, p0, p1), bf_binomial(k1, n1, p1, p0)
    assert abs(ab.log_bf10 + ba.log_bf10) <= 1e-10
    if isinstance(p1, Beta):
        whole = bf_binomial(k1 + k2, n1 + n2, Point(0.5), p1).log_bf10
        updated = Beta(p1.a + k1, p1.b + f1)
        parts = bf_binomial(k1, n1, Point(0.5), p1).log_bf10 + bf_binomial(k2, n2, Point(0.5), updated).log_bf10
        assert abs(whole - parts) <= 1e-10


@settings(deadline=None, max_examples=200)
@given(st.floats(-8, 8))
def _t_normal_agreement(x):
    assert abs(student_t_cdf(x, 1e6) - normal_cdf(x)) <= 1e-4


@pytest.mark.criterion(9, "property suites")
def test_criterion_09_properties():
    _severity_properties()
    _bf_properties()
    m = 2001
    grid = Grid.uniform([(i + 0.5) / m for i in range(m)])
    assert abs(bf_binomial(2, 10, Point(0.5), grid).bf10 - bf_binomial(2, 10).bf10) <= 0.01
    cfg = SimConfig(seed=SEED, reps=2000)
    for workers in (2, 4):
        a, b = simulate_pcurve(0.5, 30, cfg, 1), simulate_pcurve(0.5, 30, cfg, workers)
        assert a == b and np.array_equal(a.p_values, b.p_values)
        assert simulate_optional_stopping(10, 1, 300, cfg, 1) == simulate_optional_stopping(10, 1, 300, cfg, workers)
        assert simulate_family(15, cfg, 1) == simulate_family(15, cfg, workers)
    _t_normal_agreement()


@pytest.mark.criterion(10, "examples table reproduces every anchor")
def test_criterion_10_examples_table():
    out = examples_table(seed=SEED, reps=REPS)
    rows = out.tables[0].rows
    failing = [r["id"] for r in rows if not r["pass"]]
    assert not failing, failing
    assert out.notes["all_pass"] is True
    ids = {r["id"] for r in rows}
    for needed in ("sev_xbar103_mu101", "coin_beta_1_1", "jzs_replication", "informed_replication", "tost_p",
                   "stopping_rate", "stopping_median_n", "family_10_analytic", "family_15_empirical", "null_ks_p"):
        assert needed in ids
    for r in rows:
        assert r["abs_diff"] == pytest.approx(abs(r["recomputed"] - r["anchor"]))
