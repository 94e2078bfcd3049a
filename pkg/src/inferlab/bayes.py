"""Bayes factors from marginal likelihoods.

A marginal likelihood averages the likelihood of the data over a prior on
the parameter; the Bayes factor is the ratio of two of them. Marginals are
carried as logs throughout and only exponentiated for the final ratio.

Priors are small frozen dataclasses (:class:`Point`, :class:`Grid`,
:class:`Beta`, :class:`Normal`, :class:`HalfNormal`, :class:`Uniform`,
:class:`JZS`). Which priors an engine accepts depends on the parameter it
integrates over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from inferlab.errors import DomainError
from inferlab.numeric.quadrature import integrate_log
from inferlab.numeric.special import ln_beta, log_binomial_pmf, student_t_logpdf
from inferlab.stattests import EffectSummary

# Cauchy scale on standardized effect size used by default in the JZS t-test.
DEFAULT_JZS_SCALE = math.sqrt(2.0) / 2.0

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# Width, in posterior SDs, of the window integrated for normal-likelihood priors.
_WINDOW_SD = 40.0


@dataclass(frozen=True)
class Point:
    theta: float

    def describe(self) -> str:
        return f"point({self.theta:g})"


@dataclass(frozen=True)
class Grid:
    """Discrete prior: ``weights[i]`` on ``thetas[i]``."""

    thetas: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        thetas = tuple(float(t) for t in self.thetas)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "weights", weights)
        if not thetas or len(thetas) != len(weights):
            raise DomainError("grid needs equally many thetas and weights, at least one")
        if any(b <= a for a, b in zip(thetas, thetas[1:])):
            raise DomainError("grid thetas must be strictly increasing")
        if any(not w >= 0 for w in weights):
            raise DomainError("grid weights must be nonnegative")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise DomainError(f"grid weights must sum to 1, got {math.fsum(weights)!r}")

    @classmethod
    def uniform(cls, thetas: Sequence[float]) -> "Grid":
        m = len(thetas)
        return cls(tuple(thetas), (1.0 / m,) * m)

    def describe(self) -> str:
        return f"grid({len(self.thetas)} points on [{self.thetas[0]:g}, {self.thetas[-1]:g}])"


@dataclass(frozen=True)
class Beta:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError(f"beta prior needs a, b > 0, got ({self.a!r}, {self.b!r})")

    def describe(self) -> str:
        return f"beta({self.a:g}, {self.b:g})"


@dataclass(frozen=True)
class Normal:
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise DomainError(f"normal prior needs sd > 0, got {self.sd!r}")

    def describe(self) -> str:
        return f"normal({self.mean:g}, {self.sd:g})"


@dataclass(frozen=True)
class HalfNormal:
    """Normal(0, sd) folded onto ``[0, inf)``."""

    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise DomainError(f"half-normal prior needs sd > 0, got {self.sd!r}")

    def describe(self) -> str:
        return f"halfnormal({self.sd:g})"


@dataclass(frozen=True)
class Uniform:
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"uniform prior needs lo < hi, got ({self.lo!r}, {self.hi!r})")

    def describe(self) -> str:
        return f"uniform({self.lo:g}, {self.hi:g})"


@dataclass(frozen=True)
class JZS:
    """Cauchy(0, scale) prior on standardized effect size."""

    scale: float = DEFAULT_JZS_SCALE

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError(f"JZS scale must be positive, got {self.scale!r}")

    def describe(self) -> str:
        return f"cauchy(0, {self.scale:g})"


PriorSpec = Union[Point, Grid, Beta, Normal, HalfNormal, Uniform, JZS]


@dataclass(frozen=True)
class BayesFactorResult:
    bf10: float
    log_m1: float
    log_m0: float
    model0: str
    model1: str

    @property
    def log_bf10(self) -> float:
        return self.log_m1 - self.log_m0

    @property
    def bf01(self) -> float:
        return math.exp(self.log_m0 - self.log_m1)


def _result(log_m1: float, log_m0: float, model0: str, model1: str) -> BayesFactorResult:
    if log_m0 == -math.inf and log_m1 == -math.inf:
        raise DomainError("data are impossible under both models")
    return BayesFactorResult(math.exp(log_m1 - log_m0), log_m1, log_m0, model0, model1)


def _logsumexp(values: Sequence[float]) -> float:
    top = max(values)
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(math.exp(v - top) for v in values))


# -- binomial data ----------------------------------------------------------


def log_marginal_binomial(k: int, n: int, prior: PriorSpec) -> float:
    """Log marginal probability of ``k`` successes in ``n`` trials under ``prior``."""
    if isinstance(prior, Point):
        return log_binomial_pmf(k, n, prior.theta)
    if isinstance(prior, Grid):
        if prior.thetas[0] < 0.0 or prior.thetas[-1] > 1.0:
            raise DomainError("grid prior for a binomial rate must lie within [0, 1]")
        terms = [math.log(w) + log_binomial_pmf(k, n, t) for t, w in zip(prior.thetas, prior.weights) if w > 0]
        return _logsumexp(terms)
    if isinstance(prior, Beta):
        const = math.log(math.comb(n, k)) - ln_beta(prior.a, prior.b)
        return const + _log_beta_kernel_integral(k + prior.a, n - k + prior.b)
    if isinstance(prior, Uniform):
        if prior.lo < 0.0 or prior.hi > 1.0:
            raise DomainError("uniform prior for a binomial rate must lie within [0, 1]")
        log_density = -math.log(prior.hi - prior.lo)
        value, _ = integrate_log(lambda th: log_binomial_pmf(k, n, th) + log_density, prior.lo, prior.hi)
        return value
    raise DomainError(f"{prior.describe()} is not a prior on a binomial rate")


def _log_pow(c: float, x: float) -> float:
    """``c * log(x)`` with ``0 ** 0 = 1``."""
    if c == 0.0:
        return 0.0
    if x <= 0.0:
        return -math.inf if c > 0.0 else math.inf
    return c * math.log(x)


def _log_beta_kernel_integral(alpha: float, beta: float) -> float:
    """Log of the integral of ``theta**(alpha-1) * (1-theta)**(beta-1)`` over [0, 1], by quadrature.

    Each half of [0, 1] is integrated in ``t``, the distance to its own
    endpoint. When that endpoint is singular (exponent below zero) the half is
    integrated in ``u = t**near`` instead, which turns the integrand smooth.
    """
    halves = []
    for near, far in ((alpha, beta), (beta, alpha)):
        if near >= 1.0:

            def log_f(t, near=near, far=far):
                return _log_pow(near - 1.0, t) + (far - 1.0) * math.log1p(-t)

            value, _ = integrate_log(log_f, 0.0, 0.5)
        else:

            def log_f(u, near=near, far=far):
                return (far - 1.0) * math.log1p(-(u ** (1.0 / near))) - math.log(near)

            value, _ = integrate_log(log_f, 0.0, 0.5**near)
        halves.append(value)
    return _logsumexp(halves)


def bf_binomial(k: int, n: int, null: PriorSpec = Point(0.5), alt: PriorSpec = Beta(1.0, 1.0)) -> BayesFactorResult:
    """Bayes factor for ``alt`` over ``null`` after ``k`` successes in ``n`` trials.

    Point and grid priors are summed exactly; beta and uniform priors are
    integrated numerically.
    """
    if n < 0 or not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got k={k}, n={n}")
    log_m0 = log_marginal_binomial(k, n, null)
    log_m1 = log_marginal_binomial(k, n, alt)
    return _result(log_m1, log_m0, null.describe(), alt.describe())


# -- default (JZS) t-test ----------------------------------------------------


def _t_design(n1: int, n2: Optional[int]) -> tuple[float, float]:
    if n1 < 2:
        raise DomainError(f"n1 must be >= 2, got {n1}")
    if n2 is None:
        return float(n1), float(n1 - 1)
    if n2 < 2:
        raise DomainError(f"n2 must be >= 2, got {n2}")
    return n1 * n2 / (n1 + n2), float(n1 + n2 - 2)


def jzs_log_integrand(g: float, t: float, n_eff: float, df: float, scale: float) -> float:
    """Log of the integrand over the mixing variable ``g`` in the JZS marginal.

    ``g`` carries an inverse-gamma(1/2, 1/2) density and the effect-size
    variance is ``scale**2 * g``. Shares its constant with
    :func:`jzs_log_null`.
    """
    if g <= 0.0:
        return -math.inf
    spread = 1.0 + n_eff * g * scale * scale
    return (
        -0.5 * math.log(spread)
        - 0.5 * (df + 1.0) * math.log1p(t * t / (spread * df))
        - _LOG_SQRT_2PI
        - 1.5 * math.log(g)
        - 0.5 / g
    )


def jzs_log_null(t: float, df: float) -> float:
    return -0.5 * (df + 1.0) * math.log1p(t * t / df)


def bf_jzs_t(t: float, n1: int, n2: Optional[int] = None, scale: float = DEFAULT_JZS_SCALE) -> BayesFactorResult:
    """Default Bayesian t-test: Cauchy(0, ``scale``) prior on effect size.

    One-sample when ``n2`` is None (N = n1, df = n1 - 1), otherwise two
    independent groups (N = n1 n2 / (n1 + n2), df = n1 + n2 - 2).
    Both marginals are reported as log densities of the observed t.
    """
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale!r}")
    if not math.isfinite(t):
        raise DomainError(f"t must be finite, got {t!r}")
    n_eff, df = _t_design(n1, n2)
    # add the central-t normalising constant so log_m0 is the H0 density of t
    const = student_t_logpdf(0.0, df)
    log_m0 = jzs_log_null(t, df) + const
    log_int, _ = integrate_log(lambda g: jzs_log_integrand(g, t, n_eff, df, scale), 0.0, math.inf)
    log_m1 = log_int + const
    design = "one-sample" if n2 is None else "two-sample"
    return _result(log_m1, log_m0, f"delta = 0 ({design} t, df={df:g})", f"delta ~ {JZS(scale).describe()}")


def bf_width_curve(
    t: float, n1: int, n2: Optional[int], scales: Sequence[float]
) -> list[tuple[float, float]]:
    """``(scale, bf10)`` pairs of the JZS Bayes factor across prior widths."""
    scales = [float(s) for s in scales]
    if not scales:
        raise DomainError("scales must not be empty")
    if any(b <= a for a, b in zip(scales, scales[1:])):
        raise DomainError("scales must be strictly increasing")
    return [(s, bf_jzs_t(t, n1, n2, s).bf10) for s in scales]


# -- informed priors on a raw effect ------------------------------------------


def _normal_logpdf(x: float, mean: float, sd: float) -> float:
    z = (x - mean) / sd
    return -0.5 * z * z - math.log(sd) - _LOG_SQRT_2PI


def _window(centre: float, width: float, lo: float, hi: float) -> tuple[float, float]:
    a = max(lo, centre - width)
    b = min(hi, centre + width)
    if a < b:
        return a, b
    # mass sits outside the support; integrate a strip beside the nearer edge
    if centre <= lo:
        return lo, min(hi, lo + width)
    return max(lo, hi - width), hi


def bf_informed_effect(summary: EffectSummary, alt: PriorSpec) -> BayesFactorResult:
    """Bayes factor for an effect prior against ``delta = 0``.

    The likelihood of the observed effect is normal with SD equal to its
    standard error (large-df approximation to the t likelihood).
    """
    e, se = summary.effect, summary.se

    def log_lik(delta):
        return _normal_logpdf(e, delta, se)

    if isinstance(alt, (Normal, HalfNormal)):
        mean = alt.mean if isinstance(alt, Normal) else 0.0
        prec = 1.0 / (se * se) + 1.0 / (alt.sd * alt.sd)
        post_mean = (e / (se * se) + mean / (alt.sd * alt.sd)) / prec
        post_sd = 1.0 / math.sqrt(prec)
        if isinstance(alt, Normal):
            lo, hi = _window(post_mean, _WINDOW_SD * post_sd, -math.inf, math.inf)
            log_prior_const = 0.0
        else:
            lo, hi = _window(post_mean, _WINDOW_SD * post_sd, 0.0, math.inf)
            log_prior_const = math.log(2.0)

        def log_integrand(delta):
            return log_lik(delta) + _normal_logpdf(delta, mean, alt.sd) + log_prior_const

    elif isinstance(alt, Uniform):
        lo, hi = _window(e, _WINDOW_SD * se, alt.lo, alt.hi)
        log_density = -math.log(alt.hi - alt.lo)

        def log_integrand(delta):
            return log_lik(delta) + log_density

    else:
        raise DomainError(f"{alt.describe()} is not an informed effect prior (normal, halfnormal, uniform)")

    log_m1, _ = integrate_log(log_integrand, lo, hi)
    log_m0 = log_lik(0.0)
    return _result(log_m1, log_m0, "delta = 0", f"delta ~ {alt.describe()}")


def grid_prior_from_rows(rows: Sequence[Sequence[float]]) -> Grid:
    """Build a :class:`Grid` from ``(theta, weight)`` rows, sorted by theta."""
    pairs = sorted((float(t), float(w)) for t, w in rows)
    arr = np.array(pairs, dtype=float).reshape(-1, 2)
    return Grid(tuple(arr[:, 0]), tuple(arr[:, 1]))
