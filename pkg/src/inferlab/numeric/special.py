"""Special functions: log-gamma, incomplete beta, normal and Student-t
distribution functions, and the binomial log-pmf.

Everything here works on Python floats via :mod:`math`; the functions are
cheap enough to call per replication inside the simulators.
"""

from __future__ import annotations

import math
from statistics import NormalDist

from inferlab.errors import ConvergenceError, DomainError

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAXIT = 20000

# Past this many degrees of freedom the t and normal CDFs differ by < 1e-10.
_T_NORMAL_CUTOFF_DF = 1e10

_STD_NORMAL = NormalDist()


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0 or math.isinf(x):
        raise DomainError(f"ln_gamma requires a finite x > 0, got {x!r}")
    if x < 0.5:
        # reflection keeps the series argument >= 0.5
        return math.log(math.pi / math.sin(math.pi * x)) - ln_gamma(1.0 - x)
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(acc)


def ln_beta(a: float, b: float) -> float:
    """``ln B(a, b)`` for positive ``a`` and ``b``."""
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ConvergenceError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _betainc(a: float, b: float, x: float, y: float) -> float:
    # y == 1 - x, supplied separately so callers can keep it exact near x = 1
    if x == 0.0:
        return 0.0
    if y == 0.0:
        return 1.0
    log_front = a * math.log(x) + b * math.log(y) - ln_beta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _beta_cf(b, a, y) / b


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``.

    Uses the continued fraction of the incomplete beta integral, switching to
    ``1 - I_{1-x}(b, a)`` when ``x > (a + 1) / (a + b + 2)`` so the fraction
    always converges quickly.
    """
    if not (a > 0 and b > 0):
        raise DomainError(f"incomplete beta requires a > 0 and b > 0, got a={a!r}, b={b!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"incomplete beta requires 0 <= x <= 1, got x={x!r}")
    return min(1.0, max(0.0, _betainc(a, b, x, 1.0 - x)))


def normal_cdf(z: float) -> float:
    """Standard normal CDF, accurate in both tails."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_sf(z: float) -> float:
    """Standard normal upper-tail probability ``1 - Phi(z)``."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def normal_quantile(p: float) -> float:
    """Inverse of :func:`normal_cdf` on the open unit interval."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal_quantile requires 0 < p < 1, got {p!r}")
    return _STD_NORMAL.inv_cdf(p)


def _t_tail(t: float, df: float) -> float:
    """P(T > |t|) for a central t variable with ``df`` degrees of freedom."""
    t2 = t * t
    x = df / (df + t2)
    y = t2 / (df + t2)
    return 0.5 * _betainc(0.5 * df, 0.5, x, y)


def student_t_cdf(t: float, df: float) -> float:
    """Central Student-t CDF, evaluated through the incomplete beta function."""
    if not df > 0:
        raise DomainError(f"student_t_cdf requires df > 0, got {df!r}")
    if math.isnan(t):
        raise DomainError("student_t_cdf got NaN")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    if df > _T_NORMAL_CUTOFF_DF:
        return normal_cdf(t)
    tail = _t_tail(t, df)
    return 1.0 - tail if t > 0 else tail


def student_t_sf(t: float, df: float) -> float:
    """Upper-tail probability ``1 - F(t)``; keeps precision for large ``t``."""
    return student_t_cdf(-t, df)


def student_t_logpdf(t: float, df: float) -> float:
    """Log density of the central Student-t distribution."""
    if not df > 0:
        raise DomainError(f"student_t_logpdf requires df > 0, got {df!r}")
    return (
        ln_gamma(0.5 * (df + 1.0))
        - ln_gamma(0.5 * df)
        - 0.5 * math.log(df * math.pi)
        - 0.5 * (df + 1.0) * math.log1p(t * t / df)
    )


def student_t_quantile(p: float, df: float) -> float:
    """Inverse Student-t CDF by safeguarded Newton iteration."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"student_t_quantile requires 0 < p < 1, got {p!r}")
    if not df > 0:
        raise DomainError(f"student_t_quantile requires df > 0, got {df!r}")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -student_t_quantile(1.0 - p, df)

    lo, hi = 0.0, 1.0
    while student_t_cdf(hi, df) < p:
        lo, hi = hi, 2.0 * hi
    t = min(max(normal_quantile(p), lo), hi)
    for _ in range(200):
        f = student_t_cdf(t, df) - p
        if f > 0:
            hi = t
        else:
            lo = t
        step = f / math.exp(student_t_logpdf(t, df))
        t_new = t - step
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= 1e-14 * max(1.0, abs(t)):
            return t_new
        t = t_new
    return t


def log_binomial_pmf(k: int, n: int, theta: float) -> float:
    """``ln P(K = k)`` for ``K ~ Binomial(n, theta)``, with ``0 * ln 0 = 0``."""
    if n < 0 or not 0 <= k <= n:
        raise DomainError(f"log_binomial_pmf requires 0 <= k <= n, got k={k!r}, n={n!r}")
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"log_binomial_pmf requires theta in [0, 1], got {theta!r}")
    out = math.log(math.comb(n, k))
    if k:
        if theta == 0.0:
            return -math.inf
        out += k * math.log(theta)
    if n - k:
        if theta == 1.0:
            return -math.inf
        out += (n - k) * math.log1p(-theta)
    return out
