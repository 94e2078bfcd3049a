"""Adaptive Gauss-Kronrod (7/15 point) quadrature with interval bisection.

Infinite limits are mapped onto the unit interval with ``x = a + u / (1 - u)``
and the matching Jacobian, so every integral ends up on a finite range.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

from inferlab.errors import ConvergenceError, DomainError

# Kronrod abscissae (positive half, descending) and weights; the Gauss
# 7-point nodes are the odd-indexed entries.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

DEFAULT_TOL = 1e-10
_TINY = 1e-300


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def _checked(f: Callable[[float], float], x: float) -> float:
    y = f(x)
    if not math.isfinite(y):
        raise DomainError(f"integrand is not finite at x={x!r} (got {y!r})")
    return y


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = _checked(f, centre)
    kronrod = _WGK[7] * fc
    gauss = _WG[3] * fc
    for j in range(7):
        dx = half * _XGK[j]
        pair = _checked(f, centre - dx) + _checked(f, centre + dx)
        kronrod += _WGK[j] * pair
        if j % 2 == 1:
            gauss += _WG[j // 2] * pair
    return kronrod * half, abs((kronrod - gauss) * half)


def _map_to_finite(f, a: float, b: float):
    """Return an integrand and finite limits equivalent to ``f`` on ``[a, b]``.

    A node that rounds onto u == 1 sits at infinity, where an integrable
    tail contributes nothing.
    """
    if math.isfinite(a) and math.isfinite(b):
        return f, a, b
    if math.isfinite(a):  # [a, inf)
        def g(u):
            w = 1.0 - u
            if w <= 0.0:
                return 0.0
            return f(a + u / w) / (w * w)
        return g, 0.0, 1.0
    if math.isfinite(b):  # (-inf, b]
        def g(u):
            w = 1.0 - u
            if w <= 0.0:
                return 0.0
            return f(b - u / w) / (w * w)
        return g, 0.0, 1.0

    def g(u):  # (-inf, inf): fold onto [0, inf)
        w = 1.0 - u
        if w <= 0.0:
            return 0.0
        x = u / w
        return (f(x) + f(-x)) / (w * w)
    return g, 0.0, 1.0


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    rel_tol: float = 0.0,
    max_intervals: int = 4000,
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]``; either limit may be infinite.

    The interval with the largest error estimate is bisected until the summed
    estimate drops below ``max(tol, rel_tol * |value|)``.

    Raises
    ------
    ConvergenceError
        If ``max_intervals`` subintervals are not enough.
    DomainError
        For bad limits or a non-finite integrand value.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    if math.isnan(a) or math.isnan(b):
        raise DomainError("integration limits must not be NaN")
    if a == b:
        return QuadratureResult(0.0, 0.0, 1)
    if a > b:
        r = integrate(f, b, a, tol, rel_tol, max_intervals)
        return QuadratureResult(-r.value, r.abs_error_estimate, r.evaluations)

    g, lo, hi = _map_to_finite(f, a, b)
    value, err = _gk15(g, lo, hi)
    evaluations = 15
    # max-heap on error
    heap = [(-err, lo, hi, value)]
    total, total_err = value, err
    while True:
        if total_err <= max(tol, rel_tol * abs(total)):
            # running sums drift; confirm with exact sums before returning
            total = math.fsum(item[3] for item in heap)
            total_err = math.fsum(-item[0] for item in heap)
            if total_err <= max(tol, rel_tol * abs(total)):
                return QuadratureResult(total, total_err, evaluations)
        if len(heap) >= max_intervals:
            raise ConvergenceError(
                f"quadrature error estimate {total_err:.3g} exceeds tolerance after "
                f"{len(heap)} subintervals"
            )
        neg_e, x0, x1, v_old = heapq.heappop(heap)
        mid = 0.5 * (x0 + x1)
        if not x0 < mid < x1:
            raise ConvergenceError("quadrature subinterval collapsed below floating-point resolution")
        total -= v_old
        total_err += neg_e
        for s0, s1 in ((x0, mid), (mid, x1)):
            v, e = _gk15(g, s0, s1)
            heapq.heappush(heap, (-e, s0, s1, v))
            total += v
            total_err += e
        evaluations += 30


def integrate_log(
    log_f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    scan_points: int = 257,
    max_intervals: int = 4000,
) -> tuple[float, QuadratureResult]:
    """Log of ``integral exp(log_f(x)) dx`` over ``[a, b]``.

    The integrand is rescaled by its largest value on a scan grid before
    integrating, so the answer survives magnitudes far outside the float
    range. ``tol`` is relative. Returns the log-integral and the result for
    the rescaled integral.
    """

    def safe_log_f(x):
        v = log_f(x)
        if math.isnan(v):
            raise DomainError(f"log-integrand is NaN at x={x!r}")
        return v

    if math.isfinite(a) and math.isfinite(b):
        xs = [a + (b - a) * (i + 0.5) / scan_points for i in range(scan_points)]
    else:
        us = [(i + 0.5) / scan_points for i in range(scan_points)]
        if math.isfinite(a):
            xs = [a + u / (1.0 - u) for u in us]
        elif math.isfinite(b):
            xs = [b - u / (1.0 - u) for u in us]
        else:
            xs = [u / (1.0 - u) for u in us] + [-u / (1.0 - u) for u in us]
    shift = max(safe_log_f(x) for x in xs)
    if shift == -math.inf:
        raise DomainError("log-integrand is -inf on the whole scan grid")

    def scaled(x):
        v = safe_log_f(x) - shift
        return math.exp(v) if v > -745.0 else 0.0

    # the rescaled integral can be arbitrarily small, so only a relative test is meaningful
    res = integrate(scaled, a, b, tol=_TINY, rel_tol=tol, max_intervals=max_intervals)
    if res.value <= 0.0:
        return -math.inf, res
    return math.log(res.value) + shift, res
