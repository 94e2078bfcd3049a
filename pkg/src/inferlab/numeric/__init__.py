"""Numerical foundation: special functions, quadrature and keyed RNG streams."""

from inferlab.numeric.quadrature import QuadratureResult, integrate, integrate_log
from inferlab.numeric.rng import RngStream, standard_normal_draws
from inferlab.numeric.special import (
    ln_beta,
    ln_gamma,
    log_binomial_pmf,
    normal_cdf,
    normal_quantile,
    normal_sf,
    regularized_incomplete_beta,
    student_t_cdf,
    student_t_logpdf,
    student_t_quantile,
    student_t_sf,
)

__all__ = [
    "QuadratureResult",
    "RngStream",
    "integrate",
    "integrate_log",
    "ln_beta",
    "ln_gamma",
    "log_binomial_pmf",
    "normal_cdf",
    "normal_quantile",
    "normal_sf",
    "regularized_incomplete_beta",
    "standard_normal_draws",
    "student_t_cdf",
    "student_t_logpdf",
    "student_t_quantile",
    "student_t_sf",
]
