"""Frequentist tests on summary statistics: z-test, t-tests and TOST."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from inferlab.errors import DomainError
from inferlab.numeric.special import normal_cdf, normal_sf, student_t_cdf, student_t_sf


class Tail(str, Enum):
    GREATER = "greater"
    LESS = "less"
    TWO_SIDED = "two_sided"


@dataclass(frozen=True)
class ZSummary:
    """One-sample z-test scenario with a known population SD."""

    x_bar: float
    mu0: float
    sigma: float
    n: int

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma!r}")
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n!r}")

    @property
    def standard_error(self) -> float:
        return self.sigma / math.sqrt(self.n)


@dataclass(frozen=True)
class EffectSummary:
    """An effect estimate with its standard error and degrees of freedom."""

    effect: float
    se: float
    df: float

    def __post_init__(self):
        if not self.se > 0:
            raise DomainError(f"se must be positive, got {self.se!r}")
        if not self.df > 0:
            raise DomainError(f"df must be positive, got {self.df!r}")


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p: float
    tail: Tail
    df: Optional[float] = None

    __test__ = False  # keep pytest from collecting this class


@dataclass(frozen=True)
class EquivalenceResult:
    lower_test: TestResult
    upper_test: TestResult
    overall_p: float
    bounds: tuple[float, float]

    def equivalent(self, alpha: float = 0.05) -> bool:
        """True when both one-sided nulls are rejected at level ``alpha``."""
        return self.overall_p <= alpha


def _p_value(upper: float, lower: float, tail: Tail) -> float:
    # upper = P(stat >= observed), lower = P(stat <= observed)
    tail = Tail(tail)
    if tail is Tail.GREATER:
        return upper
    if tail is Tail.LESS:
        return lower
    return min(1.0, 2.0 * min(upper, lower))


def z_test(summary: ZSummary, tail: Tail | str = Tail.GREATER) -> TestResult:
    z = (summary.x_bar - summary.mu0) / summary.standard_error
    p = _p_value(normal_sf(z), normal_cdf(z), Tail(tail))
    return TestResult(statistic=z, p=p, tail=Tail(tail))


def _t_result(t: float, df: float, tail: Tail | str) -> TestResult:
    p = _p_value(student_t_sf(t, df), student_t_cdf(t, df), Tail(tail))
    return TestResult(statistic=t, p=p, tail=Tail(tail), df=df)


def t_test_one_sample(data: Sequence[float], mu0: float = 0.0, tail: Tail | str = Tail.TWO_SIDED) -> TestResult:
    """Student one-sample t-test of ``mean(data) == mu0``."""
    n = len(data)
    if n < 2:
        raise DomainError(f"t-test needs at least 2 observations, got {n}")
    mean = math.fsum(data) / n
    ss = math.fsum((x - mean) ** 2 for x in data)
    if ss <= 0.0:
        raise DomainError("t-test is undefined for a sample with zero variance")
    sd = math.sqrt(ss / (n - 1))
    return _t_result((mean - mu0) / (sd / math.sqrt(n)), n - 1, tail)


def t_test_from_summary(summary: EffectSummary, null_value: float = 0.0, tail: Tail | str = Tail.TWO_SIDED) -> TestResult:
    return _t_result((summary.effect - null_value) / summary.se, summary.df, tail)


def tost(summary: EffectSummary, lower: float, upper: float) -> EquivalenceResult:
    """Two one-sided tests for equivalence within ``[lower, upper]``.

    The lower test rejects ``mu <= lower``, the upper test rejects
    ``mu >= upper``; the overall p value is the larger of the two.
    """
    if not lower < upper:
        raise DomainError(f"equivalence bounds must satisfy lower < upper, got ({lower}, {upper})")
    lower_test = t_test_from_summary(summary, lower, Tail.GREATER)
    upper_test = t_test_from_summary(summary, upper, Tail.LESS)
    return EquivalenceResult(
        lower_test=lower_test,
        upper_test=upper_test,
        overall_p=max(lower_test.p, upper_test.p),
        bounds=(lower, upper),
    )
