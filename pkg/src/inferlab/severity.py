"""Post-data severity for directional claims about a normal mean (known SD).

A claim is ``mu > mu0 + gamma`` ("exceeds") or ``mu < mu0 + gamma``
("below"). Its severity is the probability that the test would have given a
result less in accord with the claim, were ``mu`` exactly ``mu0 + gamma``::

    SEV(mu > mu0 + gamma) = Phi((x_bar - (mu0 + gamma)) / (sigma / sqrt(n)))
    SEV(mu < mu0 + gamma) = Phi(((mu0 + gamma) - x_bar) / (sigma / sqrt(n)))

Note the standardisation covers the whole difference ``x_bar - (mu0 + gamma)``.
Dividing only ``mu0 + gamma`` by the standard error gives meaningless values.

``severity_below`` is normally used after a non-significant result, but no
significance gate is enforced here; that is left to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from inferlab.errors import DomainError
from inferlab.numeric.special import normal_cdf, normal_quantile, normal_sf
from inferlab.stattests import ZSummary

DEFAULT_GRID_POINTS = 201
DEFAULT_GRID_HALF_WIDTH_SE = 6.0


class Direction(str, Enum):
    EXCEEDS = "exceeds"
    BELOW = "below"


@dataclass(frozen=True)
class SeverityClaim:
    direction: Direction
    gamma: float

    def describe(self, mu0: float) -> str:
        op = ">" if Direction(self.direction) is Direction.EXCEEDS else "<"
        return f"mu {op} {mu0 + self.gamma:g}"


@dataclass(frozen=True)
class SeverityResult:
    severity: float
    claim: SeverityClaim
    summary: ZSummary


@dataclass(frozen=True)
class SeverityCurve:
    """Severity along a grid of discrepancies; ``points`` holds ``(gamma, severity)``."""

    direction: Direction
    summary: ZSummary
    points: tuple[tuple[float, float], ...]

    @property
    def gammas(self) -> np.ndarray:
        return np.array([g for g, _ in self.points])

    @property
    def severities(self) -> np.ndarray:
        return np.array([s for _, s in self.points])

    @property
    def mus(self) -> np.ndarray:
        return self.summary.mu0 + self.gammas


def severity_exceeds(summary: ZSummary, gamma: float) -> SeverityResult:
    """Severity of the claim ``mu > mu0 + gamma``."""
    z = (summary.x_bar - (summary.mu0 + gamma)) / summary.standard_error
    return SeverityResult(normal_cdf(z), SeverityClaim(Direction.EXCEEDS, gamma), summary)


def severity_below(summary: ZSummary, gamma: float) -> SeverityResult:
    """Severity of the claim ``mu < mu0 + gamma``."""
    z = (summary.x_bar - (summary.mu0 + gamma)) / summary.standard_error
    # normal_sf(z) == Phi(-z), kept as sf so exceeds + below sums to 1 exactly
    return SeverityResult(normal_sf(z), SeverityClaim(Direction.BELOW, gamma), summary)


def severity(summary: ZSummary, gamma: float, direction: Direction | str) -> SeverityResult:
    if Direction(direction) is Direction.EXCEEDS:
        return severity_exceeds(summary, gamma)
    return severity_below(summary, gamma)


def just_significant_mean(mu0: float, sigma: float, n: int, alpha: float) -> float:
    """Observed mean whose one-sided (greater) z-test p value is exactly ``alpha``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not sigma > 0 or n < 1:
        raise DomainError("sigma must be positive and n >= 1")
    return mu0 + normal_quantile(1.0 - alpha) * sigma / math.sqrt(n)


def default_gamma_grid(summary: ZSummary, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Evenly spaced discrepancies covering the observed mean +/- 6 standard errors."""
    centre = summary.x_bar - summary.mu0
    half = DEFAULT_GRID_HALF_WIDTH_SE * summary.standard_error
    return np.linspace(centre - half, centre + half, points)


def severity_curve(
    summary: ZSummary,
    direction: Direction | str = Direction.EXCEEDS,
    gamma_grid: Optional[Sequence[float]] = None,
) -> SeverityCurve:
    if gamma_grid is None:
        gamma_grid = default_gamma_grid(summary)
    grid = [float(g) for g in gamma_grid]
    if not grid:
        raise DomainError("gamma grid must not be empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("gamma grid must be strictly increasing")
    direction = Direction(direction)
    points = tuple((g, severity(summary, g, direction).severity) for g in grid)
    return SeverityCurve(direction=direction, summary=summary, points=points)


def power_z(mu1: float, mu0: float, sigma: float, n: int, alpha: float) -> float:
    """Power of the one-sided (greater) level-``alpha`` z-test when the true mean is ``mu1``.

    The type II error rate is ``1 - power_z(...)``.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not sigma > 0 or n < 1:
        raise DomainError("sigma must be positive and n >= 1")
    shift = (mu1 - mu0) / (sigma / math.sqrt(n))
    return normal_cdf(shift - normal_quantile(1.0 - alpha))


def calibrate_alpha(mu0: float, sigma: float, n: int, gamma: float, target_severity: float) -> float:
    """Largest alpha whose just-significant result still gives ``mu > mu0 + gamma``
    at least ``target_severity``.

    Closed form: ``1 - Phi(Phi^-1(target) + gamma * sqrt(n) / sigma)``. ``mu0``
    drops out but is kept in the signature to mirror the other calls.
    """
    if not 0.0 < target_severity < 1.0:
        raise DomainError(f"target severity must lie in (0, 1), got {target_severity!r}")
    if not sigma > 0 or n < 1:
        raise DomainError("sigma must be positive and n >= 1")
    return normal_sf(normal_quantile(target_severity) + gamma * math.sqrt(n) / sigma)
