"""Seeded Monte Carlo demonstrations of p-value behaviour.

Replication ``i`` of every simulator draws from ``RngStream(seed, i)``, and
replications are processed in fixed-size blocks whose results are written
back by index. Reports are therefore identical for any number of workers.

Significance decisions compare ``|t|`` with the two-sided critical value
``t_{1 - alpha/2, df}``, which is equivalent to ``p <= alpha``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from inferlab.errors import DomainError
from inferlab.numeric.rng import RngStream, check_uint64
from inferlab.numeric.special import student_t_quantile, student_t_sf

HIST_BINS = 20
FAMILY_TEST_N = 20
_BLOCK = 256


@dataclass(frozen=True)
class SimConfig:
    seed: int
    reps: int = 10_000
    alpha: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "seed", check_uint64(self.seed))
        if self.reps < 1:
            raise DomainError(f"reps must be >= 1, got {self.reps}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class PCurveReport:
    effect_size: float
    n: int
    reps: int
    seed: int
    alpha: float
    histogram: tuple[int, ...]
    rejection_rate: float
    p_values: np.ndarray = field(repr=False, compare=False)

    @property
    def bin_edges(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, HIST_BINS + 1)


@dataclass(frozen=True)
class StoppingReport:
    start_n: int
    step: int
    max_n: int
    reps: int
    seed: int
    alpha: float
    significant_rate: float
    # lower median of the stopping n over significant runs; None if there were none
    median_n_significant: Optional[int]
    # final n of every replication; runs that never hit end at the last look
    n_histogram: dict[int, int]


@dataclass(frozen=True)
class FamilyReport:
    k_tests: int
    reps: int
    seed: int
    alpha: float
    empirical_rate: float
    analytic_rate: float


@lru_cache(maxsize=None)
def _two_sided_critical(alpha: float, df: int) -> float:
    return student_t_quantile(1.0 - 0.5 * alpha, df)


def _run_blocks(reps: int, block_fn: Callable[[int, int], np.ndarray], workers: int) -> np.ndarray:
    spans = [(lo, min(lo + _BLOCK, reps)) for lo in range(0, reps, _BLOCK)]
    if workers <= 1 or len(spans) == 1:
        parts = [block_fn(lo, hi) for lo, hi in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: block_fn(*s), spans))
    return np.concatenate(parts)


def _draw_block(seed: int, lo: int, hi: int, count: int) -> np.ndarray:
    out = np.empty((hi - lo, count))
    for row, i in enumerate(range(lo, hi)):
        out[row] = RngStream(seed, i).generator().standard_normal(count)
    return out


def _t_stats(x: np.ndarray) -> np.ndarray:
    # one-sample t against 0 along the last axis
    n = x.shape[-1]
    return x.mean(axis=-1) / (x.std(axis=-1, ddof=1) / math.sqrt(n))


def simulate_pcurve(delta: float, n: int, config: SimConfig, workers: int = 1) -> PCurveReport:
    """p values of a two-sided one-sample t-test of mu = 0 on N(delta, 1) samples of size n."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    df = n - 1

    def block(lo, hi):
        t = _t_stats(delta + _draw_block(config.seed, lo, hi, n))
        return np.array([min(1.0, 2.0 * student_t_sf(abs(v), df)) for v in t])

    p = _run_blocks(config.reps, block, workers)
    counts, _ = np.histogram(p, bins=HIST_BINS, range=(0.0, 1.0))
    return PCurveReport(
        effect_size=delta,
        n=n,
        reps=config.reps,
        seed=config.seed,
        alpha=config.alpha,
        histogram=tuple(int(c) for c in counts),
        rejection_rate=float(np.count_nonzero(p <= config.alpha)) / config.reps,
        p_values=p,
    )


def _kolmogorov_sf(lam: float) -> float:
    """P(K > lam) for the limiting Kolmogorov distribution."""
    if lam < 0.1:
        # 1 - P(K > lam) < 1e-50 here
        return 1.0
    if lam < 1.18:
        # Jacobi theta form converges fast for small lam
        s = 0.0
        for k in range(1, 40):
            s += math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8.0 * lam * lam))
        return max(0.0, min(1.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * s))
    s = 0.0
    for k in range(1, 101):
        s += (-1) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
    return max(0.0, min(1.0, 2.0 * s))


def ks_uniformity(p_values) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov test against Uniform(0, 1).

    Returns ``(D, p)`` with ``p`` from the asymptotic distribution of
    ``sqrt(n) * D``.
    """
    x = np.sort(np.asarray(p_values, dtype=float).ravel())
    m = x.size
    if m == 0:
        raise DomainError("ks_uniformity needs at least one value")
    if np.any(~np.isfinite(x)) or x[0] < 0.0 or x[-1] > 1.0:
        raise DomainError("ks_uniformity values must lie in [0, 1]")
    i = np.arange(1, m + 1)
    d = float(max(np.max(i / m - x), np.max(x - (i - 1) / m)))
    return d, _kolmogorov_sf(math.sqrt(m) * d)


def simulate_optional_stopping(
    start_n: int, step: int, max_n: int, config: SimConfig, workers: int = 1
) -> StoppingReport:
    """Test after ``start_n``, ``start_n + step``, ... observations and stop at the
    first two-sided ``p <= alpha``, or when ``max_n`` observations are used up.

    The null is true (standard normal data). Running sums make every look O(1).
    """
    if not 2 <= start_n <= max_n:
        raise DomainError(f"need 2 <= start_n <= max_n, got start_n={start_n}, max_n={max_n}")
    if step < 1:
        raise DomainError(f"step must be >= 1, got {step}")
    looks = np.arange(start_n, max_n + 1, step)
    crit = np.array([_two_sided_critical(config.alpha, int(n) - 1) for n in looks])
    sqrt_looks = np.sqrt(looks)
    idx = looks - 1

    def block(lo, hi):
        x = _draw_block(config.seed, lo, hi, max_n)
        s1 = np.cumsum(x, axis=1)[:, idx]
        s2 = np.cumsum(x * x, axis=1)[:, idx]
        mean = s1 / looks
        var = (s2 - s1 * mean) / (looks - 1)
        t = mean * sqrt_looks / np.sqrt(var)
        hit = np.abs(t) >= crit
        any_hit = hit.any(axis=1)
        first = np.argmax(hit, axis=1)
        # column 0: final n, column 1: significant flag
        return np.stack([np.where(any_hit, looks[first], looks[-1]), any_hit.astype(np.int64)], axis=1)

    out = _run_blocks(config.reps, block, workers)
    final_n, significant = out[:, 0], out[:, 1].astype(bool)
    sig_n = np.sort(final_n[significant])
    median = int(sig_n[(sig_n.size - 1) // 2]) if sig_n.size else None
    values, counts = np.unique(final_n, return_counts=True)
    return StoppingReport(
        start_n=start_n,
        step=step,
        max_n=max_n,
        reps=config.reps,
        seed=config.seed,
        alpha=config.alpha,
        significant_rate=float(sig_n.size) / config.reps,
        median_n_significant=median,
        n_histogram={int(v): int(c) for v, c in zip(values, counts)},
    )


def familywise_analytic(k: int, alpha: float) -> float:
    """Chance of at least one rejection among ``k`` independent level-alpha null tests."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return -math.expm1(k * math.log1p(-alpha))


def simulate_family(k: int, config: SimConfig, workers: int = 1) -> FamilyReport:
    """Run ``k`` independent null one-sample t-tests (n = 20 each) per replication
    and count replications with any ``p <= alpha``."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    crit = _two_sided_critical(config.alpha, FAMILY_TEST_N - 1)

    def block(lo, hi):
        x = _draw_block(config.seed, lo, hi, k * FAMILY_TEST_N).reshape(hi - lo, k, FAMILY_TEST_N)
        return (np.abs(_t_stats(x)) >= crit).any(axis=1)

    hits = _run_blocks(config.reps, block, workers)
    return FamilyReport(
        k_tests=k,
        reps=config.reps,
        seed=config.seed,
        alpha=config.alpha,
        empirical_rate=float(np.count_nonzero(hits)) / config.reps,
        analytic_rate=familywise_analytic(k, config.alpha),
    )


def anova_effect_count(factors: int, involving: Optional[int] = None) -> int:
    """Number of F tests in a full factorial ANOVA.

    With ``involving`` (a 1-based factor index) only the main effect of that
    factor and the interactions containing it are counted.
    """
    if factors < 1:
        raise DomainError(f"factors must be >= 1, got {factors}")
    if involving is None:
        return 2**factors - 1
    if not 1 <= involving <= factors:
        raise DomainError(f"involving must be a factor index in 1..{factors}, got {involving}")
    return 2 ** (factors - 1)
