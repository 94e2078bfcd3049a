"""Figure and worked-example regeneration.

Each figure builder returns a :class:`FigureOutput`: named CSV tables plus
the parameters that produced them. :func:`examples_table` recomputes every
published number with its tolerance.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from inferlab import __version__
from inferlab.bayes import Beta, HalfNormal, Point, bf_binomial, bf_informed_effect, bf_jzs_t, bf_width_curve
from inferlab.severity import (
    Direction,
    ZSummary,
    default_gamma_grid,
    just_significant_mean,
    severity_below,
    severity_curve,
    severity_exceeds,
)
from inferlab.simulate import (
    SimConfig,
    familywise_analytic,
    ks_uniformity,
    simulate_family,
    simulate_optional_stopping,
    simulate_pcurve,
)
from inferlab.stattests import EffectSummary, Tail, t_test_from_summary, tost, z_test

FIGURES = ("fig1", "fig2a", "fig2b", "fig2c", "fig3", "examples_table")

FIG1_DELTAS = (0.0, 0.2, 0.5, 0.8)
FIG1_N = 50
FIG2_POINTS = 201
FIG2A_MEANS = (103.0, 104.0, 105.0)
FIG2B_SAMPLE_SIZES = (100, 500, 1000)
FIG2B_ALPHA = 0.025
FIG2C_MEANS = (100.0, 101.0, 102.0)
IQ_MU0, IQ_SIGMA, IQ_N = 100.0, 15.0, 100
FIG3_T, FIG3_N1, FIG3_N2 = 0.162, 53, 53
FIG3_SCALES = (0.1, 10.0, 100)

# replication summaries; standard errors rebuilt as effect / t
REPLICATION = EffectSummary(effect=5.47, se=5.47 / 0.162, df=104)
ORIGINAL = EffectSummary(effect=13.3, se=13.3 / 2.7, df=72)


@dataclass
class Table:
    name: str
    rows: list[dict[str, Any]]
    params: dict[str, Any] = field(default_factory=dict)


@dataclass
class FigureOutput:
    figure: str
    tables: list[Table]
    seed: Optional[int] = None
    notes: dict[str, Any] = field(default_factory=dict)


def _common_grid(summaries: list[ZSummary], points: int = FIG2_POINTS) -> np.ndarray:
    lo = min(default_gamma_grid(s)[0] for s in summaries)
    hi = max(default_gamma_grid(s)[-1] for s in summaries)
    return np.linspace(lo, hi, points)


def _curve_table(name: str, summary: ZSummary, direction: Direction, grid, extra: dict) -> Table:
    curve = severity_curve(summary, direction, grid)
    rows = [{"gamma": g, "mu": summary.mu0 + g, "severity": s} for g, s in curve.points]
    params = {"x_bar": summary.x_bar, "mu0": summary.mu0, "sigma": summary.sigma, "n": summary.n,
              "direction": direction.value, **extra}
    return Table(name, rows, params)


def fig1(seed: int, reps: int = 10_000, workers: int = 1) -> FigureOutput:
    """p-value histograms for several true effect sizes (n = 50, two-sided t)."""
    config = SimConfig(seed=seed, reps=reps)
    tables, notes = [], {}
    edges = np.linspace(0.0, 1.0, 21)
    for delta in FIG1_DELTAS:
        rep = simulate_pcurve(delta, FIG1_N, config, workers)
        rows = [{"bin_lo": edges[i], "bin_hi": edges[i + 1], "count": c} for i, c in enumerate(rep.histogram)]
        d, p = ks_uniformity(rep.p_values)
        params = {"delta": delta, "n": FIG1_N, "reps": reps, "alpha": config.alpha,
                  "rejection_rate": rep.rejection_rate, "ks_d": d, "ks_p": p}
        tables.append(Table(f"fig1_delta_{delta:g}", rows, params))
    return FigureOutput("fig1", tables, seed, notes)


def fig2a() -> FigureOutput:
    summaries = [ZSummary(x, IQ_MU0, IQ_SIGMA, IQ_N) for x in FIG2A_MEANS]
    grid = _common_grid(summaries)
    tables = [_curve_table(f"fig2a_xbar_{s.x_bar:g}", s, Direction.EXCEEDS, grid, {}) for s in summaries]
    return FigureOutput("fig2a", tables)


def fig2b() -> FigureOutput:
    summaries = [
        ZSummary(just_significant_mean(IQ_MU0, IQ_SIGMA, n, FIG2B_ALPHA), IQ_MU0, IQ_SIGMA, n)
        for n in FIG2B_SAMPLE_SIZES
    ]
    grid = _common_grid(summaries)
    tables = []
    for s in summaries:
        extra = {"alpha": FIG2B_ALPHA, "extrapolated": s.n not in (100, 500)}
        tables.append(_curve_table(f"fig2b_n_{s.n}", s, Direction.EXCEEDS, grid, extra))
    return FigureOutput("fig2b", tables, notes={"n_1000": "not stated in the source; added as an extrapolation"})


def fig2c() -> FigureOutput:
    summaries = [ZSummary(x, IQ_MU0, IQ_SIGMA, IQ_N) for x in FIG2C_MEANS]
    grid = _common_grid(summaries)
    tables = [_curve_table(f"fig2c_xbar_{s.x_bar:g}", s, Direction.BELOW, grid, {}) for s in summaries]
    return FigureOutput("fig2c", tables)


def fig3() -> FigureOutput:
    lo, hi, points = FIG3_SCALES
    scales = np.geomspace(lo, hi, int(points))
    rows = [{"scale": s, "bf10": bf} for s, bf in bf_width_curve(FIG3_T, FIG3_N1, FIG3_N2, scales)]
    params = {"t": FIG3_T, "n1": FIG3_N1, "n2": FIG3_N2, "scale_min": lo, "scale_max": hi, "points": int(points)}
    return FigureOutput("fig3", [Table("fig3_width_curve", rows, params)])


# -- worked examples ---------------------------------------------------------


@dataclass(frozen=True)
class Anchor:
    id: str
    quantity: str
    anchor: float
    compute: Callable[[], float]
    tolerance: float
    # "near": |value - anchor| <= tol; "below" / "above": one-sided bound
    kind: str = "near"


def _anchors(seed: int, reps: int, workers: int) -> list[Anchor]:
    iq = lambda x: ZSummary(x, IQ_MU0, IQ_SIGMA, IQ_N)  # noqa: E731
    js100 = ZSummary(just_significant_mean(IQ_MU0, IQ_SIGMA, 100, FIG2B_ALPHA), IQ_MU0, IQ_SIGMA, 100)
    js500 = ZSummary(just_significant_mean(IQ_MU0, IQ_SIGMA, 500, FIG2B_ALPHA), IQ_MU0, IQ_SIGMA, 500)
    cfg = SimConfig(seed=seed, reps=reps)
    cache: dict[str, Any] = {}

    def once(key, fn):
        if key not in cache:
            cache[key] = fn()
        return cache[key]

    stopping = lambda: once("stop", lambda: simulate_optional_stopping(10, 1, 1000, cfg, workers))  # noqa: E731
    null_curve = lambda: once("pcurve", lambda: simulate_pcurve(0.0, FIG1_N, cfg, workers))  # noqa: E731
    coin = lambda prior: bf_binomial(2, 10, Point(0.5), prior)  # noqa: E731
    fam_se = 3.0 * math.sqrt(familywise_analytic(10, 0.05) * (1 - familywise_analytic(10, 0.05)) / reps)

    return [
        Anchor("z_p_xbar103", "one-sided z-test p, x_bar=103, n=100", 0.023,
               lambda: z_test(iq(103), Tail.GREATER).p, 0.0005),
        Anchor("z_sig_025_xbar103", "one-sided z-test p at x_bar=103 vs alpha=.025", 0.025,
               lambda: z_test(iq(103), Tail.GREATER).p, 0.0, "below"),
        Anchor("z_p_xbar105", "one-sided z-test p, x_bar=105, n=100", 0.001,
               lambda: z_test(iq(105), Tail.GREATER).p, 0.0, "below"),
        Anchor("sev_xbar103_mu101", "SEV(mu > 101), x_bar=103", 0.91, lambda: severity_exceeds(iq(103), 1).severity, 0.005),
        Anchor("sev_xbar103_mu103", "SEV(mu > 103), x_bar=103", 0.5, lambda: severity_exceeds(iq(103), 3).severity, 0.005),
        Anchor("sev_xbar105_mu103", "SEV(mu > 103), x_bar=105", 0.91, lambda: severity_exceeds(iq(105), 3).severity, 0.005),
        Anchor("sev_js_n100_mu101", "SEV(mu > 101), just significant at .025, n=100", 0.9,
               lambda: severity_exceeds(js100, 1).severity, 0.005),
        Anchor("sev_js_n500_mu101", "SEV(mu > 101), just significant at .025, n=500", 0.68,
               lambda: severity_exceeds(js500, 1).severity, 0.005),
        Anchor("sev_js_n500_mu100.5", "SEV(mu > 100.5), just significant at .025, n=500", 0.89,
               lambda: severity_exceeds(js500, 0.5).severity, 0.005),
        Anchor("sev_xbar102_below105", "SEV(mu < 105), x_bar=102", 0.98, lambda: severity_below(iq(102), 5).severity, 0.005),
        Anchor("sev_xbar102_below103", "SEV(mu < 103), x_bar=102", 0.75, lambda: severity_below(iq(102), 3).severity, 0.005),
        Anchor("coin_point_ratio", "BF01 theta=.5 vs theta=.7, 2 heads in 10", 30.38, lambda: coin(Point(0.7)).bf01, 0.01),
        Anchor("coin_beta_1_1", "BF10 Beta(1,1) vs theta=.5", 2.07, lambda: coin(Beta(1, 1)).bf10, 0.01),
        Anchor("coin_beta_0.9_0.9", "BF01 Beta(0.9,0.9)", 0.5, lambda: coin(Beta(0.9, 0.9)).bf01, 0.05),
        Anchor("coin_beta_5_1", "BF01 Beta(5,1)", 8.78, lambda: coin(Beta(5, 1)).bf01, 0.05),
        Anchor("coin_beta_10_10", "BF01 Beta(10,10)", 0.66, lambda: coin(Beta(10, 10)).bf01, 0.05),
        Anchor("jzs_replication", "JZS BF10, t=0.162, n1=n2=53", 0.21, lambda: bf_jzs_t(0.162, 53, 53).bf10, 0.02),
        Anchor("informed_replication", "BF10 half-normal(13.3) prior, effect 5.47", 0.97,
               lambda: bf_informed_effect(REPLICATION, HalfNormal(13.3)).bf10, 0.05),
        Anchor("t_replication_t", "t statistic, replication", 0.162,
               lambda: t_test_from_summary(REPLICATION).statistic, 0.0005),
        Anchor("t_replication_p", "two-sided p, replication t(104)", 0.872, lambda: t_test_from_summary(REPLICATION).p, 0.001),
        Anchor("t_original_p", "two-sided p, original t(72)", 0.009, lambda: t_test_from_summary(ORIGINAL).p, 0.001),
        Anchor("tost_upper_t", "TOST upper-bound t, bounds +/-10", -0.13, lambda: tost(REPLICATION, -10, 10).upper_test.statistic, 0.01),
        Anchor("tost_p", "TOST overall p, bounds +/-10", 0.45, lambda: tost(REPLICATION, -10, 10).overall_p, 0.01),
        Anchor("stopping_rate", "optional stopping significant rate (10..1000)", 0.46,
               lambda: stopping().significant_rate, 0.02),
        Anchor("stopping_median_n", "median n of significant optional-stopping runs", 56.0,
               lambda: float(stopping().median_n_significant), 10.0),
        Anchor("family_10_analytic", "P(at least one of 10 null tests significant)", 0.40,
               lambda: familywise_analytic(10, 0.05), 0.005),
        Anchor("family_3_analytic", "P(at least one of 3 ANOVA tests significant)", 0.14,
               lambda: familywise_analytic(3, 0.05), 0.005),
        Anchor("family_10_empirical", "simulated familywise rate, k=10", familywise_analytic(10, 0.05),
               lambda: simulate_family(10, cfg, workers).empirical_rate, fam_se),
        Anchor("family_15_empirical", "simulated familywise rate, k=15 (four-way ANOVA)", 0.537,
               lambda: simulate_family(15, cfg, workers).empirical_rate, 0.015),
        Anchor("null_rejection_rate", "null rejection rate, n=50", 0.05, lambda: null_curve().rejection_rate, 0.0065),
        Anchor("null_ks_p", "KS uniformity p of null p values", 0.01,
               lambda: ks_uniformity(null_curve().p_values)[1], 0.0, "above"),
    ]


def examples_table(seed: int, reps: int = 10_000, workers: int = 1) -> FigureOutput:
    rows = []
    for a in _anchors(seed, reps, workers):
        value = float(a.compute())
        diff = abs(value - a.anchor)
        if a.kind == "near":
            ok = diff <= a.tolerance
        elif a.kind == "below":
            ok = value <= a.anchor
        else:
            ok = value > a.anchor
        rows.append({"id": a.id, "quantity": a.quantity, "kind": a.kind, "anchor": a.anchor,
                     "recomputed": value, "abs_diff": diff, "tolerance": a.tolerance, "pass": ok})
    table = Table("examples_table", rows, {"reps": reps})
    return FigureOutput("examples_table", [table], seed, {"all_pass": all(r["pass"] for r in rows)})


def build(figure: str, seed: int, reps: int = 10_000, workers: int = 1) -> FigureOutput:
    if figure == "fig1":
        return fig1(seed, reps, workers)
    if figure == "examples_table":
        return examples_table(seed, reps, workers)
    return {"fig2a": fig2a, "fig2b": fig2b, "fig2c": fig2c, "fig3": fig3}[figure]()


def fmt(value: Any) -> Any:
    """Round floats to 10 significant digits; leave everything else alone."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(f"{value:.10g}")
    if isinstance(value, dict):
        return {str(k): fmt(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [fmt(v) for v in value]
    return value


def write_csv(path: Path, rows: list[dict[str, Any]]) -> None:
    rows = [fmt(r) for r in rows]
    fields = list(rows[0]) if rows else []
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def write_output(out: FigureOutput, directory: Path) -> dict[str, Any]:
    """Write one CSV per table plus ``<figure>_manifest.json``; return the manifest."""
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    for table in out.tables:
        path = directory / f"{table.name}.csv"
        write_csv(path, table.rows)
        files.append({"file": path.name, "rows": len(table.rows), "params": fmt(table.params), "seed": out.seed})
    manifest = {"figure": out.figure, "version": __version__, "seed": out.seed, "files": files, "notes": fmt(out.notes)}
    manifest_path = directory / f"{out.figure}_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    manifest["manifest"] = manifest_path.name
    return manifest
