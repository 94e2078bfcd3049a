"""``inferlab`` command line.

Every command prints a JSON envelope ``{command, inputs, results, meta}``
(or a CSV projection of ``results`` with ``--format csv``). Exit status is
0 on success, 1 on numerical or I/O failure and 2 on usage or domain errors;
failures print a single JSON line with an ``error`` field on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from inferlab import __version__
from inferlab import bayes, reproduce, severity, simulate, stattests
from inferlab.errors import ConvergenceError, DomainError
from inferlab.numeric.rng import check_uint64
from inferlab.reproduce import fmt

SEED_ENV = "INFERLAB_SEED"
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- argument parsing ---------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="also write the output to this file")


def _seeded(p: argparse.ArgumentParser) -> None:
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV}, then {DEFAULT_SEED}")
    p.add_argument("--workers", type=int, default=1, help="threads; results do not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="inferlab", description="Severity, Bayes factors and p-value simulations.")
    parser.add_argument("--version", action="version", version=f"inferlab {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("severity", help="severity of a directional claim; 'curve' and 'calibrate' variants")
    p.add_argument("action", nargs="?", choices=("curve", "calibrate"), default=None)
    for flag in ("--xbar", "--mu0", "--sigma", "--gamma", "--gamma-min", "--gamma-max", "--target"):
        p.add_argument(flag, type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--points", type=int, default=severity.DEFAULT_GRID_POINTS)
    p.add_argument("--direction", choices=("exceeds", "below"), default="exceeds")
    _common(p)

    p = sub.add_parser("power", help="power of a one-sided z-test")
    psub = p.add_subparsers(dest="action", parser_class=_Parser, required=True)
    q = psub.add_parser("z")
    for flag in ("--mu1", "--mu0", "--sigma", "--alpha"):
        q.add_argument(flag, type=float, required=True)
    q.add_argument("--n", type=int, required=True)
    _common(q)

    p = sub.add_parser("test", help="z, t and TOST tests from summary statistics")
    tsub = p.add_subparsers(dest="action", parser_class=_Parser, required=True)
    q = tsub.add_parser("z")
    q.add_argument("--xbar", type=float, required=True)
    q.add_argument("--null", type=float, default=0.0)
    q.add_argument("--se", type=float, help="standard error; or give --sigma and --n")
    q.add_argument("--sigma", type=float)
    q.add_argument("--n", type=int)
    q.add_argument("--tail", choices=[t.value for t in stattests.Tail], default="greater")
    _common(q)
    q = tsub.add_parser("t")
    q.add_argument("--effect", type=float, required=True)
    q.add_argument("--se", type=float, required=True)
    q.add_argument("--df", type=float, required=True)
    q.add_argument("--null", type=float, default=0.0)
    q.add_argument("--tail", choices=[t.value for t in stattests.Tail], default="two_sided")
    _common(q)
    q = tsub.add_parser("tost")
    for flag in ("--effect", "--se", "--df", "--lower", "--upper"):
        q.add_argument(flag, type=float, required=True)
    q.add_argument("--alpha", type=float, default=0.05)
    _common(q)

    p = sub.add_parser("bf", help="Bayes factors")
    bsub = p.add_subparsers(dest="action", parser_class=_Parser, required=True)
    q = bsub.add_parser("binomial")
    q.add_argument("--heads", type=int, required=True)
    q.add_argument("--flips", type=int, required=True)
    q.add_argument("--null", type=float, default=0.5)
    q.add_argument("--alt", required=True, help="point:THETA | grid:FILE | beta:A,B | uniform[:LO,HI]")
    q.add_argument("--report", choices=("h1", "h0"), default="h1")
    _common(q)
    q = bsub.add_parser("jzs")
    q.add_argument("--t", type=float, required=True)
    q.add_argument("--n1", type=int, required=True)
    q.add_argument("--n2", type=int)
    q.add_argument("--scale", type=float, default=bayes.DEFAULT_JZS_SCALE)
    q.add_argument("--report", choices=("h1", "h0"), default="h1")
    _common(q)
    q = bsub.add_parser("informed")
    q.add_argument("--effect", type=float, required=True)
    q.add_argument("--se", type=float, required=True)
    q.add_argument("--alt", required=True, help="halfnormal:S | normal:M,S | uniform:LO,HI")
    q.add_argument("--report", choices=("h1", "h0"), default="h1")
    _common(q)
    q = bsub.add_parser("width-curve")
    q.add_argument("--t", type=float, required=True)
    q.add_argument("--n1", type=int, required=True)
    q.add_argument("--n2", type=int)
    q.add_argument("--scale-min", type=float, default=0.1)
    q.add_argument("--scale-max", type=float, default=10.0)
    q.add_argument("--points", type=int, default=50)
    _common(q)

    p = sub.add_parser("sim", help="Monte Carlo simulations")
    ssub = p.add_subparsers(dest="action", parser_class=_Parser, required=True)
    q = ssub.add_parser("pcurve")
    q.add_argument("--delta", type=float, default=0.0)
    q.add_argument("--n", type=int, default=50)
    _seeded(q)
    _common(q)
    q = ssub.add_parser("stopping")
    q.add_argument("--start", type=int, default=10)
    q.add_argument("--step", type=int, default=1)
    q.add_argument("--max", type=int, default=1000)
    _seeded(q)
    _common(q)
    q = ssub.add_parser("family")
    group = q.add_mutually_exclusive_group(required=True)
    group.add_argument("--k", type=int)
    group.add_argument("--factors", type=int)
    q.add_argument("--involving", type=int, help="1-based factor index (with --factors)")
    _seeded(q)
    _common(q)

    p = sub.add_parser("reproduce", help="regenerate figure data and the worked-example table")
    p.add_argument("figure", choices=reproduce.FIGURES + ("all",))
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(action=None)
    return parser


# -- helpers --------------------------------------------------------------------


def _require(args, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"missing required option(s): {' '.join(missing)}")


def _pair(text: str, what: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"{what} needs two comma-separated numbers, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from None


def _number(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{what} needs a number, got {text!r}") from None


def _read_grid(path: str) -> bayes.Grid:
    rows = []
    with open(path, newline="") as fh:
        for line in csv.reader(fh):
            if not line or line[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(line[0]), float(line[1])))
            except (ValueError, IndexError):
                if rows:  # only a leading header row may be non-numeric
                    raise UsageError(f"bad grid row in {path}: {line!r}") from None
    if not rows:
        raise UsageError(f"grid file {path} has no rows")
    return bayes.grid_prior_from_rows(rows)


def parse_prior(text: str) -> bayes.PriorSpec:
    """Parse ``kind[:params]`` prior strings used by the ``bf`` commands."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "point":
        return bayes.Point(_number(rest, "point"))
    if kind == "grid":
        if not rest:
            raise UsageError("grid prior needs a file: grid:FILE")
        return _read_grid(rest)
    if kind == "beta":
        return bayes.Beta(*_pair(rest, "beta"))
    if kind == "uniform":
        return bayes.Uniform(*_pair(rest, "uniform")) if rest else bayes.Uniform(0.0, 1.0)
    if kind == "normal":
        return bayes.Normal(*_pair(rest, "normal"))
    if kind == "halfnormal":
        return bayes.HalfNormal(_number(rest, "halfnormal"))
    raise UsageError(f"unknown prior {text!r}")


def _resolve_seed(arg: Optional[int]) -> int:
    if arg is not None:
        return check_uint64(arg)
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return DEFAULT_SEED
    try:
        return check_uint64(int(env))
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an unsigned 64-bit integer, got {env!r}") from None


def _bf_payload(res: bayes.BayesFactorResult, report: str) -> dict[str, Any]:
    out: dict[str, Any] = {"report": report}
    if report == "h1":
        out["bf10"] = res.bf10
    else:
        out["bf01"] = res.bf01
    out.update({"log_bf10": res.log_bf10, "log_m1": res.log_m1, "log_m0": res.log_m0,
                "model0": res.model0, "model1": res.model1})
    return out


def _test_payload(r: stattests.TestResult) -> dict[str, Any]:
    return {"statistic": r.statistic, "df": r.df, "p": r.p, "tail": r.tail.value}


# -- command implementations -------------------------------------------------------


def _cmd_severity(args) -> dict[str, Any]:
    if args.action == "calibrate":
        _require(args, "mu0", "sigma", "n", "gamma", "target")
        alpha = severity.calibrate_alpha(args.mu0, args.sigma, args.n, args.gamma, args.target)
        x = severity.just_significant_mean(args.mu0, args.sigma, args.n, alpha)
        check = severity.severity_exceeds(stattests.ZSummary(x, args.mu0, args.sigma, args.n), args.gamma)
        return {"alpha": alpha, "just_significant_mean": x, "severity_at_alpha": check.severity}
    _require(args, "xbar", "mu0", "sigma", "n")
    summary = stattests.ZSummary(args.xbar, args.mu0, args.sigma, args.n)
    if args.action == "curve":
        if args.gamma_min is None and args.gamma_max is None:
            grid = severity.default_gamma_grid(summary, args.points)
        else:
            _require(args, "gamma_min", "gamma_max")
            if args.points < 2:
                raise UsageError("--points must be >= 2")
            grid = np.linspace(args.gamma_min, args.gamma_max, args.points)
        curve = severity.severity_curve(summary, args.direction, grid)
        rows = [{"gamma": g, "mu": args.mu0 + g, "severity": s} for g, s in curve.points]
        return {"direction": args.direction, "rows": rows}
    _require(args, "gamma")
    res = severity.severity(summary, args.gamma, args.direction)
    return {"severity": res.severity, "claim": res.claim.describe(args.mu0), "direction": args.direction,
            "gamma": args.gamma, "standard_error": summary.standard_error}


def _cmd_power(args) -> dict[str, Any]:
    power = severity.power_z(args.mu1, args.mu0, args.sigma, args.n, args.alpha)
    return {"power": power, "beta": 1.0 - power}


def _cmd_test(args) -> dict[str, Any]:
    if args.action == "z":
        if args.se is not None:
            if args.sigma is not None or args.n is not None:
                raise UsageError("give either --se or --sigma with --n, not both")
            summary = stattests.ZSummary(args.xbar, args.null, args.se, 1)
        else:
            _require(args, "sigma", "n")
            summary = stattests.ZSummary(args.xbar, args.null, args.sigma, args.n)
        return _test_payload(stattests.z_test(summary, args.tail))
    summary = stattests.EffectSummary(args.effect, args.se, args.df)
    if args.action == "t":
        return _test_payload(stattests.t_test_from_summary(summary, args.null, args.tail))
    res = stattests.tost(summary, args.lower, args.upper)
    return {"lower_test": _test_payload(res.lower_test), "upper_test": _test_payload(res.upper_test),
            "overall_p": res.overall_p, "equivalent": res.equivalent(args.alpha)}


def _cmd_bf(args) -> dict[str, Any]:
    if args.action == "binomial":
        res = bayes.bf_binomial(args.heads, args.flips, bayes.Point(args.null), parse_prior(args.alt))
        return _bf_payload(res, args.report)
    if args.action == "jzs":
        return _bf_payload(bayes.bf_jzs_t(args.t, args.n1, args.n2, args.scale), args.report)
    if args.action == "informed":
        summary = stattests.EffectSummary(args.effect, args.se, math.inf)
        return _bf_payload(bayes.bf_informed_effect(summary, parse_prior(args.alt)), args.report)
    if not 0 < args.scale_min < args.scale_max or args.points < 2:
        raise UsageError("need 0 < --scale-min < --scale-max and --points >= 2")
    scales = np.geomspace(args.scale_min, args.scale_max, args.points)
    return {"rows": [{"scale": s, "bf10": bf} for s, bf in bayes.bf_width_curve(args.t, args.n1, args.n2, scales)]}


def _cmd_sim(args) -> dict[str, Any]:
    config = simulate.SimConfig(seed=args.seed, reps=args.reps, alpha=args.alpha)
    if args.action == "pcurve":
        rep = simulate.simulate_pcurve(args.delta, args.n, config, args.workers)
        d, p = simulate.ks_uniformity(rep.p_values)
        edges = rep.bin_edges
        rows = [{"bin_lo": edges[i], "bin_hi": edges[i + 1], "count": c} for i, c in enumerate(rep.histogram)]
        return {"rejection_rate": rep.rejection_rate, "ks_d": d, "ks_p": p, "rows": rows}
    if args.action == "stopping":
        rep = simulate.simulate_optional_stopping(args.start, args.step, args.max, config, args.workers)
        rows = [{"n": n, "count": c} for n, c in sorted(rep.n_histogram.items())]
        return {"significant_rate": rep.significant_rate, "median_n_significant": rep.median_n_significant,
                "rows": rows}
    if args.k is not None:
        if args.involving is not None:
            raise UsageError("--involving needs --factors")
        k = args.k
    else:
        k = simulate.anova_effect_count(args.factors, args.involving)
    rep = simulate.simulate_family(k, config, args.workers)
    return {"k_tests": k, "empirical_rate": rep.empirical_rate, "analytic_rate": rep.analytic_rate}


def _cmd_reproduce(args) -> dict[str, Any]:
    figures = reproduce.FIGURES if args.figure == "all" else (args.figure,)
    outdir = Path(args.out)
    manifests = []
    all_pass = None
    for fig in figures:
        out = reproduce.build(fig, args.seed, args.reps, args.workers)
        manifests.append(reproduce.write_output(out, outdir))
        if fig == "examples_table":
            all_pass = out.notes["all_pass"]
    rows = [{"figure": m["figure"], "file": f["file"], "rows": f["rows"]} for m in manifests for f in m["files"]]
    results: dict[str, Any] = {"out": str(outdir), "manifests": [m["manifest"] for m in manifests], "rows": rows}
    if all_pass is not None:
        results["all_pass"] = all_pass
    return results


_HANDLERS = {
    "severity": _cmd_severity,
    "power": _cmd_power,
    "test": _cmd_test,
    "bf": _cmd_bf,
    "sim": _cmd_sim,
    "reproduce": _cmd_reproduce,
}
_SEEDED = {"sim", "reproduce"}
_NOT_INPUTS = {"command", "action", "format", "out", "workers"}


# -- serialisation -----------------------------------------------------------------


def _flatten(prefix: str, value: Any, out: dict[str, Any]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    else:
        out[prefix] = value


def to_csv(results: dict[str, Any]) -> str:
    """Flat CSV projection: one line per row (scalars repeated) or a single line."""
    scalars: dict[str, Any] = {}
    _flatten("", {k: v for k, v in results.items() if k != "rows"}, scalars)
    rows = results.get("rows")
    if rows:
        records = [{**r, **scalars} for r in rows]
    else:
        records = [scalars]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)
    return buf.getvalue()


def serialize(envelope: dict[str, Any], fmt_name: str) -> str:
    if fmt_name == "csv":
        return to_csv(envelope["results"])
    return json.dumps(envelope, indent=2) + "\n"


def replay_argv(envelope: dict[str, Any]) -> list[str]:
    """Rebuild an argument vector that reproduces ``envelope``."""
    argv = envelope["command"].split()
    inputs = dict(envelope["inputs"])
    if envelope["command"].startswith("reproduce"):
        argv.append(str(inputs.pop("figure")))
    for key, value in inputs.items():
        if value is None:
            continue
        argv += [f"--{key.replace('_', '-')}", str(value)]
    if envelope["meta"].get("seed") is not None:
        argv += ["--seed", str(envelope["meta"]["seed"])]
    return argv


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message}}) + "\n")


def _execute(argv: Sequence[str]) -> tuple[argparse.Namespace, dict[str, Any]]:
    args = build_parser().parse_args(list(argv))
    seed = None
    if args.command in _SEEDED:
        seed = _resolve_seed(args.seed)
        args.seed = seed
    results = _HANDLERS[args.command](args)
    command = args.command if args.action is None or args.command == "reproduce" else f"{args.command} {args.action}"
    inputs = {k: v for k, v in vars(args).items() if k not in _NOT_INPUTS | {"seed"}}
    if args.command == "reproduce":
        inputs["out"] = args.out
    envelope = {
        "command": command,
        "inputs": fmt(inputs),
        "results": fmt(results),
        "meta": {"version": __version__, "seed": seed},
    }
    return args, envelope


def execute(argv: Sequence[str]) -> dict[str, Any]:
    """Parse ``argv`` and return the output envelope; raises on failure."""
    return _execute(argv)[1]


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args, envelope = _execute(argv)
        text = serialize(envelope, args.format)
        sys.stdout.write(text)
        if args.command != "reproduce" and args.out:
            Path(args.out).write_text(text)
        return 0
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return 2
    except DomainError as exc:
        _emit_error("domain", str(exc))
        return 2
    except ConvergenceError as exc:
        _emit_error("numeric", str(exc))
        return 1
    except OSError as exc:
        _emit_error("io", str(exc))
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
