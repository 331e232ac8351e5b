"""Command-line entry point.

    stieltjes classify density --gstar "exp(0.5*x)" --relation two-sided
    stieltjes classify moments --g "x^2" --assert-cond-b
    stieltjes classify levy --psi "x*log(x+1)" --t 3 --json
    stieltjes asymptote levy --config stable.ini --t 1 --y 4,16,64 --oracle
    stieltjes verify catalog --filter "table1-*"

Exit codes: 0 when a verdict is reached (or every catalog case matches),
2 when the result is inconclusive (or a catalog case mismatches), 1 on
input errors.
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import catalog
from . import convex as cx
from . import criteria as cr
from . import exprdsl as ed
from . import levy
from . import oracle

SCHEMA_VERSION = 1

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class AnalysisReport:
    """Everything needed to re-run and audit one invocation."""

    command: str
    inputs: dict
    parameters: dict
    verdict: dict | None = None
    table: list | None = None
    timing: dict | None = None
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return ed._jsonable(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=True)

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema_version')!r}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"stieltjes {self.tool_version} :: {self.command}"]
        for k, v in self.inputs.items():
            lines.append(f"  input {k}: {v}")
        lines.append("  parameters: " + ", ".join(f"{k}={v}" for k, v in self.parameters.items()))
        if self.verdict is not None:
            for e in self.verdict["evidence"]:
                mark = "*" if e["decisive"] else " "
                lines.append(f"  {mark} {e['criterion']}: {_short(e['result'])}")
            lines.append(f"verdict: {self.verdict['outcome']}")
            if self.verdict.get("reason"):
                lines.append(f"reason: {self.verdict['reason']}")
        if self.table:
            cols = list(self.table[0])
            lines.append("  " + "  ".join(f"{c:>16s}" for c in cols))
            for row in self.table:
                lines.append("  " + "  ".join(f"{_cell(row[c]):>16s}" for c in cols))
        if self.timing is not None:
            lines.append(f"time: {self.timing['seconds']:.3f} s")
        return "\n".join(lines)


def _short(res) -> str:
    if isinstance(res, dict):
        for key in ("verdict", "holds", "outcome"):
            if key in res:
                extra = res.get("method") or res.get("rule") or ""
                return f"{res[key]} ({extra})" if extra else str(res[key])
        return ", ".join(f"{k}={v}" for k, v in list(res.items())[:3])
    return str(res)


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


# ---------------------------------------------------------------- argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", help="emit one JSON report")
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature and inversion tolerance")
    p.add_argument("--horizon", type=int, default=40,
                   help="log2 of the integral horizon for numeric convergence (series use half)")
    p.add_argument("--seed", type=int, default=0, help="random seed (recorded; the analysis is deterministic)")
    p.add_argument("--timing", action="store_true", help="record wall-clock time in the report")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = _Parser(prog="stieltjes", description="Moment determinacy of Stieltjes moment problems.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cls = top.add_parser("classify", help="classify a law").add_subparsers(dest="target", required=True,
                                                                          parser_class=_Parser)
    d = cls.add_parser("density", parents=[common], help="from nu(x) vs exp(-G_*(log x))")
    d.add_argument("--gstar", required=True, help="G_* as an expression in x")
    d.add_argument("--relation", choices=("two-sided", "big-o", "tail-big-o"), default="two-sided")

    m = cls.add_parser("moments", parents=[common], help="from M(n) ~ exp(G(n))")
    m.add_argument("--g", required=True, help="G as an expression in x")
    m.add_argument("--assert-cond-b", action="store_true",
                   help="assert the Fourier domination condition on the Esscher transforms")

    lv = cls.add_parser("levy", parents=[common], help="law of exp(Y_t) for a Levy process Y")
    src = lv.add_mutually_exclusive_group(required=True)
    src.add_argument("--psi", help="closed-form Laplace exponent in x")
    src.add_argument("--config", help="configuration file with a [levy] section")
    lv.add_argument("--t", type=float, help="time (overrides [run] t)")

    asy = top.add_parser("asymptote", help="density asymptotics").add_subparsers(dest="target", required=True,
                                                                                parser_class=_Parser)
    al = asy.add_parser("levy", parents=[common], help="saddle-point density of Y_t against inversion")
    al.add_argument("--config", required=True)
    al.add_argument("--t", type=float)
    al.add_argument("--y", required=True, help="comma-separated saddle parameters y > 0")
    al.add_argument("--oracle", action="store_true", help="add tilted Fourier inversion and relative error")

    ver = top.add_parser("verify", help="regression fixtures").add_subparsers(dest="target", required=True,
                                                                             parser_class=_Parser)
    vc = ver.add_parser("catalog", parents=[common], help="run the fixture catalog")
    vc.add_argument("--filter", default="*", help="glob on fixture names")
    return ap


def _block_config(args) -> oracle.BlockConfig:
    if not 4 <= args.horizon <= 1000:
        raise InputError("--horizon must lie in [4, 1000]")
    return oracle.BlockConfig(horizon_integral=2.0 ** args.horizon, horizon_series=2.0 ** max(args.horizon // 2, 4))


def _parameters(args) -> dict:
    return {"tol": args.tol, "horizon": args.horizon, "seed": args.seed}


def _read_config(path: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path!r}: {exc}") from None
    if not cp.has_section("levy"):
        raise InputError(f"config {path!r} has no [levy] section")
    return cp


def _time_of(args, cp) -> float:
    t = args.t
    if t is None and cp is not None and cp.has_option("run", "t"):
        t = cp.getfloat("run", "t")
    if t is None:
        raise InputError("time t is required (--t or [run] t)")
    if not t > 0:
        raise InputError("t must be positive")
    return float(t)


def _law(args):
    cp = _read_config(args.config) if getattr(args, "config", None) else None
    t = _time_of(args, cp)
    if cp is None:
        return levy.LogLevyLaw(t, psi=ed.parse(args.psi)), {"psi": args.psi, "t": t}
    sec = dict(cp["levy"])
    return levy.law_from_config(sec, t), {"config": args.config, "levy": sec, "t": t}


# ---------------------------------------------------------------- commands

def _classify(args) -> tuple[AnalysisReport, int]:
    cfg = _block_config(args)
    if args.target == "density":
        d = cr.DensityAsymptote.from_expr(args.gstar, args.relation)
        v = cr.classify_from_density_asymptote(d, config=cfg)
        inputs = {"gstar": ed.to_text(ed.parse(args.gstar)), "relation": args.relation}
    elif args.target == "moments":
        G = cx.profile(args.g)
        v = cr.classify_from_moment_asymptote(G, True if args.assert_cond_b else None, config=cfg)
        inputs = {"g": ed.to_text(ed.parse(args.g)), "assert_cond_b": args.assert_cond_b}
    else:
        law, inputs = _law(args)
        v = levy.classify_loglevy(law, config=cfg)
    rep = AnalysisReport(f"classify {args.target}", inputs, _parameters(args), verdict=v.to_dict())
    return rep, EXIT_OK if v.decided else EXIT_INCONCLUSIVE


def _grid(text: str) -> list[float]:
    try:
        ys = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"--y must be comma-separated numbers, got {text!r}") from None
    if not ys or any(not (y > 0 and math.isfinite(y)) for y in ys):
        raise InputError("--y values must be positive and finite")
    return ys


def _asymptote(args) -> tuple[AnalysisReport, int]:
    law, inputs = _law(args)
    trip = law.triplet
    if trip is None:
        raise InputError("the asymptote needs a triplet in [levy]")
    ys = _grid(args.y)
    rows = []
    for y in ys:
        x, val, logv = levy.saddle_density_asymptote(trip, law.t, y)
        row = {"y": y, "x": x, "log_saddle": logv}
        if args.oracle:
            inv = float(levy.inverted_log_density(trip, law.t, [x], tilt=y, tol=args.tol)[0])
            row["log_inversion"] = inv
            row["rel_error"] = math.expm1(logv - inv)
        rows.append(row)
    inputs = dict(inputs, y=ys, oracle=args.oracle)
    return AnalysisReport("asymptote levy", inputs, _parameters(args), table=rows), EXIT_OK


def _verify(args) -> tuple[AnalysisReport, int]:
    cfg = _block_config(args)
    names = catalog.fixture_names(args.filter)
    if not names:
        raise InputError(f"no fixture matches {args.filter!r}")
    rows = []
    for r in catalog.run_catalog(args.filter, cfg):
        rows.append({"fixture": r.fixture, "params": ",".join(f"{k}={v:g}" for k, v in r.params.items()) or "-",
                     "expected": r.expected.outcome.value, "verdict": r.verdict.outcome.value,
                     "match": r.match, "reason": r.verdict.reason})
    ok = all(r["match"] for r in rows)
    rep = AnalysisReport("verify catalog", {"filter": args.filter}, _parameters(args), table=rows)
    return rep, EXIT_OK if ok else EXIT_INCONCLUSIVE


_COMMANDS = {"classify": _classify, "asymptote": _asymptote, "verify": _verify}


def run(argv=None) -> tuple[AnalysisReport | None, int]:
    """Parse ``argv`` and execute; returns the report and the exit code."""
    args = build_parser().parse_args(argv)
    np.random.seed(args.seed)
    t0 = time.perf_counter()
    rep, code = _COMMANDS[args.command](args)
    if args.timing:
        rep.timing = {"seconds": time.perf_counter() - t0}
    return rep, code


def main(argv=None) -> int:
    try:
        args_json = "--json" in (sys.argv[1:] if argv is None else argv)
        rep, code = run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (InputError, ed.ExprSyntaxError, ed.DomainError, cx.RangeError, cx.CertificationError,
            configparser.Error, KeyError, ValueError) as exc:
        print(f"stieltjes: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(rep.to_json() if args_json else rep.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
