"""Determinacy criteria for the Stieltjes moment problem.

Classical tests (Carleman, Krein with Pedersen's refinement, Hardy) and the
decision procedures built on asymptotically parabolic functions: one works
from the moment side, ``M(n) ~ exp(G(n))``, the other from the density side,
``nu(x) ~ exp(-G_*(log x))``. Converse directions are only reported when
their gate condition holds.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy import special

from . import convex as cx
from . import exprdsl as ed
from . import oracle
from .exprdsl import Convergence, ConvergenceVerdict

__all__ = [
    "Outcome", "Evidence", "Verdict", "MomentSequence", "DensityAsymptote", "GateCheck",
    "carleman", "krein_pedersen", "hardy_tail_equivalence", "moment_krein_integral", "moment_converse_gate",
    "classify_from_moment_asymptote", "factorization_indeterminacy", "gamma_series", "density_converse_gate",
    "classify_from_density_asymptote", "tauberian_density_asymptote", "stationary_excess",
]

X = ed.Var("x")


class Outcome(str, enum.Enum):
    DETERMINATE = "determinate"
    INDETERMINATE = "indeterminate"
    INCONCLUSIVE = "inconclusive"


@dataclass
class Evidence:
    """One evaluated criterion: its id, result and whether it decided the outcome."""

    criterion: str
    result: Any
    decisive: bool = False
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        res = self.result
        if hasattr(res, "to_dict"):
            res = res.to_dict()
        return {"criterion": self.criterion, "result": ed._jsonable(res), "decisive": self.decisive,
                "diagnostics": ed._jsonable(self.diagnostics)}

    @classmethod
    def from_dict(cls, d: dict) -> "Evidence":
        return cls(d["criterion"], d["result"], d["decisive"], d.get("diagnostics", {}))


@dataclass
class Verdict:
    outcome: Outcome
    evidence: list[Evidence] = field(default_factory=list)
    reason: str = ""

    @property
    def decided(self) -> bool:
        return self.outcome is not Outcome.INCONCLUSIVE

    def add(self, criterion: str, result, decisive: bool = False, **diagnostics) -> None:
        self.evidence.append(Evidence(criterion, result, decisive, diagnostics))

    def to_dict(self) -> dict:
        return {"outcome": self.outcome.value, "reason": self.reason,
                "evidence": [e.to_dict() for e in self.evidence]}

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        return cls(Outcome(d["outcome"]), [Evidence.from_dict(e) for e in d["evidence"]], d.get("reason", ""))


def _finish(v: Verdict, outcome: Outcome, reason: str) -> Verdict:
    v.outcome = outcome
    v.reason = reason
    return v


# ---------------------------------------------------------------- inputs

@dataclass(frozen=True)
class MomentSequence:
    """Moments through ``log M(n)``, optionally with ``G = log M`` as an expression
    and the complex-line evaluator ``(n, v) -> log M(n + i v)``."""

    log_m: Callable
    log_expr: ed.Expr | None = None
    complex_log: Callable | None = None
    provenance: str = "closed-form"

    @classmethod
    def from_expr(cls, e: ed.Expr | str, provenance: str = "closed-form") -> "MomentSequence":
        if isinstance(e, str):
            e = ed.parse(e)
        f = ed.compile_expr(e)
        return cls(f, e, lambda n, v: f(np.asarray(n) + 1j * np.asarray(v)), provenance)

    def log_value(self, n):
        return self.log_m(n)

    def value(self, n):
        with np.errstate(over="ignore"):
            return np.exp(self.log_m(n))


@dataclass(frozen=True)
class DensityAsymptote:
    """``nu(x)`` compared with ``exp(-G_*(log x))``.

    ``relation`` is ``"big-o"`` (upper bound on the density), ``"two-sided"``
    (bounded above and below by constant multiples) or ``"tail-big-o"``
    (upper bound on the tail, reduced to the density case through the
    stationary-excess law). The relation cannot be verified from data, so it
    is recorded as asserted.
    """

    gstar: cx.SmoothFunction
    relation: str = "two-sided"
    asserted: bool = True

    def __post_init__(self):
        if self.relation not in ("big-o", "two-sided", "tail-big-o"):
            raise ValueError(f"unknown relation {self.relation!r}")

    @classmethod
    def from_expr(cls, e: ed.Expr | str, relation: str = "two-sided", lower: float | None = None) -> "DensityAsymptote":
        return cls(cx.SmoothFunction.from_expr(e, lower=lower), relation)


# ---------------------------------------------------------------- boundedness along a grid

@dataclass
class GateCheck:
    """Boundedness of ``exp(L(x))`` judged from ``L`` along a doubling grid."""

    holds: bool
    log_values: list[float]
    grid: list[float]
    rule: str

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {"holds": self.holds, "rule": self.rule, "grid": self.grid, "log_values": self.log_values}


def _bounded(grid, logs) -> GateCheck:
    grid = [float(g) for g in grid]
    logs = [float(v) for v in logs]
    pairs = [(g, v) for g, v in zip(grid, logs) if not math.isnan(v)]
    if len(pairs) < 4:
        return GateCheck(False, logs, grid, "fewer than four evaluable grid points")
    g, L = zip(*pairs)
    if L[-1] == -math.inf:
        return GateCheck(True, logs, grid, "underflows to zero along the grid")
    if any(v == math.inf for v in L):
        return GateCheck(False, logs, grid, "overflows along the grid")
    d = np.diff(np.asarray(L[-4:]))
    tol = 1e-9 * max(1.0, abs(L[-1]))
    if np.all(d <= tol):
        return GateCheck(True, logs, grid, "non-increasing over the last three steps")
    if np.all(d > 0) and d[1] <= 0.75 * d[0] and d[2] <= 0.75 * d[1]:
        return GateCheck(True, logs, grid, "increments shrink geometrically over the last three steps")
    return GateCheck(False, logs, grid, "grows over the last three steps")


def _log_gate(expr: ed.Expr | None, fallback: Callable, lower: float, grid=None) -> GateCheck:
    if grid is None:
        grid = cx.doubling_grid(max(lower, 1.0))
    if expr is not None:
        s, L = ed.log_evaluate(expr, np.asarray(grid))
        L = np.where(np.asarray(s) > 0, L, np.nan)
    else:
        with np.errstate(all="ignore"):
            L = np.asarray([fallback(x) for x in grid], dtype=float)
    return _bounded(grid, L)


# ---------------------------------------------------------------- classical criteria

def carleman(M: MomentSequence, lower: float = 1.0, config: oracle.BlockConfig | None = None) -> ConvergenceVerdict:
    """Convergence of ``sum M(n)^(-1/(2n))``. Divergence implies determinacy."""
    if M.log_expr is not None:
        term = ed.simplify(ed.Exp(ed.Neg(ed.Div(M.log_expr, ed.Mul(ed.Const(2.0), ed.Var(_var(M.log_expr)))))))
        return ed.converges(term, "series", lower, config=config)

    def log_term(n):
        n = np.asarray(n, dtype=float)
        return -np.asarray(M.log_m(n), dtype=float) / (2.0 * n)

    return oracle.block_extrapolate(None, lower, "series", log_f=log_term, config=config)


def _var(e: ed.Expr) -> str:
    v = ed.variables(e)
    return next(iter(v)) if v else "x"


def _as_expr_or_callable(f, var="x"):
    if isinstance(f, str):
        return ed.parse(f, var)
    return f


def krein_pedersen(neg_log_density, x0: float | None = None, config: oracle.BlockConfig | None = None) -> ConvergenceVerdict:
    """Convergence of ``int_{x0}^inf -log nu(x^2) / (1 + x^2) dx``.

    ``neg_log_density`` is ``x -> -log nu(x)`` as an expression, its text, or a
    callable. Convergence implies indeterminacy. ``x0`` defaults to
    ``max(l, 2)`` with ``l`` the first doubling-grid point where
    ``-log nu(x^2) > 0``.
    """
    f = _as_expr_or_callable(neg_log_density)
    if isinstance(f, ed.Expr):
        x = ed.Var(_var(f))
        integrand = ed.simplify(ed.Div(ed.substitute(f, ed.Pow(x, 2.0)), ed.Add(ed.Const(1.0), ed.Pow(x, 2.0))))
        fn = ed.compile_expr(integrand)
    else:
        def fn(x, _f=f):
            x = np.asarray(x, dtype=float)
            return np.asarray(_f(x * x), dtype=float) / (1.0 + x * x)
        integrand = None
    if x0 is None:
        x0 = 2.0
        for g in cx.doubling_grid(0.0, 0, 40):
            with np.errstate(all="ignore"):
                v = float(fn(g))
            if v > 0:
                x0 = max(float(g), 2.0)
                break
    if integrand is not None:
        v = ed.converges(integrand, "integral", x0, config=config)
    else:
        v = oracle.block_extrapolate(fn, x0, "integral", config=config)
    v.diagnostics["x0"] = x0
    return v


def hardy_tail_equivalence(tail: Callable | None, c: float, *, log_tail: Callable | None = None,
                           grid: Sequence[float] | None = None) -> GateCheck:
    """Is ``nu_bar(x) = O(exp(-c sqrt(x) - log(x)/2))`` along the doubling grid?

    Pass ``log_tail`` for tails below the float range. The default grid runs
    to ``2^1000`` because the growth of ``c sqrt(x)`` against a slightly
    slower decay can set in very late; it stops where the tail underflows.
    """
    if not c > 0:
        raise ValueError("c must be positive")
    if grid is None:
        grid = cx.doubling_grid(0.0, 1, 1000)
    grid = np.asarray(grid, dtype=float)
    if log_tail is None:
        def log_tail(x, _t=tail):
            v = float(_t(x))
            return math.log(v) if v > 0 else -math.inf
    L = []
    for x in grid:
        lt = float(log_tail(x))
        if lt == -math.inf:
            break
        L.append(lt + c * math.sqrt(x) + 0.5 * math.log(x))
    return _bounded(grid[:len(L)], L)


# ---------------------------------------------------------------- moment side

def _expr_of(G: cx.ConvexProfile) -> ed.Expr | None:
    return G.g.expr


def moment_krein_integral(G: cx.ConvexProfile, lower: float | None = None,
                          config: oracle.BlockConfig | None = None) -> ConvergenceVerdict:
    """Convergence of ``int (u G'(u) - G(u)) G''(u) exp(-G'(u)/2) du``.

    Convergence implies indeterminacy of the law with ``log M ~ G``.
    """
    lo = float(G.grid[0]) if lower is None else lower
    e = _expr_of(G)
    if e is not None:
        u = ed.Var(_var(e))
        d1 = ed.differentiate(e)
        d2 = ed.differentiate(d1)
        integrand = ed.simplify(ed.Mul(ed.Mul(ed.Sub(ed.Mul(u, d1), e), d2),
                                       ed.Exp(ed.Neg(ed.Div(d1, ed.Const(2.0))))))
        return ed.converges(integrand, "integral", lo, config=config)
    g = G.g

    def log_f(u):
        u = np.asarray(u, dtype=float)
        d1 = np.asarray(g.d1(u), dtype=float)
        with np.errstate(all="ignore"):
            return np.log(u * d1 - np.asarray(g.f(u), dtype=float)) + np.log(np.asarray(g.d2(u), dtype=float)) - d1 / 2.0

    return oracle.block_extrapolate(None, lo, "integral", log_f=log_f, config=config)


def moment_converse_gate(G: cx.ConvexProfile) -> GateCheck:
    """Boundedness of ``u exp(-G'(u)/2)``; opens the determinate direction."""
    e = _expr_of(G)
    expr = None
    if e is not None:
        u = ed.Var(_var(e))
        expr = ed.simplify(ed.Mul(u, ed.Exp(ed.Neg(ed.Div(ed.differentiate(e), ed.Const(2.0))))))
    return _log_gate(expr, lambda u: math.log(u) - float(G.d1(u)) / 2.0, G.lower,
                     None if expr is not None else G.grid)


def _moment_chain_integral(G: cx.ConvexProfile, config=None) -> ConvergenceVerdict:
    """Convergence of ``int exp(-G'(u)/2) du``, the middle link of the moment-side chain."""
    e = _expr_of(G)
    lo = float(G.grid[0])
    if e is not None:
        integrand = ed.simplify(ed.Exp(ed.Neg(ed.Div(ed.differentiate(e), ed.Const(2.0)))))
        return ed.converges(integrand, "integral", lo, config=config)
    return oracle.block_extrapolate(None, lo, "integral",
                                    log_f=lambda u: -np.asarray(G.d1(u), dtype=float) / 2.0, config=config)


def classify_from_moment_asymptote(G: cx.ConvexProfile, cond_b=None, *, M: MomentSequence | None = None,
                                   config: oracle.BlockConfig | None = None) -> Verdict:
    """Classify a law with ``M(n) ~ exp(G(n))``.

    ``cond_b`` is the Fourier-domination condition on the normalized Esscher
    transforms: a computed check (anything truthy with a ``to_dict``), a
    boolean user assertion, or None when unknown. Order of evaluation:
    the asymptotically parabolic check on ``G``, Carleman (divergence decides
    unconditionally), then the Krein-type integral (convergence decides,
    given ``cond_b``) and finally the gated converse.
    """
    v = Verdict(Outcome.INCONCLUSIVE)
    ap = cx.check_asymptotically_parabolic(G)
    v.add("asymptotically-parabolic", ap.status, diagnostics=ap.to_dict())
    if M is None and G.g.expr is not None:
        M = MomentSequence.from_expr(G.g.expr)
    if M is not None:
        car = carleman(M, config=config)
        v.add("carleman", car, decisive=car.diverges)
        if car.diverges:
            return _finish(v, Outcome.DETERMINATE, "Carleman series diverges")
    if not ap.passed:
        return _finish(v, Outcome.INCONCLUSIVE, f"G is not asymptotically parabolic: {ap.reason}")
    if cond_b is None or not bool(cond_b):
        status = "not established" if cond_b is None else "fails"
        v.add("condition-b", cond_b if cond_b is not None else "unknown", diagnostics={"status": status})
        return _finish(v, Outcome.INCONCLUSIVE, f"Fourier domination condition {status}")
    v.add("condition-b", cond_b, diagnostics={"asserted": isinstance(cond_b, bool)})
    integral = moment_krein_integral(G, config=config)
    v.add("moment-krein-integral", integral, decisive=integral.converges)
    if integral.converges:
        return _finish(v, Outcome.INDETERMINATE, "Krein-type moment integral converges")
    gate = moment_converse_gate(G)
    v.add("moment-converse-gate", gate)
    if gate.holds:
        chain = _moment_chain_integral(G, config=config)
        v.add("exp(-G'/2)-integral", chain)
        if integral.diverges:
            v.evidence[-3].decisive = True
            return _finish(v, Outcome.DETERMINATE, "Krein-type moment integral diverges and the converse gate holds")
    return _finish(v, Outcome.INCONCLUSIVE, "no criterion decided")


def factorization_indeterminacy(G: cx.ConvexProfile, log_m: Callable, cond_b=None, *, horizon: int = 1024,
                                config: oracle.BlockConfig | None = None) -> Verdict:
    """Indeterminacy of ``M(n) * m(n)`` from that of the base sequence ``exp(G(n))``.

    ``log_m`` is ``n -> log m(n)``; ``m`` must be positive, so a ``-inf`` or
    nan at any integer ``n <= horizon`` is rejected.
    """
    n = np.arange(0, horizon + 1, dtype=float)
    with np.errstate(all="ignore"):
        lm = np.asarray([float(log_m(k)) for k in n])
    bad = ~np.isfinite(lm) & ~(lm == np.inf)
    if bad.any():
        raise ValueError(f"factor sequence vanishes or is undefined at n={int(n[np.argmax(bad)])}")
    v = Verdict(Outcome.INCONCLUSIVE)
    v.add("factor-positive", True, diagnostics={"horizon": horizon})
    ap = cx.check_asymptotically_parabolic(G)
    v.add("asymptotically-parabolic", ap.status, diagnostics=ap.to_dict())
    if not ap.passed:
        return _finish(v, Outcome.INCONCLUSIVE, f"base G is not asymptotically parabolic: {ap.reason}")
    if cond_b is None or not bool(cond_b):
        v.add("condition-b", cond_b if cond_b is not None else "unknown")
        return _finish(v, Outcome.INCONCLUSIVE, "Fourier domination condition not established for the base sequence")
    v.add("condition-b", cond_b, diagnostics={"asserted": isinstance(cond_b, bool)})
    integral = moment_krein_integral(G, config=config)
    v.add("moment-krein-integral", integral, decisive=integral.converges)
    if integral.converges:
        return _finish(v, Outcome.INDETERMINATE, "base sequence indeterminate and the factor never vanishes")
    return _finish(v, Outcome.INCONCLUSIVE, "base integral does not converge")


# ---------------------------------------------------------------- density side

def _gstar_fn(gstar) -> cx.SmoothFunction:
    return gstar.g if isinstance(gstar, cx.ConvexProfile) else gstar


def gamma_series(gstar, config: oracle.BlockConfig | None = None) -> ConvergenceVerdict:
    """Convergence of ``sum_n exp(-gamma(n)/2)`` with ``gamma = (G_*')^-1``.

    Divergence implies determinacy. With an expression for ``G_*`` the sum is
    decided through ``int exp(-y/2) G_*''(y) dy`` (substitute ``n = G_*'(y)``;
    the terms are monotone so the integral test is exact). Otherwise each term
    is computed by monotone inversion.
    """
    g = _gstar_fn(gstar)
    lo = max(g.lower + 1.0, 1.0) if math.isfinite(g.lower) else 1.0
    if isinstance(gstar, cx.ConvexProfile):
        lo = float(gstar.grid[0])
    if g.expr is not None:
        y = ed.Var(_var(g.expr))
        d2 = ed.differentiate(g.expr, 2)
        integrand = ed.simplify(ed.Mul(ed.Exp(ed.Neg(ed.Div(y, ed.Const(2.0)))), d2))
        v = ed.converges(integrand, "integral", lo, config=config)
        v.diagnostics["route"] = "substitution n = G_*'(y)"
        if v.decided:
            return v
    n0 = max(1.0, math.ceil(float(g.d1(lo))))

    def log_term(n):
        n = np.atleast_1d(np.asarray(n, dtype=float))
        out = np.empty(n.shape)
        for i, k in enumerate(n):
            try:
                out[i] = -cx.invert_monotone(g.d1, k, lower=g.lower, x0=lo, fprime=g.d2) / 2.0
            except cx.RangeError:
                out[i] = np.nan
        return out

    v = oracle.block_extrapolate(None, n0, "series", log_f=log_term, config=config)
    v.diagnostics["route"] = "inversion"
    return v


def density_converse_gate(gstar) -> GateCheck:
    """Boundedness of ``G_*'(x) exp(-x/2)``; opens the indeterminate direction of the sum test."""
    g = _gstar_fn(gstar)
    expr = None
    if g.expr is not None:
        y = ed.Var(_var(g.expr))
        expr = ed.simplify(ed.Mul(ed.differentiate(g.expr), ed.Exp(ed.Neg(ed.Div(y, ed.Const(2.0))))))
    grid = gstar.grid if isinstance(gstar, cx.ConvexProfile) and expr is None else None
    return _log_gate(expr, lambda x: math.log(float(g.d1(x))) - x / 2.0, g.lower, grid)


def _gstar_exp_integral(g: cx.SmoothFunction, lo: float, config=None) -> ConvergenceVerdict:
    if g.expr is not None:
        y = ed.Var(_var(g.expr))
        integrand = ed.simplify(ed.Mul(g.expr, ed.Exp(ed.Neg(ed.Div(y, ed.Const(2.0))))))
        return ed.converges(integrand, "integral", lo, config=config)
    return oracle.block_extrapolate(None, lo, "integral",
                                    log_f=lambda x: np.log(np.asarray(g.f(x), dtype=float)) - np.asarray(x) / 2.0,
                                    config=config)


def _krein_for_gstar(g: cx.SmoothFunction, config=None) -> ConvergenceVerdict:
    if g.expr is not None:
        x = ed.Var(_var(g.expr))
        return krein_pedersen(ed.simplify(ed.substitute(g.expr, ed.Log(x))), config=config)
    return krein_pedersen(lambda x: g.f(np.log(x)), config=config)


def _moment_range_note(adm: cx.LimitCheck) -> str:
    """Moment range implied by a finite slope ``L = lim G_*(x)/x``.

    Then ``exp(-G_*(log x))`` behaves like ``x^-L`` up to subpolynomial
    factors, so ``int x^n nu(dx)`` is finite only for ``n < L - 1``.
    """
    r = np.asarray(adm.deviations, dtype=float)
    if adm.status != "fail" or len(r) < 4:
        return ""
    steps = np.abs(np.diff(r[-4:]))
    if not (np.all(np.isfinite(r[-4:])) and steps[-1] <= 1e-3 * max(1.0, abs(r[-1]))):
        return ""
    L = float(r[-1])
    return (f"; G_*(x)/x tends to {L:.4g}, so the density behaves like x^{-L:.4g} up to "
            f"subpolynomial factors and moments are finite only for n < {L - 1.0:.4g}")


def classify_from_density_asymptote(d: DensityAsymptote, config: oracle.BlockConfig | None = None) -> Verdict:
    """Classify a law with density (or tail) comparable to ``exp(-G_*(log x))``.

    Admissibility and the asymptotically parabolic property of ``G_*`` come
    first. Divergence of the gamma series gives determinacy under any
    relation. For a two-sided relation, convergence gives indeterminacy when
    the converse gate holds, and Krein's integral converging gives it
    directly.
    """
    v = Verdict(Outcome.INCONCLUSIVE)
    v.add("relation", d.relation, diagnostics={"asserted": d.asserted})
    adm = cx.check_admissible(d.gstar)
    v.add("admissible", adm.status, diagnostics=adm.to_dict())
    if not adm.passed:
        return _finish(v, Outcome.INCONCLUSIVE, f"not admissible: {adm.reason}{_moment_range_note(adm)}")
    try:
        prof = cx.ConvexProfile.certify(d.gstar)
    except cx.CertificationError as exc:
        return _finish(v, Outcome.INCONCLUSIVE, f"not convex: {exc}")
    ap = cx.check_asymptotically_parabolic(prof)
    v.add("asymptotically-parabolic", ap.status, diagnostics=ap.to_dict())
    if not ap.passed:
        return _finish(v, Outcome.INCONCLUSIVE, f"G_* is not asymptotically parabolic: {ap.reason}")
    s = gamma_series(prof, config=config)
    v.add("gamma-series", s, decisive=s.diverges)
    if s.diverges:
        return _finish(v, Outcome.DETERMINATE, "gamma series diverges")
    if d.relation != "two-sided":
        return _finish(v, Outcome.INCONCLUSIVE, "gamma series does not diverge and the relation is one-sided")
    gate = density_converse_gate(prof)
    v.add("density-converse-gate", gate)
    cross = _gstar_exp_integral(d.gstar, float(prof.grid[0]), config)
    v.add("G_*exp(-x/2)-integral", cross)
    krein = _krein_for_gstar(d.gstar, config)
    v.add("krein-pedersen", krein, decisive=krein.converges)
    if s.converges and gate.holds:
        v.evidence[[e.criterion for e in v.evidence].index("gamma-series")].decisive = True
        return _finish(v, Outcome.INDETERMINATE, "gamma series converges and the converse gate holds")
    if krein.converges:
        return _finish(v, Outcome.INDETERMINATE, "Krein-Pedersen integral converges")
    return _finish(v, Outcome.INCONCLUSIVE, "no criterion decided")


def tauberian_density_asymptote(G: cx.ConvexProfile, grid=None):
    """Predicted density ``(2 pi)^-1/2 exp(-G_*(log x)) / (x s_{G_*}(log x))``.

    Returns ``(log_density, density, conjugate_profile)``; the callables take
    ``x > 0``.
    """
    conj = cx.legendre_profile(G, grid)
    g = conj.g

    def log_density(x):
        x = np.asarray(x, dtype=float)
        y = np.log(x)
        return (-0.5 * math.log(2.0 * math.pi) - np.asarray(g.f(y), dtype=float) - y
                + 0.5 * np.log(np.asarray(g.d2(y), dtype=float)))

    def density(x):
        return np.exp(log_density(x))

    return log_density, density, conj


def stationary_excess(density: Callable, M1: float, *, upper: float = np.inf, tol: float = 1e-10) -> Callable:
    """Density ``x -> nu_bar(x) / M1`` of the stationary-excess law."""
    if not M1 > 0:
        raise ValueError("first moment must be positive")

    def excess(x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([oracle.quad(density, max(v, 0.0), upper, tol) / M1 if v < upper else 0.0 for v in arr])
        return float(out[0]) if np.ndim(x) == 0 else out

    return excess
