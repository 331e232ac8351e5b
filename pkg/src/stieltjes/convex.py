"""Numerical convex analysis on a half-line.

Smooth functions with two derivatives, certified convex profiles, monotone
inversion, Legendre transforms and the finite-horizon membership tests for
asymptotically parabolic functions (scale function self-neglecting), the
admissible subclass (superlinear conjugate) and flatness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import exprdsl as ed

__all__ = [
    "RangeError", "CertificationError", "SmoothFunction", "ConvexProfile", "invert_monotone",
    "legendre", "legendre_profile", "profile", "doubling_grid", "LimitCheck", "check_self_neglecting",
    "check_asymptotically_parabolic", "check_admissible", "check_flat", "dilate", "scale",
]


class RangeError(ValueError):
    """The target value could not be bracketed within the search budget."""


class CertificationError(ValueError):
    """Convexity could not be certified (second derivative not positive)."""


def _as_array(u):
    return np.asarray(u, dtype=float)


def _scalar_out(u, out):
    if np.ndim(u) == 0:
        return float(np.asarray(out).reshape(-1)[0]) if np.ndim(out) else float(out)
    return out


@dataclass(frozen=True)
class SmoothFunction:
    """A function with first and second derivatives on ``(lower, inf)``.

    ``source`` is ``"symbolic"`` (exact derivatives from the expression),
    ``"numeric"`` (central differences, step ``h = max(h_floor, h_rel*|u|)``
    with one Richardson level) or ``"conjugate"`` (built by legendre_profile).
    """

    f: Callable
    d1: Callable
    d2: Callable
    lower: float = -math.inf
    source: str = "numeric"
    expr: ed.Expr | None = None
    h_floor: float | None = None
    h_rel: float | None = None
    label: str = ""

    @classmethod
    def from_expr(cls, e: ed.Expr | str, var: str = "x", lower: float | None = None) -> "SmoothFunction":
        if isinstance(e, str):
            e = ed.parse(e, var)
        d1 = ed.differentiate(e)
        d2 = ed.differentiate(d1)
        a = ed.domain_lower_bound(e) if lower is None else lower
        return cls(_vec(ed.compile_expr(e)), _vec(ed.compile_expr(d1)), _vec(ed.compile_expr(d2)),
                   a, "symbolic", e, label=ed.to_text(e))

    @classmethod
    def from_callable(cls, f: Callable, lower: float = -math.inf, d1: Callable | None = None,
                      d2: Callable | None = None, *, h_floor: float = 1e-5, h_rel: float = 1e-5,
                      label: str = "") -> "SmoothFunction":
        fv = _vec(f)
        if d1 is None:
            d1 = _fd(fv, 1, h_floor, h_rel)
        if d2 is None:
            d2 = _fd(fv, 2, h_floor, h_rel)
        return cls(fv, _vec(d1), _vec(d2), lower, "numeric", None, h_floor, h_rel, label)

    def __call__(self, u):
        return self.f(u)

    def error_model(self) -> str:
        if self.source != "numeric":
            return "exact" if self.source == "symbolic" else "root-finding tolerance"
        return (f"central differences h=max({self.h_floor}, {self.h_rel}*|u|), one Richardson level: "
                "truncation O(h^4), roundoff O(eps*|f|/h^k)")


def _vec(f: Callable) -> Callable:
    def g(u):
        arr = _as_array(u)
        with np.errstate(all="ignore"):
            try:
                out = np.asarray(f(arr), dtype=float)
                if out.shape != arr.shape:
                    out = np.broadcast_to(out, arr.shape).astype(float)
            except (TypeError, ValueError):
                out = np.array([float(f(float(v))) for v in arr.reshape(-1)]).reshape(arr.shape)
        return _scalar_out(u, out)

    return g


def _fd(f: Callable, order: int, h_floor: float, h_rel: float) -> Callable:
    def diff(u, h):
        if order == 1:
            return (f(u + h) - f(u - h)) / (2.0 * h)
        return (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h)

    def d(u):
        u = _as_array(u)
        h = np.maximum(h_floor, h_rel * np.abs(u))
        d_h, d_h2 = diff(u, h), diff(u, h / 2.0)
        return (4.0 * d_h2 - d_h) / 3.0

    return d


def doubling_grid(lower: float = -math.inf, k_min: int = 4, k_max: int = 40) -> np.ndarray:
    """``{2^k_min, ..., 2^k_max}`` restricted to points strictly above ``lower``."""
    g = 2.0 ** np.arange(k_min, k_max + 1)
    return g[g > lower]


@dataclass(frozen=True)
class ConvexProfile:
    """A SmoothFunction with a grid on which convexity has been certified."""

    g: SmoothFunction
    grid: np.ndarray = field(repr=False)

    @classmethod
    def certify(cls, g: SmoothFunction, grid: Sequence[float] | None = None) -> "ConvexProfile":
        grid = doubling_grid(g.lower) if grid is None else np.asarray(grid, dtype=float)
        grid = grid[grid > g.lower]
        if len(grid) == 0:
            raise CertificationError("empty certification grid")
        with np.errstate(all="ignore"):
            v, d1, d2 = (np.asarray([fn(u) for u in grid], dtype=float) for fn in (g.f, g.d1, g.d2))
        ok = np.isfinite(v) & np.isfinite(d1) & np.isfinite(d2)
        # cap at the first non-finite evaluation (overflow guard)
        stop = len(grid) if ok.all() else int(np.argmin(ok))
        if stop < 2:
            raise CertificationError(f"{g.label or 'function'} is not finite on the certification grid")
        grid, d1, d2 = grid[:stop], d1[:stop], d2[:stop]
        if np.any(d2 <= 0):
            bad = float(grid[np.argmax(d2 <= 0)])
            raise CertificationError(f"second derivative of {g.label or 'function'} is not positive at u={bad!r}")
        # a stall of G' with G'' > 0 is below float resolution: cap the grid there
        inc = np.diff(d1)
        stall = (inc <= 0) & (np.abs(inc) <= 1e-13 * np.maximum(np.abs(d1[1:]), np.abs(d1[:-1])))
        if stall.any() and int(np.argmax(stall)) >= 2:
            grid, d1 = grid[:int(np.argmax(stall)) + 1], d1[:int(np.argmax(stall)) + 1]
        if np.any(np.diff(d1) <= 0):
            bad = float(grid[1:][np.argmax(np.diff(d1) <= 0)])
            raise CertificationError(f"first derivative of {g.label or 'function'} does not increase near u={bad!r}")
        return cls(g, grid)

    @property
    def lower(self) -> float:
        return self.g.lower

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])

    def value(self, u):
        return self.g.f(u)

    def d1(self, u):
        return self.g.d1(u)

    def d2(self, u):
        return self.g.d2(u)

    def scale(self, u):
        """Scale function ``s_G(u) = G''(u)^(-1/2)``."""
        with np.errstate(all="ignore"):
            return _scalar_out(u, np.asarray(self.g.d2(u), dtype=float) ** -0.5)

    def to_dict(self) -> dict:
        return {"function": self.g.label, "source": self.g.source, "lower": self.g.lower,
                "grid": [float(v) for v in self.grid]}


def profile(e: ed.Expr | str | SmoothFunction, grid: Sequence[float] | None = None, var: str = "x",
            lower: float | None = None) -> ConvexProfile:
    """Certified profile from an expression, its text, or a SmoothFunction."""
    if not isinstance(e, SmoothFunction):
        e = SmoothFunction.from_expr(e, var, lower)
    return ConvexProfile.certify(e, grid)


# ---------------------------------------------------------------- inversion

def invert_monotone(f: Callable[[float], float], y: float, tol: float = 1e-10, *,
                    lower: float = -math.inf, upper: float = math.inf, x0: float | None = None,
                    fprime: Callable[[float], float] | None = None, budget: int = 1100) -> float:
    """Solve ``f(x) = y`` for strictly increasing ``f`` on ``(lower, upper)``.

    A doubling search brackets the root, then safeguarded Newton steps (when
    ``fprime`` is given) or bisection refine it until
    ``|f(x) - y| <= tol * max(1, |y|)`` or the bracket is a few ulps wide.
    """
    y = float(y)
    target = tol * max(1.0, abs(y))

    def F(x):
        with np.errstate(all="ignore"):
            return float(f(x)) - y

    if x0 is None:
        x0 = 1.0
        if math.isfinite(lower):
            x0 = max(x0, lower + 1.0)
        if math.isfinite(upper):
            x0 = min(x0, 0.5 * (upper + lower) if math.isfinite(lower) else upper - 1.0)
    fx0 = F(x0)
    if not math.isfinite(fx0):
        raise RangeError(f"f is not finite at the starting point {x0!r}")
    if abs(fx0) <= target:
        return x0
    lo = hi = x0
    flo = fhi = fx0
    step = max(1.0, abs(x0))
    for _ in range(budget):
        if fhi < 0:
            lo, flo = hi, fhi
            hi = hi + step if not math.isfinite(upper) else hi + 0.5 * (upper - hi)
            step *= 2.0
            fhi = F(hi)
            if math.isnan(fhi):
                raise RangeError(f"f undefined at {hi!r} while bracketing y={y!r}")
            if fhi == math.inf:
                break
        elif flo > 0:
            hi, fhi = lo, flo
            lo = lo - step if not math.isfinite(lower) else lower + 0.5 * (lo - lower)
            step *= 2.0
            flo = F(lo)
            if math.isnan(flo):
                raise RangeError(f"f undefined at {lo!r} while bracketing y={y!r}")
            if flo == -math.inf:
                break
        else:
            break
    else:
        raise RangeError(f"could not bracket y={y!r} within {budget} doublings")
    if not (flo <= 0 <= fhi):
        raise RangeError(f"could not bracket y={y!r} within {budget} doublings")
    x = lo if abs(flo) < abs(fhi) else hi
    fx = flo if x == lo else fhi
    for _ in range(400):
        if abs(fx) <= target:
            return x
        cand = None
        if fprime is not None and math.isfinite(fx):
            d = float(fprime(x))
            if d > 0 and math.isfinite(d):
                cand = x - fx / d
                if not (lo < cand < hi):
                    cand = None
        if cand is None:
            cand = 0.5 * (lo + hi) if math.isfinite(lo) and math.isfinite(hi) else x
        if cand in (lo, hi):
            return x
        fc = F(cand)
        if math.isnan(fc):
            raise RangeError(f"f undefined at {cand!r}")
        if fc < 0:
            lo, flo = cand, fc
        else:
            hi, fhi = cand, fc
        x, fx = cand, fc
        if hi - lo <= 4.0 * np.spacing(max(abs(lo), abs(hi))):
            return x
    return x


def legendre(G: ConvexProfile | SmoothFunction, x: float, tol: float = 1e-10) -> float:
    """``G_*(x) = x u - G(u)`` with ``G'(u) = x``."""
    g = G.g if isinstance(G, ConvexProfile) else G
    u = invert_monotone(g.d1, x, tol, lower=g.lower, fprime=g.d2)
    return x * u - float(g.f(u))


def _conjugate_function(g: SmoothFunction, tol: float) -> SmoothFunction:
    def d1_scalar(x):
        return invert_monotone(g.d1, float(x), tol, lower=g.lower, fprime=g.d2)

    def f_scalar(x):
        u = d1_scalar(x)
        return float(x) * u - float(g.f(u))

    def d2_scalar(x):
        return 1.0 / float(g.d2(d1_scalar(x)))

    def vec(fn):
        def h(x):
            arr = _as_array(x)
            out = np.array([fn(v) for v in arr.reshape(-1)], dtype=float).reshape(arr.shape)
            return _scalar_out(x, out)
        return h

    # the conjugate is defined on the range of g'
    lower = -math.inf
    if math.isfinite(g.lower):
        with np.errstate(all="ignore"):
            lower = float(g.d1(g.lower + 1e-12 * max(1.0, abs(g.lower))))
    return SmoothFunction(vec(f_scalar), vec(d1_scalar), vec(d2_scalar), lower if math.isfinite(lower) else -math.inf,
                          "conjugate", None, label=f"conjugate of {g.label}")


def legendre_profile(G: ConvexProfile, grid: Sequence[float] | None = None, tol: float = 1e-10) -> ConvexProfile:
    """Profile of ``G_*`` using ``G_*' = (G')^-1`` and ``G_*''(x) = 1/G''(G_*'(x))``.

    The default grid is the image of G's certified grid under ``G'``.
    """
    conj = _conjugate_function(G.g, tol)
    if grid is None:
        grid = np.asarray(G.g.d1(G.grid), dtype=float)
    return ConvexProfile.certify(conj, grid)


# ---------------------------------------------------------------- limit checks

@dataclass
class LimitCheck:
    """Result of a finite-horizon limit check along an increasing grid."""

    status: str  # "pass", "fail" or "inconclusive"
    deviations: list[float]
    grid: list[float]
    tol: float
    w_net: list[float] = field(default_factory=list)
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def __bool__(self) -> bool:
        return self.passed

    @property
    def max_deviation(self) -> float:
        return max(self.deviations) if self.deviations else float("nan")

    @property
    def horizon(self) -> float:
        return self.grid[-1] if self.grid else float("nan")

    def to_dict(self) -> dict:
        return {"status": self.status, "reason": self.reason, "tol": self.tol,
                "grid": self.grid, "deviations": [d if math.isfinite(d) else repr(d) for d in self.deviations]}


def _ratio_check(num: Callable, den_at: Callable, s: Callable, u_grid, w_range, n_w, tol, lower) -> LimitCheck:
    w = np.linspace(w_range[0], w_range[1], n_w)
    grid = [float(u) for u in u_grid]
    devs, kept = [], []
    for u in grid:
        with np.errstate(all="ignore"):
            su = float(s(u))
            base = float(den_at(u))
        if not (math.isfinite(su) and su > 0 and math.isfinite(base) and base != 0):
            continue
        pts = u + w * su
        with np.errstate(all="ignore"):
            vals = np.asarray(num(pts), dtype=float)
        dev = np.abs(vals / base - 1.0)
        dev = np.where(pts <= lower, np.inf, dev)
        dev = np.where(np.isfinite(dev), dev, np.inf)
        devs.append(float(dev.max()))
        kept.append(u)
    if len(devs) < 3:
        return LimitCheck("inconclusive", devs, kept, tol, list(w), "fewer than three evaluable grid points")
    last = devs[-3:]
    if all(d <= tol for d in last) and last[0] >= last[1] >= last[2]:
        return LimitCheck("pass", devs, kept, tol, list(w), "deviation below tol and non-increasing over the last three points")
    if all(d <= tol for d in last):
        return LimitCheck("fail", devs, kept, tol, list(w), "deviation below tol but not monotone over the last three points")
    return LimitCheck("fail", devs, kept, tol, list(w), f"deviation {last[-1]:.3g} above tol {tol:g} at the horizon")


def check_self_neglecting(s: Callable, u_grid: Sequence[float] | None = None, w_range=(-3.0, 3.0),
                          tol: float = 1e-3, *, n_w: int = 13, lower: float = -math.inf) -> LimitCheck:
    """Test ``s(u + w s(u)) / s(u) -> 1`` uniformly over a net of ``w``.

    Passes iff the maximal deviation is at most ``tol`` and non-increasing
    over the last three grid points. Shifted points below ``lower`` count as
    infinite deviation.
    """
    if u_grid is None:
        u_grid = doubling_grid(lower)
    return _ratio_check(s, s, s, u_grid, w_range, n_w, tol, lower)


def check_asymptotically_parabolic(G: ConvexProfile, w_range=(-3.0, 3.0), tol: float = 1e-3,
                                   n_w: int = 13) -> LimitCheck:
    """Self-neglecting test on the scale function of ``G`` along its certified grid."""
    return check_self_neglecting(G.scale, G.grid, w_range, tol, n_w=n_w, lower=G.lower)


def check_flat(b: Callable, G: ConvexProfile, w_range=(-3.0, 3.0), tol: float = 1e-3, n_w: int = 13) -> LimitCheck:
    """Test ``b(u + w s_G(u)) / b(u) -> 1`` with the self-neglecting protocol."""
    return _ratio_check(b, b, G.scale, G.grid, w_range, n_w, tol, G.lower)


def check_admissible(Gs: ConvexProfile | SmoothFunction, u_grid: Sequence[float] | None = None) -> LimitCheck:
    """Superlinear growth ``G_*(x)/x -> inf`` along a doubling grid.

    Accepts an uncertified SmoothFunction so that non-convex candidates can
    be rejected before convexity certification.

    Passes when the ratio increases at every tail step and its increments do
    not shrink geometrically (ratio of successive increments at least 0.5,
    i.e. no visible bounded limit). Fails when the ratio decreases or stays
    constant in the tail. Increasing but with geometrically shrinking
    increments is inconclusive.
    """
    g = Gs.g if isinstance(Gs, ConvexProfile) else Gs
    if u_grid is None:
        u_grid = Gs.grid if isinstance(Gs, ConvexProfile) else doubling_grid(g.lower)
    grid = np.asarray(u_grid, dtype=float)
    grid = grid[grid > max(g.lower, 0.0)]
    with np.errstate(all="ignore"):
        vals = np.asarray([float(g.f(x)) for x in grid])
    ok = np.isfinite(vals)
    grid, vals = grid[ok], vals[ok]
    ratio = vals / grid
    if len(ratio) < 4:
        return LimitCheck("inconclusive", list(ratio), list(grid), 0.0, reason="fewer than four evaluable grid points")
    inc = np.diff(ratio)
    tail = inc[-3:]
    scale_ = np.maximum(1.0, np.abs(ratio[-4:-1]))
    common = dict(deviations=[float(r) for r in ratio], grid=[float(x) for x in grid], tol=0.0)
    if np.any(tail < -1e-12 * scale_):
        return LimitCheck("fail", reason="G_*(x)/x decreases along the grid tail", **common)
    if np.all(np.abs(tail) <= 1e-12 * scale_):
        return LimitCheck("fail", reason="G_*(x)/x is constant along the grid tail", **common)
    shrink = tail[1:] / tail[:-1]
    if np.all(tail > 0) and np.all(shrink >= 0.5):
        return LimitCheck("pass", reason="G_*(x)/x increases without visible bound", **common)
    return LimitCheck("inconclusive", reason="G_*(x)/x increases but its growth stalls", **common)


# ---------------------------------------------------------------- dilation and scaling

def dilate(G: ConvexProfile, c: float) -> ConvexProfile:
    """Profile of ``u -> G(c u)``."""
    if not c > 0:
        raise ValueError("dilation factor must be positive")
    g = G.g
    if g.expr is not None:
        e = ed.simplify(ed.substitute(g.expr, ed.Mul(ed.Const(c), ed.Var(next(iter(ed.variables(g.expr)), "x")))))
        return profile(e, lower=g.lower / c)
    sf = SmoothFunction(_vec(lambda u: g.f(c * _as_array(u))), _vec(lambda u: c * g.d1(c * _as_array(u))),
                        _vec(lambda u: c * c * g.d2(c * _as_array(u))), g.lower / c, g.source,
                        label=f"{g.label} dilated by {c}")
    return ConvexProfile.certify(sf, G.grid / c)


def scale(G: ConvexProfile, c: float) -> ConvexProfile:
    """Profile of ``u -> c G(u)``."""
    if not c > 0:
        raise ValueError("scaling factor must be positive")
    g = G.g
    if g.expr is not None:
        return profile(ed.simplify(ed.Mul(ed.Const(c), g.expr)), lower=g.lower)
    sf = SmoothFunction(_vec(lambda u: c * g.f(u)), _vec(lambda u: c * g.d1(u)), _vec(lambda u: c * g.d2(u)),
                        g.lower, g.source, label=f"{c} * {g.label}")
    return ConvexProfile.certify(sf, G.grid)
