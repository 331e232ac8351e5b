"""Independent numerical ground truth.

Quadrature, convergence extrapolation over dyadic blocks, characteristic
function inversion, brute-force moments and the Laplace-method moment
asymptote. Nothing here relies on the symbolic machinery in ``exprdsl``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .exprdsl import Convergence, ConvergenceVerdict

__all__ = [
    "QuadratureError", "quad", "BlockConfig", "BlockDiagnostics", "block_extrapolate",
    "fourier_invert_density", "brute_moments", "log_brute_moments",
    "laplace_moment_asymptote", "laplace_moment_integral",
]


class QuadratureError(RuntimeError):
    """Quadrature budget exhausted; carries the partial result."""

    def __init__(self, message: str, partial: float, error: float, interval=None):
        super().__init__(f"{message} (partial={partial!r}, error={error!r}, interval={interval})")
        self.partial = partial
        self.error = error
        self.interval = interval


def quad(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10, *,
         limit: int = 1000, points: Sequence[float] | None = None) -> float:
    """Adaptive QUADPACK integral with error at most ``tol * (1 + |result|)``.

    Infinite endpoints are allowed. Raises QuadratureError when the error
    estimate misses the target.
    """
    if a == b:
        return 0.0
    kw = dict(epsabs=tol, epsrel=tol, limit=limit, full_output=1)
    if points is not None and np.isfinite(a) and np.isfinite(b):
        kw["points"] = list(points)
    res = integrate.quad(f, a, b, **kw)
    val, err = float(res[0]), float(res[1])
    if not math.isfinite(val) or err > tol * (1.0 + abs(val)) * 10.0:
        raise QuadratureError("quadrature did not reach tolerance", val, err, (a, b))
    return val


# ---------------------------------------------------------------- block extrapolation

@dataclass(frozen=True)
class BlockConfig:
    """Thresholds of the dyadic-block convergence test."""

    horizon_integral: float = 2.0 ** 40
    horizon_series: float = 2.0 ** 20
    fit_blocks: int = 6
    geometric_ratio: float = 0.9
    power_exponent: float = 1.2
    # log block ratios this steady (relative spread) count as geometric decay
    ratio_spread: float = 1e-3
    panels: int = 8
    nodes: int = 16
    exact_terms: int = 256


@dataclass
class BlockDiagnostics:
    """Per-block log sums over ``[2^k, 2^(k+1))`` and the fitted tail model."""

    boundaries: list[float]
    log_blocks: list[float]
    fitted_exponent: float = float("nan")
    exponent_stderr: float = float("nan")
    residual: float = float("nan")
    max_ratio: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)


def _gl_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _log_block_integral(log_f, a: float, b: float, cfg: BlockConfig) -> float:
    """log of int_a^b f, Gauss-Legendre in the variable s = log u."""
    x, w = _gl_nodes(cfg.nodes)
    edges = np.linspace(math.log(a), math.log(b), cfg.panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    s = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    lw = np.log((half[:, None] * w[None, :]).ravel())
    with np.errstate(all="ignore"):
        lf = np.asarray(log_f(np.exp(s)), dtype=float)
    if np.any(np.isnan(lf)):
        return float("nan")
    return float(special.logsumexp(lf + s + lw))


def _log_block_series(log_f, a: int, b: int, cfg: BlockConfig) -> float:
    """log of sum_{a <= n < b} f(n); exact when short, Euler-Maclaurin otherwise."""
    if b - a <= cfg.exact_terms:
        n = np.arange(a, b, dtype=float)
        with np.errstate(all="ignore"):
            lf = np.asarray(log_f(n), dtype=float)
        if np.any(np.isnan(lf)):
            return float("nan")
        return float(special.logsumexp(lf))
    li = _log_block_integral(log_f, float(a), float(b), cfg)
    with np.errstate(all="ignore"):
        la, lb = (float(v) for v in np.asarray(log_f(np.array([float(a), float(b)])), dtype=float))
    if any(math.isnan(v) for v in (li, la, lb)):
        return float("nan")
    m = max(li, la, lb)
    if not math.isfinite(m):
        return m
    val = math.exp(li - m) + 0.5 * (math.exp(la - m) - math.exp(lb - m))
    return m + math.log(val) if val > 0 else li


def block_extrapolate(f: Callable | None, lower: float = 1.0, mode: str = "integral", *,
                      log_f: Callable | None = None, config: BlockConfig | None = None) -> ConvergenceVerdict:
    """Decide convergence of an integral or series from dyadic block sums.

    Either ``f`` (positive, vectorized) or ``log_f`` (its logarithm) must be
    given. Rules, applied to the last ``fit_blocks`` finite blocks:
    overflow or non-decreasing blocks mean divergence, successive ratios below
    ``geometric_ratio`` or a fitted decay ``B_k ~ k^-s`` with
    ``s >= power_exponent`` mean convergence, blocks bounded below by ``c/k``
    mean divergence. Everything else is inconclusive.
    """
    cfg = config or BlockConfig()
    if mode not in ("integral", "series"):
        raise ValueError(f"mode must be 'integral' or 'series', not {mode!r}")
    if log_f is None:
        if f is None:
            raise ValueError("need f or log_f")

        def log_f(u, _f=f):
            with np.errstate(all="ignore"):
                return np.log(np.asarray(_f(u), dtype=float))

    horizon = cfg.horizon_integral if mode == "integral" else cfg.horizon_series
    k0 = max(0, math.ceil(math.log2(max(lower, 1.0))))
    k1 = int(math.floor(math.log2(horizon)))
    if k1 - k0 < cfg.fit_blocks:
        k0 = max(0, k1 - cfg.fit_blocks - 1)
    bounds, logs = [], []
    for k in range(k0, k1):
        a, b = 2.0 ** k, 2.0 ** (k + 1)
        if mode == "integral":
            v = _log_block_integral(log_f, a, b, cfg)
        else:
            v = _log_block_series(log_f, int(a), int(b), cfg)
        bounds.append(a)
        logs.append(v)
    bounds.append(2.0 ** k1)
    diag = BlockDiagnostics(bounds, logs)
    L = np.array(logs)

    def verdict(v, rule):
        return ConvergenceVerdict(v, "numeric-extrapolation", rule, {"blocks": diag.to_dict(), "mode": mode})

    if np.any(np.isnan(L)):
        return verdict(Convergence.INCONCLUSIVE, "undefined block (nan)")
    if np.any(L == np.inf):
        return verdict(Convergence.DIVERGES, "block overflow")
    if np.all(L == -np.inf):
        return verdict(Convergence.CONVERGES, "all blocks underflow")
    finite = np.isfinite(L)
    last_finite = int(np.nonzero(finite)[0][-1])
    if last_finite < len(L) - 1:
        return verdict(Convergence.CONVERGES, "tail blocks underflow")
    tail = L[-cfg.fit_blocks:]
    ks = np.maximum(np.arange(len(L))[-cfg.fit_blocks:] + float(k0), 1.0)
    d = np.diff(tail)
    diag.max_ratio = float(np.exp(min(d.max(), 709.0)))
    if np.all(d >= -1e-12 * np.maximum(1.0, np.abs(tail[1:]))):
        return verdict(Convergence.DIVERGES, "non-decreasing blocks")
    coef, cov = np.polyfit(np.log(ks), tail, 1, cov=True)
    diag.fitted_exponent = float(-coef[0])
    diag.exponent_stderr = float(math.sqrt(max(cov[0, 0], 0.0)))
    diag.residual = float(np.sqrt(np.mean((np.polyval(coef, np.log(ks)) - tail) ** 2)))
    if diag.max_ratio <= cfg.geometric_ratio:
        return verdict(Convergence.CONVERGES, "geometric block decay")
    if diag.fitted_exponent >= cfg.power_exponent:
        return verdict(Convergence.CONVERGES, f"block decay k^-s with s >= {cfg.power_exponent}")
    # a constant ratio below 1, however close, is geometric; c/k blocks have
    # log ratios drifting like -1/k and fail this test
    if d.max() < 0 and d.max() - d.min() <= cfg.ratio_spread * abs(d.mean()):
        return verdict(Convergence.CONVERGES, "constant block ratio below 1")
    v = tail + np.log(ks)
    if np.all(np.diff(v) >= -1e-9):
        return verdict(Convergence.DIVERGES, "blocks bounded below by c/k")
    return verdict(Convergence.INCONCLUSIVE, "no rule met")


# ---------------------------------------------------------------- Fourier inversion

def fourier_invert_density(charfn: Callable, y_grid, tol: float = 1e-10, *, gauss_var: float,
                           tilt: float = 0.0, period: float | None = None,
                           return_log: bool = False, max_nodes: int = 2 ** 22):
    """Density of X from ``charfn(u) = E[exp(iuX)]`` by the trapezoid rule.

    ``gauss_var`` is a variance ``v > 0`` such that
    ``|charfn(u - i*tilt)| <= C exp(-v u^2 / 2)``; it sets the truncation
    ``U`` so the neglected Gaussian tail is below ``tol``. The step is
    ``2*pi/period``; aliasing copies sit ``period`` apart, so ``period``
    should exceed the spread of the (tilted) law plus the width of ``y_grid``.

    With ``tilt = theta`` the integrand is ``charfn(u - i*theta)``, which is
    the characteristic function of the Esscher-tilted law, and the result is
    multiplied back by ``exp(-theta * y)``. This keeps relative accuracy far in
    the tail. ``charfn`` must accept complex arrays.
    """
    if not gauss_var > 0:
        raise ValueError("characteristic function must carry a Gaussian factor (gauss_var > 0)")
    y = np.atleast_1d(np.asarray(y_grid, dtype=float))
    # tail of int_U^inf exp(-v u^2/2) du below tol
    U = math.sqrt(2.0 * max(-math.log(tol * math.sqrt(gauss_var)), 1.0) / gauss_var) + 1.0
    U = max(U, math.sqrt(2.0 * 40.0 / gauss_var))
    if period is None:
        period = 2.0 * (np.abs(y).max() + 40.0 * math.sqrt(gauss_var)) + 20.0
    h = 2.0 * math.pi / period
    n = int(math.ceil(U / h))
    if n > max_nodes:
        raise ValueError(f"inversion grid too large ({n} nodes)")
    u = np.arange(0, n + 1) * h
    phi = np.asarray(charfn(u - 1j * tilt), dtype=complex)
    w = np.full(u.shape, h)
    w[0] = h / 2.0
    # charfn(u - i theta) is the Fourier transform of exp(theta x) f(x), and
    # its values at -u are the conjugates, so integrate over u >= 0 and take 2 Re
    out = np.empty(y.shape)
    chunk = max(1, int(4e6 // max(len(u), 1)))
    for i in range(0, len(y), chunk):
        yy = y[i:i + chunk]
        ph = np.exp(-1j * np.outer(yy, u))
        out[i:i + chunk] = (ph @ (w * phi)).real / math.pi
    if not return_log:
        return out * np.exp(-tilt * y) if tilt else out
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(out) - tilt * y


# ---------------------------------------------------------------- moments

def log_brute_moments(log_density: Callable, n: float, tol: float = 1e-10, *,
                      y_range: tuple[float, float] = (-200.0, 200.0)) -> float:
    """log of ``int_0^inf x^n nu(x) dx`` from ``log nu``.

    Works in ``y = log x``: the integrand ``exp((n+1) y + log nu(e^y))`` is
    shifted by its maximum on a scan grid before integration.
    """
    lo, hi = y_range
    ys = np.linspace(lo, hi, 8001)
    with np.errstate(all="ignore"):
        g = (n + 1.0) * ys + np.asarray(log_density(np.exp(ys)), dtype=float)
    g = np.where(np.isnan(g), -np.inf, g)
    m = float(np.max(g))
    if not math.isfinite(m):
        raise QuadratureError("integrand vanishes or overflows on the scan grid", m, float("nan"), y_range)
    keep = np.nonzero(g > m - 800.0)[0]
    a, b = ys[max(keep[0] - 1, 0)], ys[min(keep[-1] + 1, len(ys) - 1)]
    peak = float(ys[int(np.argmax(g))])

    def integrand(y):
        with np.errstate(all="ignore"):
            v = (n + 1.0) * y + float(log_density(math.exp(y))) - m
        return math.exp(v) if v == v else 0.0

    val = quad(integrand, a, b, tol, points=[peak])
    return m + math.log(val)


def brute_moments(density: Callable, n: float, tol: float = 1e-10, *, log_density: Callable | None = None,
                  lower: float = 0.0, upper: float = np.inf) -> float:
    """``n``-th moment of a density on ``(lower, upper)``.

    With ``log_density`` (positive half-line only) the computation is done in
    log space and survives moments beyond the float range of the density.
    """
    if log_density is not None:
        return math.exp(log_brute_moments(log_density, n, tol))
    return quad(lambda x: x ** n * density(x), lower, upper, tol)


def laplace_moment_asymptote(gstar, n: float) -> float:
    """log of ``sqrt(2 pi) / s_G(n) * exp(G(n))`` for ``G`` conjugate to ``gstar``.

    ``gstar`` is a ConvexProfile. Uses ``G(n) = n y - G_*(y)`` and
    ``G''(n) = 1/G_*''(y)`` at ``y = (G_*')^{-1}(n)``.
    """
    from .convex import invert_monotone

    g = gstar.g
    y = invert_monotone(g.d1, n, lower=g.lower, fprime=g.d2)
    G_n = n * y - float(g.f(y))
    return 0.5 * math.log(2.0 * math.pi) - 0.5 * math.log(float(g.d2(y))) + G_n


def laplace_moment_integral(gstar, n: float, tol: float = 1e-10) -> float:
    """log of ``int exp(n y - G_*(y)) dy`` over the domain of ``G_*`` by quadrature."""
    from .convex import invert_monotone

    g = gstar.g
    y0 = invert_monotone(g.d1, n, lower=g.lower, fprime=g.d2)
    peak = n * y0 - float(g.f(y0))
    width = float(g.d2(y0)) ** -0.5

    def integrand(y):
        with np.errstate(all="ignore"):
            v = n * y - float(g.f(y)) - peak
        return math.exp(v) if v == v else 0.0

    lo = g.lower if math.isfinite(g.lower) else y0 - 60.0 * width - 60.0
    a = max(lo, y0 - 60.0 * width)
    left = quad(integrand, lo, a, tol) if a > lo else 0.0
    mid = quad(integrand, a, y0 + 60.0 * width, tol, points=[y0])
    right = quad(integrand, y0 + 60.0 * width, np.inf, tol)
    return peak + math.log(left + mid + right)
