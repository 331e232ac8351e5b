import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stieltjes import convex as cx
from stieltjes import exprdsl as ed


# ---------------------------------------------------------------- smooth functions

def test_symbolic_smooth_function_is_exact():
    g = cx.SmoothFunction.from_expr("x*log(x+1)")
    assert g.source == "symbolic" and g.error_model() == "exact"
    assert g.d2(3.0) == pytest.approx(5.0 / 16.0, rel=1e-15)


def test_numeric_smooth_function_records_step():
    g = cx.SmoothFunction.from_callable(lambda u: np.exp(u / 2), lower=0.0)
    assert g.h_floor == 1e-5 and g.h_rel == 1e-5
    for u in (1.0, 10.0, 40.0):
        assert g.d1(u) == pytest.approx(0.5 * math.exp(u / 2), rel=1e-8)
        # roundoff of the Richardson second difference: about 6 eps |f| / h^2
        h = max(1e-5, 1e-5 * u)
        bound = 6 * np.finfo(float).eps * math.exp(u / 2) / h ** 2 + 1e-8 * math.exp(u / 2)
        assert abs(g.d2(u) - 0.25 * math.exp(u / 2)) <= bound


def test_affine_function_fails_certification():
    with pytest.raises(cx.CertificationError):
        cx.profile("2*x+1")


def test_certification_caps_at_overflow():
    G = cx.profile("exp(x)")
    assert G.horizon < 1024 and np.isfinite(G.g.f(G.horizon))


# ---------------------------------------------------------------- inversion

def test_invert_identity():
    assert cx.invert_monotone(lambda u: u, 3.0) == pytest.approx(3.0, rel=1e-10)


@pytest.mark.parametrize("c", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("n", [1.0, 10.0, 1e4])
def test_invert_exponential_derivative(c, n):
    # (c/2) e^{x/2} = n  =>  x = 2 log(2n/c)
    x = cx.invert_monotone(lambda x: 0.5 * c * math.exp(x / 2), n)
    assert x == pytest.approx(2 * math.log(2 * n / c), rel=1e-10)


def test_invert_out_of_range():
    f = lambda u: math.log(u + 1) + u / (u + 1)
    with pytest.raises(cx.RangeError):
        cx.invert_monotone(f, -5.0, lower=0.0)


@given(st.floats(-50, 50))
def test_invert_cubic_plus_linear(y):
    x = cx.invert_monotone(lambda u: u ** 3 + u, y)
    assert abs(x ** 3 + x - y) <= 1e-10 * max(1.0, abs(y))


# ---------------------------------------------------------------- Legendre transform

@pytest.mark.parametrize("x", [0.0, 1.0, 2.0])
def test_parabola_self_dual(x):
    assert cx.legendre(cx.profile("x^2/2"), x) == pytest.approx(x * x / 2, abs=1e-12)


@pytest.mark.parametrize("x", [0.5, 1.0, 3.0])
def test_scaled_parabola(x):
    assert cx.legendre(cx.profile("2*x^2/2"), x) == pytest.approx(x * x / 4, rel=1e-12)


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("n", [2.0, 50.0])
def test_exponential_conjugate(beta, n):
    val = cx.legendre(cx.profile(f"exp({beta}*x)"), n)
    assert val == pytest.approx((n / beta) * (math.log(n / beta) - 1), rel=1e-10)


def test_conjugate_profile_of_parabola():
    Gs = cx.legendre_profile(cx.profile("x^2/2"))
    for x in (1.0, 8.0, 100.0):
        assert Gs.d1(x) == pytest.approx(x, rel=1e-10)
        assert Gs.scale(x) == pytest.approx(1.0, rel=1e-10)


def test_conjugate_scale_of_scaled_parabola():
    t = 3.0
    Gs = cx.legendre_profile(cx.profile(f"{t}*x^2/2"))
    for x in (1.0, 30.0):
        assert Gs.scale(x) == pytest.approx(math.sqrt(t), rel=1e-10)


@pytest.mark.parametrize("text", ["x^2/2", "x*log(x+1)", "exp(x/2)", "x^1.5", "x*log(x)"])
def test_legendre_involution(text):
    G = cx.profile(text, grid=cx.doubling_grid(0.0, 1, 12))
    Gs = cx.legendre_profile(G)
    Gss = cx.legendre_profile(Gs)
    for u in G.grid:
        assert abs(Gss.value(u) - G.value(u)) / (1 + abs(G.value(u))) <= 1e-5


@pytest.mark.parametrize("text", ["x^2/2", "x*log(x+1)", "exp(x/4)"])
def test_conjugate_derivative_inverts(text):
    G = cx.profile(text, grid=cx.doubling_grid(0.0, 1, 14))
    Gs = cx.legendre_profile(G)
    for u in G.grid:
        assert abs(Gs.d1(G.d1(u)) - u) <= 1e-8 * max(1.0, u)


# ---------------------------------------------------------------- limit checks

@pytest.mark.parametrize("s,expected", [
    (lambda u: np.ones_like(np.asarray(u, dtype=float)), "pass"),
    (np.sqrt, "pass"),
    (lambda u: np.asarray(u, dtype=float), "fail"),
    (lambda x: np.exp(-np.asarray(x) / 4) / np.asarray(x), "pass"),
])
def test_self_neglecting_labels(s, expected):
    assert cx.check_self_neglecting(s, lower=0.0).status == expected


@pytest.mark.parametrize("text", ["x^2/2", "x*log(x+1)", "exp(x/2)"])
def test_asymptotically_parabolic(text):
    assert cx.check_asymptotically_parabolic(cx.profile(text)).passed


def test_passing_scale_is_sublinear():
    for text in ("x^2/2", "x*log(x+1)", "x^1.5"):
        G = cx.profile(text)
        assert cx.check_asymptotically_parabolic(G).passed
        r = [G.scale(u) / u for u in G.grid[-4:]]
        assert r[-1] < r[0] and r[-1] < 1e-3


def test_self_neglecting_closed_under_equivalence():
    # (Psi'')^{-1/2} for Psi = u log(u+1) is asymptotically sqrt(u)
    G = cx.profile("x*log(x+1)")
    a = cx.check_self_neglecting(G.scale, G.grid, lower=0.0)
    b = cx.check_self_neglecting(np.sqrt, G.grid, lower=0.0)
    assert a.passed and b.passed
    assert G.scale(G.grid[-1]) / math.sqrt(G.grid[-1]) == pytest.approx(1.0, rel=1e-5)


@pytest.mark.parametrize("text,expected", [("exp(x/2)", "pass"), ("x^0.5-x", "fail"), ("x", "fail")])
def test_admissible(text, expected):
    assert cx.check_admissible(cx.SmoothFunction.from_expr(text, lower=0.0)).status == expected


def test_flat():
    G = cx.profile("x^2/2")
    assert cx.check_flat(G.scale, G).passed
    assert not cx.check_flat(np.exp, G).passed
    assert cx.check_flat(np.log, G).passed
    H = cx.profile("x*log(x+1)")
    assert cx.check_flat(H.scale, H).passed
    assert cx.check_flat(lambda u: 1.0 / H.scale(u), H).passed


# ---------------------------------------------------------------- dilation and scaling

def test_dilate_parabola():
    D = cx.dilate(cx.profile("x^2/2"), 2.0)
    for u in (1.0, 5.0):
        assert D.value(u) == pytest.approx(2 * u * u)
        assert D.scale(u) == pytest.approx(0.5)


def test_scale_exponential():
    S = cx.scale(cx.profile("exp(0.5*x)"), 3.0)
    assert S.value(2.0) == pytest.approx(3 * math.e)


@given(st.sampled_from(["x^2/2", "x*log(x+1)", "exp(x/2)", "x^1.5"]), st.floats(0.25, 4.0))
def test_dilation_and_scaling_preserve_class(text, c):
    G = cx.profile(text)
    assert cx.check_asymptotically_parabolic(cx.dilate(G, c)).passed
    assert cx.check_asymptotically_parabolic(cx.scale(G, c)).passed
