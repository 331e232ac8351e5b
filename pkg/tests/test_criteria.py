import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from stieltjes import convex as cx
from stieltjes import criteria as cr
from stieltjes import levy
from stieltjes.criteria import Outcome


# ---------------------------------------------------------------- classical criteria

@pytest.mark.parametrize("t,expected", [(2.0, "diverges"), (3.0, "converges")])
def test_carleman_ulogu(t, expected):
    M = cr.MomentSequence.from_expr(f"{t}*x*log(x+1)")
    assert cr.carleman(M).verdict.value == expected


def test_carleman_exponential_law_numeric():
    # M(n) = n!, terms ~ sqrt(e/n)
    M = cr.MomentSequence(lambda n: special.gammaln(np.asarray(n) + 1.0), provenance="exponential law")
    v = cr.carleman(M)
    assert v.diverges and v.method != "symbolic"


@pytest.mark.parametrize("text,expected", [
    ("log(x)^2/2 + log(x) + 0.5*log(2*3.141592653589793)", "converges"),
    ("x", "diverges"),
    ("log(x)*log(log(x))", "converges"),
])
def test_krein_pedersen(text, expected):
    assert cr.krein_pedersen(text).verdict.value == expected


def test_krein_pedersen_callable_matches_expression():
    v = cr.krein_pedersen(lambda x: np.log(x) ** 2 / 2 + np.log(x))
    assert v.converges


def test_krein_lower_limit_default():
    v = cr.krein_pedersen("log(x)*log(log(x))")
    assert v.diagnostics["x0"] >= 2.0


def test_hardy_explicit_bound():
    assert cr.hardy_tail_equivalence(None, 1.0, log_tail=lambda x: -2 * math.sqrt(x)).holds


@pytest.mark.parametrize("alpha", [0.5, 1.0, 5.0])
@pytest.mark.parametrize("c", [0.1, 1.0, 10.0])
def test_hardy_fails_on_sqrt_over_log(alpha, c):
    chk = cr.hardy_tail_equivalence(None, c, log_tail=lambda x: -alpha * math.sqrt(x) / math.log(x))
    assert not chk.holds


@pytest.mark.parametrize("c", [0.1, 1.0, 10.0])
def test_hardy_super_decay(c):
    assert cr.hardy_tail_equivalence(lambda x: math.exp(-x), c).holds


# ---------------------------------------------------------------- moment side

@pytest.mark.parametrize("text,expected", [
    ("x^2/2", "converges"),
    ("3*x*log(x+1)", "converges"),
    ("x*log(x)-x", "diverges"),
])
def test_moment_krein_integral(text, expected):
    assert cr.moment_krein_integral(cx.profile(text)).verdict.value == expected


@pytest.mark.parametrize("text,expected", [
    ("x^2/2", True),
    ("2*x*log(x+1)", True),
    ("1.5*x*log(x+1)", False),
    ("2*(x*log(x)-x)", True),
])
def test_moment_converse_gate(text, expected):
    assert cr.moment_converse_gate(cx.profile(text)).holds is expected


def _gaussian_cond_b(t):
    return levy.condition_b_check(levy.LogLevyLaw(t, levy.LevyTriplet(0.0, 1.0, ())))


def test_lognormal_indeterminate():
    v = cr.classify_from_moment_asymptote(cx.profile("x^2/2"), _gaussian_cond_b(1.0))
    assert v.outcome is Outcome.INDETERMINATE
    assert any(e.decisive and e.criterion == "moment-krein-integral" for e in v.evidence)


@pytest.mark.parametrize("t,expected", [(3.0, Outcome.INDETERMINATE), (2.0, Outcome.DETERMINATE)])
def test_ulogu_moment_classification(t, expected):
    cond_b = levy.condition_b_check(levy.LogLevyLaw(t, psi="x*log(x+1)"), n_grid=np.linspace(5, 100, 20))
    v = cr.classify_from_moment_asymptote(cx.profile(f"{t}*x*log(x+1)"), cond_b)
    assert v.outcome is expected


def test_moment_fallthrough_inconclusive():
    v = cr.classify_from_moment_asymptote(cx.profile("x^2"))
    assert v.outcome is Outcome.INCONCLUSIVE
    assert "not established" in v.reason


def test_verdict_round_trip():
    v = cr.classify_from_moment_asymptote(cx.profile("x^2/2"), True)
    d = v.to_dict()
    assert cr.Verdict.from_dict(d).to_dict() == d
    assert [e["criterion"] for e in d["evidence"]][:2] == ["asymptotically-parabolic", "carleman"]


def test_factorization_gaussian_times_positive_jumps():
    pos = levy.LevyTriplet(0.0, 0.0, (levy.DensityMeasure("exp(-r^2)", "positive"),))
    v = cr.factorization_indeterminacy(cx.profile("x^2/2"), lambda n: float(pos.psi(n)), True, horizon=32)
    assert v.outcome is Outcome.INDETERMINATE


def test_factorization_with_factorials():
    v = cr.factorization_indeterminacy(cx.profile("x^2/2"), lambda n: special.gammaln(n + 1.0), True)
    assert v.outcome is Outcome.INDETERMINATE


def test_factorization_rejects_vanishing_factor():
    with pytest.raises(ValueError, match="n=5"):
        cr.factorization_indeterminacy(cx.profile("x^2/2"), lambda n: -math.inf if n == 5 else 0.0, True)


# ---------------------------------------------------------------- density side

@pytest.mark.parametrize("text,expected", [
    ("exp(0.5*x)", "diverges"),
    ("exp(0.7*x)", "diverges"),
    ("exp(0.3*x)", "converges"),
    ("x^2", "converges"),
    ("exp(x/2)+x/2", "diverges"),
    ("0.1*exp(x/2)+x/2", "diverges"),
])
def test_gamma_series(text, expected):
    assert cr.gamma_series(cx.profile(text)).verdict.value == expected


@pytest.mark.parametrize("beta,expected", [(0.3, "converges"), (0.5, "diverges"), (0.7, "diverges")])
def test_gamma_series_inversion_route(beta, expected):
    # callable G_* forces the term-by-term inversion route; terms (n/beta)^(-1/(2 beta))
    g = cx.SmoothFunction(lambda y: np.exp(beta * np.asarray(y)), lambda y: beta * np.exp(beta * np.asarray(y)),
                          lambda y: beta * beta * np.exp(beta * np.asarray(y)), -math.inf, "numeric")
    v = cr.gamma_series(g)
    assert v.diagnostics["route"] == "inversion"
    if v.decided:
        assert v.verdict.value == expected


@pytest.mark.parametrize("text,expected", [("exp(x/2)/x", True), ("exp(x)", False), ("x^2", True)])
def test_density_converse_gate(text, expected):
    assert cr.density_converse_gate(cx.profile(text, lower=1.0)).holds is expected


@pytest.mark.parametrize("alpha", [0.5, 1.0, 5.0])
def test_row1_determinate(alpha):
    d = cr.DensityAsymptote.from_expr(f"{alpha}*exp(x/2)/x")
    assert cr.classify_from_density_asymptote(d).outcome is Outcome.DETERMINATE


@pytest.mark.parametrize("beta,expected", [(0.3, Outcome.INDETERMINATE), (0.5, Outcome.DETERMINATE)])
def test_row2(beta, expected):
    assert cr.classify_from_density_asymptote(cr.DensityAsymptote.from_expr(f"exp({beta}*x)")).outcome is expected


def test_one_sided_relation_cannot_give_indeterminacy():
    v = cr.classify_from_density_asymptote(cr.DensityAsymptote.from_expr("x^2", "big-o"))
    assert v.outcome is Outcome.INCONCLUSIVE and "one-sided" in v.reason


def test_non_admissible_reason_reports_moment_range():
    v = cr.classify_from_density_asymptote(cr.DensityAsymptote.from_expr("x^0.5-x"))
    assert v.outcome is Outcome.INCONCLUSIVE
    assert v.reason.startswith("not admissible")
    assert "finite only for n <" in v.reason


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("beta", [0.2, 0.35, 0.5, 0.7, 1.2])
def test_dilation_threshold(c, beta):
    # G_*(c y) with G_*(y) = exp(beta y) is exp(c beta y): determinate iff c beta >= 1/2
    D = cx.dilate(cx.profile(f"exp({beta}*x)"), c)
    v = cr.classify_from_density_asymptote(cr.DensityAsymptote(D.g, "two-sided"))
    assert v.outcome is (Outcome.DETERMINATE if c * beta >= 0.5 else Outcome.INDETERMINATE)


@pytest.mark.parametrize("c", [0.5, 2.0, 7.0])
def test_scaling_keeps_threshold(c):
    for beta, expected in ((0.3, Outcome.INDETERMINATE), (0.5, Outcome.DETERMINATE)):
        S = cx.scale(cx.profile(f"exp({beta}*x)"), c)
        assert cr.classify_from_density_asymptote(cr.DensityAsymptote(S.g, "two-sided")).outcome is expected


# ---------------------------------------------------------------- Tauberian density and excess law

@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_tauberian_lognormal(t):
    logd, dens, conj = cr.tauberian_density_asymptote(cx.profile(f"{t}*x^2/2"))
    x = np.array([0.3, 1.0, 2.5, 40.0])
    assert np.allclose(logd(x), stats.lognorm.logpdf(x, math.sqrt(t)), rtol=1e-12, atol=1e-12)


def test_tauberian_at_one():
    _, dens, _ = cr.tauberian_density_asymptote(cx.profile("x^2/2"))
    assert dens(1.0) == pytest.approx((2 * math.pi) ** -0.5, rel=1e-12)


def test_tauberian_rejects_affine():
    with pytest.raises(cx.CertificationError):
        cr.tauberian_density_asymptote(cx.profile("x+1"))


def test_tauberian_moments_match_profile():
    from stieltjes import oracle
    t = 1.0
    logd, _, _ = cr.tauberian_density_asymptote(cx.profile(f"{t}*x^2/2"))
    gaps = [abs(oracle.log_brute_moments(logd, n) - t * n * n / 2) for n in (2, 4, 8)]
    assert max(gaps) < 1e-6


def test_excess_of_exponential_is_exponential():
    ex = cr.stationary_excess(lambda x: math.exp(-x), 1.0)
    for x in (0.0, 1.0, 4.0):
        assert ex(x) == pytest.approx(math.exp(-x), rel=1e-9)


def test_excess_of_uniform():
    ex = cr.stationary_excess(lambda x: 1.0 if 0 <= x <= 1 else 0.0, 0.5, upper=1.0)
    for x in (0.0, 0.25, 0.9):
        assert ex(x) == pytest.approx(2 * (1 - x), rel=1e-9)


def test_excess_of_half_normal_is_a_density():
    from stieltjes import oracle
    dens = lambda x: 2 * stats.norm.pdf(x)
    ex = cr.stationary_excess(dens, math.sqrt(2 / math.pi), upper=40.0)
    total = oracle.quad(lambda x: ex(x), 0.0, 40.0, 1e-9)
    assert total == pytest.approx(1.0, abs=1e-6)


# ---------------------------------------------------------------- equivalence chains

MOMENT_PROFILES = ["x^2/2", "2*x*log(x+1)", "3*x*log(x+1)", "2.5*x*log(x+1)", "x^1.5", "x^2"]


@pytest.mark.parametrize("text", MOMENT_PROFILES)
def test_moment_chain_agrees_when_gate_holds(text):
    G = cx.profile(text)
    if not cr.moment_converse_gate(G).holds:
        pytest.skip("converse gate does not hold")
    a = cr.moment_krein_integral(G)
    b = cr._moment_chain_integral(G)
    c = cr.carleman(cr.MomentSequence.from_expr(G.g.expr))
    assert a.verdict == b.verdict == c.verdict


DENSITY_PROFILES = ["exp(0.3*x)", "exp(0.5*x)", "exp(0.7*x)", "x^1.5", "x^2", "x*log(x)", "exp(x/2)/x"]


@pytest.mark.parametrize("text", DENSITY_PROFILES)
def test_density_chain_agrees_when_gate_holds(text):
    G = cx.profile(text, lower=1.0)
    if not cr.density_converse_gate(G).holds:
        pytest.skip("converse gate does not hold")
    a = cr.gamma_series(G)
    b = cr._gstar_exp_integral(G.g, float(G.grid[0]))
    c = cr._krein_for_gstar(G.g)
    assert a.verdict == b.verdict == c.verdict


@settings(max_examples=25)
@given(st.floats(0.15, 1.5))
def test_gamma_series_threshold_property(beta):
    v = cr.gamma_series(cx.profile(f"exp({beta!r}*x)"))
    if v.decided:
        assert v.diverges == (beta >= 0.5)
