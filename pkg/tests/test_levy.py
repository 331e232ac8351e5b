import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from stieltjes import exprdsl as ed
from stieltjes import levy
from stieltjes.criteria import Outcome

GAUSS = levy.LevyTriplet(0.0, 1.0, ())
STABLE = levy.normalized_stable_triplet(1.0)


# ---------------------------------------------------------------- exponent

def test_brownian_exponent():
    for u in (0.0, 1.0, 7.5):
        assert GAUSS.psi(u) == pytest.approx(u * u / 2)
        assert GAUSS.psi_double_prime(u) == 1.0


@pytest.mark.parametrize("u", [0.1, 1.0, 3.0, 25.0, 400.0])
def test_stable_quadrature_matches_closed_form(u):
    closed = 0.5 * u * u + (2.0 / 3.0) * u ** 1.5
    assert STABLE.psi(u) == pytest.approx(closed, rel=1e-8)
    assert STABLE.psi_prime(u) == pytest.approx(u + u ** 0.5, rel=1e-8)
    assert STABLE.psi_double_prime(u) == pytest.approx(1 + 0.5 * u ** -0.5, rel=1e-8)


def test_stable_closed_form_expression():
    pe = STABLE.psi_expr()
    for u in (0.5, 9.0):
        assert ed.evaluate(pe, u) == pytest.approx(0.5 * u * u + (2.0 / 3.0) * u ** 1.5, rel=1e-12)


def test_psi_second_derivative_tends_to_sigma2():
    vals = [STABLE.psi_double_prime(u) - 1.0 for u in (1e2, 1e4, 1e6)]
    assert vals[0] > vals[1] > vals[2] > 0 and vals[2] < 1e-3


def test_psi_prime_comparable_to_linear():
    pe = STABLE.psi_expr()
    assert ed.compare_asymptotic(ed.simplify(ed.differentiate(pe)), ed.parse("x")) == "~"


@settings(max_examples=20)
@given(st.floats(0.1, 3.0), st.sampled_from([0.5, 1.5]), st.floats(0.05, 50.0))
def test_exponent_convex_and_eta_bound(sigma2, alpha, u):
    trip = levy.LevyTriplet(0.0, sigma2, (levy.StableNegative(alpha),))
    assert trip.psi_double_prime(u) > 0
    law = levy.LogLevyLaw(0.7, trip)
    assert law.eta2(u) >= 0.7 * sigma2


def test_compound_poisson_closed_form():
    cp = levy.LevyTriplet(0.0, 0.0, (levy.NegExpCompoundPoisson(2.0, 3.0),))
    pe = cp.psi_expr()
    for u in (0.5, 4.0):
        assert cp.psi(u) == pytest.approx(ed.evaluate(pe, u), rel=1e-9)


def test_integrability_check_rejects_heavy_positive_tail():
    trip = levy.LevyTriplet(0.0, 1.0, (levy.DensityMeasure("exp(-r)", "positive"),))
    with pytest.raises(ValueError, match="exponential moment"):
        trip.check_integrability()


# ---------------------------------------------------------------- moments

def test_ulogu_moments():
    M = levy.moment_sequence(levy.LogLevyLaw(1.5, psi="x*log(x+1)"))
    for n in (1.0, 4.0, 10.0):
        assert M.log_m(n) == pytest.approx(1.5 * n * math.log(n + 1), rel=1e-14)


def test_lognormal_moments():
    M = levy.moment_sequence(levy.LogLevyLaw(1.0, GAUSS))
    for n in (0.0, 2.0, 5.0):
        assert M.log_m(n) == pytest.approx(n * n / 2, abs=1e-14)


def test_moment_at_zero_is_one():
    for law in (levy.LogLevyLaw(2.0, STABLE), levy.LogLevyLaw(0.3, psi="x*log(x+1)")):
        assert levy.moment_sequence(law).log_m(0.0) == pytest.approx(0.0, abs=1e-12)


def test_exponent_must_vanish_at_zero():
    with pytest.raises(ValueError):
        levy.LogLevyLaw(1.0, psi="x+1")


# ---------------------------------------------------------------- Fourier domination

@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
def test_gaussian_envelope_is_half(t):
    c = levy.condition_b_check(levy.LogLevyLaw(t, GAUSS))
    assert c.holds and c.C == pytest.approx(0.5, rel=1e-12)
    assert c.max_excess_over_half == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("t", [1.0, 2.0, 3.0])
def test_ulogu_real_part_closed_form(t):
    law = levy.LogLevyLaw(t, psi="x*log(x+1)")
    for n in (5.0, 50.0):
        for y in (1.0, 5.0):
            s = math.sqrt(t * (n + 2))
            re = (n / 2) * math.log(1 + y * y / (t * (n + 2))) - (y * (n + 1) / s) * math.atan(y / s)
            v = y / math.sqrt(float(law.eta2(n)))
            assert law.re_increment(n, v) == pytest.approx(re, rel=1e-10)
            assert levy.log_esscher_ratio(law, n, y) == pytest.approx(t * re, rel=1e-10)


def test_ulogu_envelope_below_half():
    c = levy.condition_b_check(levy.LogLevyLaw(2.0, psi="x*log(x+1)"), n_grid=np.linspace(5, 100, 20))
    assert c.holds and 0.01 < c.C < 0.5


def test_compound_poisson_fails_domination():
    law = levy.LogLevyLaw(1.0, levy.LevyTriplet(0.0, 0.0, (levy.NegExpCompoundPoisson(1.0, 1.0),)))
    c = levy.condition_b_check(law)
    assert not c.holds and c.violation is not None
    assert c.violation[0] == 100.0


@pytest.mark.parametrize("n,y", [(1.0, -10.0), (20.0, 3.0), (80.0, 9.0)])
def test_esscher_ratio_quadrature_matches_closed_form(n, y):
    law = levy.LogLevyLaw(1.0, STABLE)
    a = levy.log_esscher_ratio(law, n, y, "closed-form")
    b = levy.log_esscher_ratio(law, n, y, "quadrature")
    assert a == pytest.approx(b, rel=1e-9)


# ---------------------------------------------------------------- H and the saddle density

@pytest.mark.parametrize("y", [1.0, 4.0, 16.0])
def test_H_stable_raw(y):
    trip = levy.LevyTriplet(0.0, 1.0, (levy.StableNegative(1.5),))
    assert levy.H_integral(trip, y) == pytest.approx(math.sqrt(math.pi) * y ** 1.5, rel=1e-7)


@pytest.mark.parametrize("y", [0.01, 0.7, 3.0, 30.0])
def test_H_two_quadratures_agree(y):
    for trip in (STABLE, levy.LevyTriplet(0.0, 1.0, (levy.NegExpCompoundPoisson(1.0, 2.0),))):
        assert levy.H_integral(trip, y) == pytest.approx(levy.H_direct(trip, y), rel=1e-7)


def test_H_trivial_cases():
    assert levy.H_integral(GAUSS, 5.0) == 0.0
    assert levy.H_integral(STABLE, 1e-8) < 1e-10


def test_H_is_conjugate_excess():
    # Psi_*(Psi'(y)) = sigma2 y^2 / 2 + H(y)
    for y in (2.0, 10.0):
        conj = y * STABLE.psi_prime(y) - STABLE.psi(y)
        assert conj == pytest.approx(0.5 * y * y + levy.H_integral(STABLE, y), rel=1e-9)


@pytest.mark.parametrize("t,y", [(1.0, 2.0), (0.5, 3.0), (2.0, 0.7)])
def test_saddle_gaussian_exact(t, y):
    x, val, _ = levy.saddle_density_asymptote(GAUSS, t, y)
    assert x == pytest.approx(t * y)
    assert val == pytest.approx(stats.norm.pdf(x, scale=math.sqrt(t)), rel=1e-12)


def test_saddle_at_zero():
    x, val, _ = levy.saddle_density_asymptote(STABLE, 1.0, 0.0)
    assert x == pytest.approx(float(STABLE.psi_prime(0.0)), abs=1e-12)
    assert val == pytest.approx((2 * math.pi) ** -0.5)


def test_saddle_requires_spectrally_negative():
    trip = levy.LevyTriplet(0.0, 1.0, (levy.DensityMeasure("exp(-r^2)", "positive"),))
    with pytest.raises(ValueError):
        levy.saddle_density_asymptote(trip, 1.0, 1.0)


def test_saddle_against_tilted_inversion():
    ys = [16.0, 64.0, 256.0, 1024.0]
    errs = []
    for y in ys:
        x, _, lv = levy.saddle_density_asymptote(STABLE, 1.0, y)
        inv = levy.inverted_log_density(STABLE, 1.0, [x], tilt=y)[0]
        errs.append(abs(math.expm1(lv - inv)))
    assert errs[-3] > errs[-2] > errs[-1]
    assert errs[-1] <= 0.02


def test_inversion_gaussian_matches_closed_form():
    y = np.linspace(-5, 5, 41)
    assert np.allclose(np.exp(levy.inverted_log_density(GAUSS, 1.0, y)), stats.norm.pdf(y), atol=1e-8)


# ---------------------------------------------------------------- classification

@pytest.mark.parametrize("t", [0.5, 2.0])
def test_brownian_indeterminate(t):
    assert levy.classify_loglevy(levy.LogLevyLaw(t, GAUSS)).outcome is Outcome.INDETERMINATE


@pytest.mark.parametrize("t,expected", [(1.5, Outcome.DETERMINATE), (2.0, Outcome.DETERMINATE),
                                        (2.5, Outcome.INDETERMINATE)])
def test_ulogu_threshold(t, expected):
    v = levy.classify_loglevy(levy.LogLevyLaw(t, psi="x*log(x+1)"))
    assert v.outcome is expected


def test_two_sided_by_factorization():
    trip = levy.LevyTriplet(STABLE.b, 1.0, STABLE.parts + (levy.DensityMeasure("exp(-r^2)", "positive"),))
    v = levy.classify_loglevy(levy.LogLevyLaw(1.0, trip), n_grid=np.linspace(1, 100, 10),
                              y_grid=np.linspace(-10, 10, 11))
    assert v.outcome is Outcome.INDETERMINATE
    assert v.evidence[0].criterion == "split-exponent"


# ---------------------------------------------------------------- configuration

def test_law_from_config_normalized_stable():
    law = levy.law_from_config({"sigma2": "1", "family": "stable-negative", "alpha": "1.5", "c": "normalized"}, 1.0)
    assert law.triplet.psi(4.0) == pytest.approx(8.0 + (2.0 / 3.0) * 8.0, rel=1e-8)


def test_law_from_config_closed_form():
    law = levy.law_from_config({"psi": "x*log(x+1)"}, 2.0)
    assert law.log_moment(3.0) == pytest.approx(6.0 * math.log(4.0))


def test_law_from_config_unknown_family():
    with pytest.raises(ValueError, match="unknown jump family"):
        levy.law_from_config({"family": "meixner"}, 1.0)
