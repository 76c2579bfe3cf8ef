import numpy as np
import pytest
from hypothesis import given, strategies as st

from indicatrix.errors import (InvariantViolation, OutOfDomainError, OutOfRangeError,
                               SingularIntegrandError)
from indicatrix.moduli import (ChiMap, Modulus, chi_inverse, critical_exponent_power,
                               doubling_holds, eval_modulus, identity6_residual,
                               lemma2_dual_integral, modulus_from_json, regularize_modulus,
                               theorem2_diverges, theorem2_integral, theta_p, theta_p_curve,
                               theta_tail_integral)


# evaluation ---------------------------------------------------------------

def test_eval_examples():
    assert eval_modulus(Modulus.power(1.0), 0.0) == 0.0
    assert eval_modulus(Modulus.power(0.5), 0.25) == pytest.approx(0.5, abs=1e-15)
    assert eval_modulus(Modulus.table([0, 1], [0, 1]), 0.5) == pytest.approx(0.5)


def test_eval_out_of_domain():
    with pytest.raises(OutOfDomainError):
        eval_modulus(Modulus.power(0.5), 1.5)
    with pytest.raises(OutOfDomainError):
        eval_modulus(Modulus.power(0.5), -0.1)


def test_invalid_tables():
    with pytest.raises(InvariantViolation):
        Modulus.table([0, 0.5, 1], [0, 0.6, 0.4])
    with pytest.raises(InvariantViolation):
        Modulus.table([0, 1], [0.1, 1])


def test_doubling_flag_checked():
    assert Modulus.power(0.5).doubling
    with pytest.raises(InvariantViolation):
        Modulus.power(1.0, doubling=True)


def test_json_round_trip():
    for m in (Modulus.power(0.3), Modulus.power_log(0.5, 0.5), Modulus.table([0, 0.5, 1], [0, 0.7, 1])):
        m2 = modulus_from_json(m.to_json())
        d = np.linspace(0, 1, 11)
        assert np.allclose(m(d), m2(d))


@given(st.floats(0.05, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_power_monotone(alpha, a, b):
    m = Modulus.power(alpha)
    lo, hi = sorted((a, b))
    assert m(lo) <= m(hi)


# chi inverse --------------------------------------------------------------

def test_chi_inverse_examples():
    assert chi_inverse(ChiMap(Modulus.power(1.0)), 0.25) == pytest.approx(0.5, rel=1e-10)
    assert chi_inverse(ChiMap(Modulus.power(0.5)), 0.125) == pytest.approx(0.25, rel=1e-10)
    t = ChiMap(Modulus.table([0, 0.1, 0.4, 1.0], [0, 0.3, 0.5, 0.9]))
    assert chi_inverse(t, t(0.3)) == pytest.approx(0.3, rel=1e-10)


def test_chi_inverse_out_of_range():
    with pytest.raises(OutOfRangeError):
        chi_inverse(ChiMap(Modulus.power(1.0)), 2.0)


@given(st.sampled_from([0.25, 0.5, 1.0]), st.floats(-12, 0))
def test_chi_round_trip(alpha, logd):
    c = ChiMap(Modulus.power(alpha))
    d = 10.0 ** logd
    assert abs(c.inverse(c(d)) - d) <= 1e-8 * d


def test_chi_round_trip_random(rng):
    c = ChiMap(Modulus.power_log(0.5, 0.5))
    d = 10 ** rng.uniform(-10, 0, 100)
    assert np.all(np.abs(c.inverse(c(d)) - d) <= 1e-8 * d)


# Theorem-2 integral ---------------------------------------------------------

def test_theorem2_closed_forms():
    m = Modulus.power(1.0)
    # integrand delta^-0.5
    assert theorem2_integral(m, 2, 1.5, 1e-12) == pytest.approx(2 * (1 - 1e-6), rel=1e-9)
    # exponent -1.4
    assert theorem2_integral(m, 2, 1.2, 1e-6) == pytest.approx((1e-6 ** -0.4 - 1) / 0.4, rel=1e-9)
    assert theorem2_integral(m, 2, 1.2, 1e-6) == pytest.approx(625.4717, rel=1e-6)


def test_theorem2_log_growth_at_critical():
    m = Modulus.power(1.0)
    J = [theorem2_integral(m, 2, 4 / 3, 2.0 ** -k) for k in range(4, 12)]
    assert np.allclose(np.diff(J), np.log(2), rtol=1e-8)


def test_theorem2_singular():
    m = Modulus.table([0, 0.5, 1.0], [0, 0, 1.0])
    with pytest.raises(SingularIntegrandError):
        theorem2_integral(m, 2, 1.5, 1e-3)


@pytest.mark.parametrize("n,alpha", [(2, 1.0), (2, 0.5), (3, 1.0), (3, 0.25), (2, 0.25)])
def test_divergence_flip(n, alpha):
    m = Modulus.power(alpha)
    pc = critical_exponent_power(n, alpha)
    assert theorem2_diverges(m, n, pc - 1e-3)
    assert not theorem2_diverges(m, n, pc + 1e-3)


def test_divergence_flip_by_growth_for_tables():
    # a table that mimics delta^1 away from zero: the growth test applies
    d = np.concatenate([[0.0], np.geomspace(1e-10, 1, 400)])
    m = Modulus.table(d, d)
    assert theorem2_diverges(m, 2, 1.2)
    assert not theorem2_diverges(m, 2, 1.6)


def test_critical_exponent_examples():
    assert critical_exponent_power(2, 1.0) == pytest.approx(4 / 3)
    assert critical_exponent_power(2, 0.5) == pytest.approx(1.2)
    assert critical_exponent_power(3, 1.0) == pytest.approx(1.5)


# Lemma-2 integral and the identity ------------------------------------------

def test_lemma2_closed_forms():
    c = ChiMap(Modulus.power(1.0))
    L = 1e12
    assert lemma2_dual_integral(c, 2, 1.5, L) == pytest.approx(4 * (1 - L ** -0.25), rel=1e-9)
    assert lemma2_dual_integral(c, 2, 1.9, L) == pytest.approx((1 - L ** -0.85) / 0.85, rel=1e-9)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0])
@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("p", [1.1, 1.3, 1.7])
def test_identity6_matrix(alpha, n, p):
    assert identity6_residual(Modulus.power(alpha), n, p, 1e-3) < 1e-6


def test_identity6_power_log():
    assert identity6_residual(Modulus.power_log(0.5, 0.5), 2, 1.3, 1e-3) < 1e-6


# Theta_p ---------------------------------------------------------------------

def test_theta_closed_form():
    # omega = delta: chi^-1(1/tau) = tau^-1/2, integrand tau^-2/3 at p = 4/3
    c = ChiMap(Modulus.power(1.0))
    for y in (10.0, 1e2, 1e4):
        assert theta_p(c, 4 / 3, y) == pytest.approx((3 * (y ** (1 / 3) - 1)) ** 0.75, rel=1e-9)
    assert theta_p(c, 4 / 3, 1.0) == 0.0


def test_theta_asymptotic_slope():
    c = ChiMap(Modulus.power(1.0))
    y = np.array([1e6, 1e8])
    th = [theta_p(c, 4 / 3, v) for v in y]
    slope = np.log(th[1] / th[0]) / np.log(y[1] / y[0])
    assert slope == pytest.approx(0.25, abs=0.01)


def test_theta_curve_matches_pointwise():
    c = ChiMap(Modulus.power(0.5))
    tau, th = theta_p_curve(c, 1.3, 1e3)
    for y in (10.0, 100.0, 1e3):
        assert np.interp(y, tau, th) == pytest.approx(theta_p(c, 1.3, y), rel=1e-4)


@given(st.floats(1.0, 1e4), st.floats(1.0, 1e4))
def test_theta_monotone_and_bounded(a, b):
    c = ChiMap(Modulus.power(0.5))
    lo, hi = sorted((a, b))
    t_lo, t_hi = theta_p(c, 1.5, lo), theta_p(c, 1.5, hi)
    assert t_lo <= t_hi + 1e-12
    assert t_hi <= (hi - 1) ** (1 / 1.5) * c.inverse(1.0) * (1 + 1e-9)


def test_condition7_bridge():
    # omega = delta^0.5 has p* = 1.2, so p = 1.3 is on the convergent side
    c = ChiMap(Modulus.power(0.5))
    a = [theta_tail_integral(c, 1.3, 10.0 ** k) for k in (4, 6, 8)]
    assert a[2] - a[1] < a[1] - a[0]
    assert not theorem2_diverges(Modulus.power(0.5), 2, 1.3)


# regularization --------------------------------------------------------------

def test_regularize_power_half():
    m = Modulus.power(0.5)
    s = regularize_modulus(m)
    d = np.geomspace(1e-8, 1, 50)
    assert np.allclose(s(d), d / (1 + d) + d ** 0.5, rtol=1e-6)
    assert np.all(s(d) / m(d) <= 2 + 1e-9)


def test_regularize_lipschitz():
    s = regularize_modulus(Modulus.power(1.0))
    d = np.geomspace(1e-8, 1, 50)
    assert np.allclose(s(d), d / (1 + d) + d, rtol=1e-6)
    assert np.all(s(d) <= 2 * d + 1e-15)


def test_regularize_doubling():
    for m in (Modulus.power(1.0), Modulus.power(0.3), Modulus.table([0, 0.5, 1], [0, 0.5, 0.6])):
        s = regularize_modulus(m)
        k = np.arange(1, 21)
        d = 2.0 ** -k
        assert np.all(s(2 * d) < 2 * s(d))
        assert doubling_holds(s)
