import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from indicatrix.apnorms import (circle_ap_norm, circle_coefficients, circle_minus_one_norm,
                                growth_fit, jacobi_anger_norm, lemma1_integrand_scan,
                                line_restriction_norm, line_transform)
from indicatrix.errors import ArgumentError, CutoffError
from indicatrix.geometry import cosine_profile, lacunary_periodic_profile, linear_profile
from indicatrix.moduli import Modulus
from scipy import integrate

COS = cosine_profile()
LAC = lacunary_periodic_profile(Modulus.power(0.5), depth=8)


def test_lambda_zero():
    assert circle_ap_norm(COS, 0.0, 4 / 3) == pytest.approx(1.0, abs=1e-15)
    assert line_restriction_norm(COS, 0.0, 1.5) == 0.0


@pytest.mark.parametrize("lam", [0.5, 3.0, 10.0, 77.0])
def test_parseval_p2(lam):
    assert circle_ap_norm(COS, lam, 2.0) == pytest.approx(1.0, abs=1e-10)
    # the discarded l2 tail is the only deficit
    val, tail = circle_ap_norm(LAC, lam, 2.0, return_tail=True)
    assert val == pytest.approx(np.sqrt(1 - tail), abs=1e-12)
    assert 1 - val <= 1e-8


def test_jacobi_anger():
    k, c, K, tail = circle_coefficients(COS, 10.0)
    kk, ref = oracles.jacobi_anger_coefficients(10.0, K)
    assert np.allclose(c, ref, atol=1e-12)
    expected = np.sum(np.abs(ref) ** (4 / 3)) ** 0.75
    assert circle_ap_norm(COS, 10.0, 4 / 3) == pytest.approx(expected, abs=1e-8)
    assert jacobi_anger_norm(10.0, 4 / 3, K) == pytest.approx(expected, abs=1e-12)


def test_cutoff_rules():
    with pytest.raises(ArgumentError):
        circle_ap_norm(COS, 10.0, 1.5, K=10)
    # heuristic K is 44 for lam = 10; the tail there is tiny
    val, tail = circle_ap_norm(COS, 10.0, 1.5, K=44, return_tail=True)
    assert tail <= 1e-8
    # a rough profile needs more than the heuristic cutoff
    rough = lacunary_periodic_profile(Modulus.power(0.1), depth=12)
    K0 = int(np.ceil(4 * (50 * rough.dphi_max() + 1)))
    with pytest.raises(CutoffError):
        circle_ap_norm(rough, 50.0, 1.5, K=K0)
    assert np.isfinite(circle_ap_norm(rough, 50.0, 1.5))


def test_requires_periodic():
    with pytest.raises(ArgumentError):
        circle_ap_norm(linear_profile(1.0, (0.0, 1.0)), 1.0, 1.5)


@given(st.floats(0.1, 60.0), st.floats(1.0, 2.0), st.floats(1.0, 2.0))
def test_monotone_in_p(lam, p1, p2):
    lo, hi = sorted((p1, p2))
    assert circle_ap_norm(COS, lam, hi) <= circle_ap_norm(COS, lam, lo) * (1 + 1e-12)


@given(st.floats(0.1, 60.0), st.floats(1.0, 2.0))
def test_even_in_lambda(lam, p):
    a = circle_ap_norm(LAC, lam, p)
    b = circle_ap_norm(LAC, -lam, p)
    assert a == pytest.approx(b, rel=1e-12)


def test_growth_cos():
    c = growth_fit(COS, 4 / 3, np.geomspace(1, 1e3, 25))
    assert c.slope == pytest.approx(0.25, abs=0.03)
    assert c.bound_exponent == pytest.approx(1 / (4 / 3) - 0.5, abs=1e-6)
    assert c.slope >= c.bound_exponent - 0.05
    assert c.slope <= c.theta_exponent + 0.05
    assert c.fit_mask.sum() >= 8


def test_growth_cos_p2():
    c = growth_fit(COS, 2.0, np.geomspace(1, 1e3, 25))
    assert c.slope == pytest.approx(0.0, abs=0.01)


def test_growth_surrogate_lower_bound():
    c = growth_fit(LAC, 1.3, np.geomspace(1, 1e3, 25))
    assert c.slope >= 1 / 1.3 - 1 / 1.5 - 0.03
    assert c.slope >= c.bound_exponent - 0.05


def test_growth_ladder_checks():
    with pytest.raises(ArgumentError):
        growth_fit(COS, 1.5, np.geomspace(1, 100, 25))
    with pytest.raises(ArgumentError):
        growth_fit(COS, 1.5, np.geomspace(1, 1e3, 8))


def test_line_transform_oracle():
    lam = 3.0
    xi, v, K, c0 = line_transform(COS, lam)
    for x in (0.375, -2.125, 5.5, 0.0, 17.0):
        i = int(np.argmin(np.abs(xi - x)))
        f = lambda t: (np.exp(1j * lam * np.cos(t)) - 1) * np.exp(-1j * xi[i] * t)
        re = integrate.quad(lambda t: f(t).real, 0, 2 * np.pi, limit=200)[0]
        im = integrate.quad(lambda t: f(t).imag, 0, 2 * np.pi, limit=200)[0]
        assert v[i] == pytest.approx(re + 1j * im, abs=1e-9)


def test_line_parseval():
    lam = 3.0
    g2 = integrate.quad(lambda t: abs(np.exp(1j * lam * np.cos(t)) - 1) ** 2, 0, 2 * np.pi)[0]
    assert line_restriction_norm(COS, lam, 2.0) ** 2 == pytest.approx(2 * np.pi * g2, rel=1e-6)


@pytest.mark.parametrize("phi", [COS, LAC])
def test_line_small_lambda_linear(phi):
    C = line_restriction_norm(phi, 1e-3, 1.5) / 1e-3
    for lam in (1e-2, 1e-1):
        assert line_restriction_norm(phi, lam, 1.5) <= 1.05 * C * lam


@pytest.mark.parametrize("phi", [COS, LAC])
def test_bridge_band(phi):
    lam = np.geomspace(1e-2, 300, 12)
    r = np.array([circle_minus_one_norm(phi, l, 1.5) / line_restriction_norm(phi, l, 1.5) for l in lam])
    # band fitted once: circle/line ratio lies in [0.1, 0.2] for p = 1.5
    assert r.min() >= 0.1 and r.max() <= 0.2


def test_scan_cos():
    s = lemma1_integrand_scan(COS, 1.5, np.geomspace(1, 1e3, 16))
    assert s.exponent == pytest.approx(-1.25, abs=0.15)
    assert s.verdict == "converges"
    s = lemma1_integrand_scan(COS, 4 / 3, np.geomspace(1, 1e3, 16))
    assert s.verdict == "converges"
    assert lemma1_integrand_scan(COS, 1.2, np.geomspace(1, 1e3, 16)).verdict == "diverges"


def test_scan_even():
    lam = np.geomspace(1, 100, 8)
    a = lemma1_integrand_scan(LAC, 1.5, lam)
    b = lemma1_integrand_scan(LAC, 1.5, -lam)
    assert np.allclose(a.integrand, b.integrand, rtol=1e-12)


def test_curve_exports(tmp_path):
    c = growth_fit(COS, 1.5, np.geomspace(1, 1e3, 12))
    c.to_csv(tmp_path / "n.csv")
    assert (tmp_path / "n.csv").read_text().splitlines()[0] == "lambda,norm,p"
    doc = c.to_json(tmp_path / "n.json")
    assert json.loads((tmp_path / "n.json").read_text())["slope"] == pytest.approx(doc["slope"])
