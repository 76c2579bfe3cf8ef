import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from indicatrix.errors import (AccuracyError, ArgumentError, ContainmentError,
                               TopologyError, UnsupportedDomainError)
from indicatrix.geometry import (Disk, Rectangle, Special, affine_image, constant_profile,
                                 linear_profile, make_surrogate_profile, polyline_sampling,
                                 random_convex_polygon, regular_polygon, sample_boundary)
from indicatrix.geometry.domains import Polygon
from indicatrix.moduli import Modulus
from indicatrix.spectra import (LambdaSlice, boundary_integral, closed_form, grid_transform,
                                j1, lemma1_transform, parseval_constant, seam_gap, transform)

import oracles

SQUARE = Rectangle((1.0, 1.0))
DISK = Disk(1.0)
SQUARE_POLY = Polygon(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float))


# Bessel -------------------------------------------------------------------

def test_j1_against_scipy():
    x = np.concatenate([np.linspace(0, 40, 4001), np.geomspace(40, 1e6, 500)])
    assert np.max(np.abs(j1(x) - special.j1(x))) < 1e-11


def test_j1_seam():
    assert seam_gap() < 1e-10


def test_j1_odd():
    x = np.linspace(0, 30, 31)
    assert np.allclose(j1(-x), -j1(x), atol=0)


# closed forms -----------------------------------------------------------------

def test_square_examples():
    assert closed_form(SQUARE, [0.0, 0.0]) == pytest.approx(1.0)
    assert abs(closed_form(SQUARE, [2 * np.pi, 0.0])) < 1e-15


def test_disk_at_one():
    v = closed_form(DISK, [1.0, 0.0])
    assert v == pytest.approx(2 * np.pi * special.j1(1.0), abs=1e-12)
    assert v.real == pytest.approx(2.764919, abs=1e-6)


def test_closed_vs_oracles(rng):
    xi = rng.uniform(-60, 60, (50, 2))
    assert np.allclose(closed_form(DISK, xi), oracles.disk_transform(1.0, np.linalg.norm(xi, axis=1)),
                       atol=1e-12)
    R = Rectangle((1.5, 0.5))
    assert np.allclose(closed_form(R, xi), oracles.rectangle_transform((1.5, 0.5), xi), atol=1e-13)


def test_rectangle_3d():
    R = Rectangle((1.0, 2.0, 0.5))
    xi = np.array([[0.3, -1.0, 2.0], [0, 0, 0]])
    assert np.allclose(closed_form(R, xi), oracles.rectangle_transform((1.0, 2.0, 0.5), xi))


def test_closed_unsupported():
    with pytest.raises(UnsupportedDomainError):
        closed_form(SQUARE_POLY, [1.0, 0.0])


# boundary engine ------------------------------------------------------------

def test_boundary_square_polygon():
    assert boundary_integral(SQUARE_POLY, [3.0, 5.0]) == pytest.approx(closed_form(SQUARE, [3.0, 5.0]), abs=1e-10)


def test_boundary_disk_curved(rng):
    xi = rng.uniform(-40, 40, (50, 2))
    assert np.allclose(boundary_integral(DISK, xi), closed_form(DISK, xi), atol=1e-10)


def test_64gon_within_area_deficit():
    P = regular_polygon(64)
    diff = abs(boundary_integral(P, [1.0, 0.0]) - closed_form(DISK, [1.0, 0.0]))
    assert diff <= DISK.area - P.area


def test_boundary_reparameterization():
    bs1 = sample_boundary(random_convex_polygon(6, seed=5), 1e-2)
    bs2 = sample_boundary(random_convex_polygon(6, seed=5), 3e-3)
    xi = np.array([[4.0, -7.0], [11.0, 2.0]])
    assert np.allclose(boundary_integral(bs1, xi), boundary_integral(bs2, xi), atol=1e-12)


def test_boundary_polygon_oracle(rng):
    P = random_convex_polygon(6, seed=8)
    xi = rng.uniform(-30, 30, (20, 2))
    assert np.allclose(boundary_integral(P, xi), oracles.polygon_transform(P.vertices, xi), atol=1e-10)


def test_boundary_errors():
    with pytest.raises(ArgumentError):
        boundary_integral(DISK, [0.0, 0.0])
    open_curve = polyline_sampling(np.array([[0, 0], [1, 0], [1, 1]], float), closed=False)
    with pytest.raises(TopologyError):
        boundary_integral(open_curve, [1.0, 0.0])


# grid engine ----------------------------------------------------------------

@pytest.fixture(scope="module")
def square_grid():
    return grid_transform(SQUARE, 1024)


@pytest.fixture(scope="module")
def disk_grid():
    return grid_transform(DISK, 1024)


def test_grid_square_error(square_grid):
    G = square_grid
    U1, U2 = G.mesh()
    m = np.hypot(U1, U2) <= 32
    exact = oracles.rectangle_transform((1, 1), np.stack([U1[m], U2[m]], 1))
    assert np.max(np.abs(G.values[m] - exact)) < 5e-3


def test_grid_dc_and_parseval(disk_grid):
    G = disk_grid
    assert G.dc().real == pytest.approx(G.area, rel=1e-12)
    assert G.parseval_sum() == pytest.approx(parseval_constant(2) * np.pi, rel=0.01)
    # exact for the raster itself
    assert G.parseval_sum() == pytest.approx(parseval_constant(2) * G.area, rel=1e-9)


def test_grid_hermitian(disk_grid):
    v = disk_grid.values
    # frequency k sits at index k + N/2; -k at N/2 - k
    n = v.shape[0] // 2
    assert np.allclose(v[n + 5, n - 3], np.conj(v[n - 5, n + 3]), atol=1e-10)


def test_grid_at_matches_fft(square_grid):
    G = square_grid
    idx = (520, 505)
    xi = [G.axes[0][idx[0]], G.axes[1][idx[1]]]
    assert G.at(xi) == pytest.approx(G.values[idx], abs=1e-9)


def test_grid_containment():
    with pytest.raises(ContainmentError):
        grid_transform(DISK, 64, box=[[0, 0], [1, 1]])


def test_grid_exports(tmp_path):
    G = grid_transform(SQUARE, 64)
    G.to_csv(tmp_path / "g.csv")
    assert (tmp_path / "g.csv").read_text().splitlines()[0] == "u1,u2,re,im,abs"
    b, h = G.to_binary(str(tmp_path / "g"))
    arr = np.fromfile(b, dtype="<c16").reshape(64, 64)
    assert np.array_equal(arr, G.values)


# lemma-1 engine -------------------------------------------------------------

def test_lemma1_rectangle():
    g = Special(constant_profile(0.7, (0.0, 1.3)))
    for u, lam in [(1.0, 2.0), (-3.5, 0.4), (20.0, -11.0)]:
        ref = (1 - np.exp(-1j * lam * 0.7)) / (1j * lam) * (1 - np.exp(-1j * u * 1.3)) / (1j * u)
        assert lemma1_transform(g, u, lam) == pytest.approx(ref, abs=1e-10)


def test_lemma1_triangle_oracle():
    g = Special(linear_profile(1.0, (0.0, 1.0), 0.0))
    ref = oracles.special_transform(lambda t: t, 0.0, 1.0, 1.0, 2.0)
    assert lemma1_transform(g, 1.0, 2.0) == pytest.approx(ref, abs=1e-8)


def test_lemma1_zero_lambda_is_area_slice():
    g = Special(linear_profile(1.0, (0.0, 1.0), 0.0))
    assert lemma1_transform(g, 0.0, 0.0) == pytest.approx(0.5, abs=1e-14)


def test_lemma1_vs_grid(rng):
    g = Special(make_surrogate_profile(Modulus.power(0.5), eta=0.25, depth=6))
    G = grid_transform(g, 512)
    uv = rng.uniform(-20, 20, (20, 2))
    a = lemma1_transform(g, uv[:, 0], uv[:, 1])
    b = G.at(uv)
    assert np.all(np.abs(a - b) <= G.error)


def test_lemma1_accuracy_error():
    g = Special(make_surrogate_profile(Modulus.power(0.5), eta=0.25, depth=10))
    with pytest.raises(AccuracyError) as exc:
        lemma1_transform(g, 40.0, 30.0, max_panels=8)
    assert exc.value.estimate is not None


def test_lemma1_needs_special():
    with pytest.raises(UnsupportedDomainError):
        lemma1_transform(DISK, 1.0, 1.0)


@given(st.floats(0.1, 50), st.booleans())
def test_slice_bound(lam, flip):
    lam = -lam if flip else lam
    pr = make_surrogate_profile(Modulus.power(0.5), eta=0.25, depth=8)
    F = LambdaSlice(pr, lam)
    t = np.linspace(-0.1, 1.1, 241)
    phi = np.where((t >= 0) & (t <= 1), pr(np.clip(t, 0, 1)), 0.0)
    assert np.all(np.abs(F(t)) <= np.minimum(np.abs(phi), 2 / abs(lam)) + 1e-14)


# invariants across engines --------------------------------------------------

@given(st.floats(-40, 40), st.floats(-40, 40))
def test_hermitian_all_engines(a, b):
    xi = np.array([a, b])
    if np.hypot(a, b) < 1e-6:
        return
    for d, eng in [(DISK, "closed"), (DISK, "boundary"), (SQUARE, "closed"),
                   (random_convex_polygon(6, 1), "boundary")]:
        assert transform(d, -xi, eng) == pytest.approx(np.conj(transform(d, xi, eng)), abs=1e-10)


def test_dc_all_engines():
    for d in (DISK, SQUARE, random_convex_polygon(6, 1)):
        for eng in ("closed", "boundary"):
            if eng == "closed" and d.kind == "polygon":
                continue
            assert transform(d, [0.0, 0.0], eng).real == pytest.approx(d.area, rel=1e-8)


def test_affine_identity(rng):
    Q = np.array([[1.3, 0.4], [-0.2, 0.8]])
    b = np.array([0.5, -1.0])
    for base in (DISK, SQUARE, random_convex_polygon(6, seed=2)):
        img = affine_image(base, Q, b)
        u = rng.uniform(-15, 15, (20, 2))
        lhs = np.abs(transform(img, u, "boundary"))
        rhs = abs(np.linalg.det(Q)) * np.abs(transform(base, u @ Q, "boundary"))
        assert np.allclose(lhs, rhs, rtol=1e-6, atol=1e-12)


def test_affine_scaling_example():
    big = affine_image(DISK, 2 * np.eye(2))
    u = np.linspace(0.5, 10, 20)
    xi = np.stack([u, np.zeros_like(u)], 1)
    assert np.allclose(np.abs(transform(big, xi)), 4 * np.abs(transform(DISK, 2 * xi)), rtol=1e-10)


def test_affine_rotation():
    th = np.pi / 4
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    rot = affine_image(SQUARE, R)
    u = np.random.default_rng(0).uniform(-10, 10, (20, 2))
    assert np.allclose(np.abs(transform(rot, u)), np.abs(transform(SQUARE, u @ R)), atol=1e-12)


def test_hausdorff_young_scale_free():
    # with f^(u) = int f e^{-iut}: ||f||_q <= (2 pi)^(-n/p) ||f^||_p, 1/p + 1/q = 1
    from indicatrix.integrability import dyadic_energies, low_ball_energy

    p = 1.5
    q = p / (p - 1)
    S = sum(l.energy for l in dyadic_energies(SQUARE, p, (0, 10)).levels) + low_ball_energy(SQUARE, p)
    assert SQUARE.area ** (1 / q) <= (2 * np.pi) ** (-2 / p) * S ** (1 / p)
