"""The nine acceptance criteria, one test each, at their stated tolerances."""
import time

import numpy as np
import pytest

import oracles
from acceptance_log import LINES
from indicatrix.apnorms import circle_ap_norm, growth_fit
from indicatrix.geometry import (Disk, Rectangle, Special, boundary_normal_exponent,
                                 build_theorem3_domain, constant_profile, junction_mismatches,
                                 koch_snowflake, linear_profile, make_surrogate_profile,
                                 minkowski_dimension, random_convex_polygon, sample_boundary,
                                 straight_segment_scan)
from indicatrix.geometry.profiles import cosine_profile
from indicatrix.integrability import (critical_exponent_estimate, dyadic_energies,
                                      low_ball_energy, membership_verdict)
from indicatrix.moduli import (Modulus, critical_exponent_power, identity6_residual,
                               theorem2_diverges)
from indicatrix.sobolev import sobolev_membership_sweep, sobolev_threshold_from_dimension
from indicatrix.spectra import grid_transform, lemma1_transform, parseval_constant, transform

DISK = Disk(1.0)
SQUARE = Rectangle((1.0, 1.0))


def verdict(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_lemma1_identity():
    t0 = time.perf_counter()
    depth = 10
    cases = [
        ("constant", Special(constant_profile(1.0, (0.0, 1.0))), None),
        ("linear", Special(linear_profile(1.0, (0.0, 1.0), 0.0)), None),
        ("surrogate", Special(make_surrogate_profile(Modulus.power(0.5), eta=0.25, depth=depth)),
         np.linspace(0.0, 1.0, 2 ** depth + 1)[1:-1]),
    ]
    rng = np.random.default_rng(42)
    worst = {}
    for name, g, breaks in cases:
        pr = g.profile
        uv = rng.uniform(-50, 50, (50, 2))
        errs = [abs(lemma1_transform(g, u, lam)
                    - oracles.special_transform(pr, pr.c, pr.b, u, lam, breaks=breaks))
                for u, lam in uv]
        worst[name] = max(errs)
    dt = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-8 and dt < 120
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    verdict(1, ok, f"max |error| {detail} (tol 1e-8), {dt:.0f} s (< 120 s)")


def test_criterion_2_disk_critical_exponent():
    t0 = time.perf_counter()
    p = critical_exponent_estimate(DISK, j_range=(3, 12))
    dt = time.perf_counter() - t0
    ok = abs(p - 4 / 3) <= 0.05 and dt < 60
    verdict(2, ok, f"p_hat {p:.4f} vs 4/3 +- 0.05, {dt:.0f} s (< 60 s)")


def test_criterion_3_square_integrability():
    rows, ok = [], True
    for p in (1.05, 1.2, 1.5):
        r = dyadic_energies(SQUARE, p, (8, 14))
        v = membership_verdict(r)
        good = v == "converges" and abs(r.slope + (p - 1)) <= 0.05
        ok &= good
        rows.append(f"p={p}: {v} slope {r.slope:+.3f} (target {-(p - 1):+.2f})")
    verdict(3, ok, "; ".join(rows))


def test_criterion_4_identity_and_flip():
    res = [identity6_residual(Modulus.power(a), n, p, 1e-3)
           for a in (0.25, 0.5, 1.0) for n in (2, 3) for p in (1.1, 1.3, 1.7)]
    flips = []
    for a in (0.25, 0.5, 1.0):
        for n in (2, 3):
            pc = critical_exponent_power(n, a)
            m = Modulus.power(a)
            flips.append(theorem2_diverges(m, n, pc - 1e-3) and not theorem2_diverges(m, n, pc + 1e-3))
    ok = len(res) == 18 and max(res) < 1e-6 and all(flips)
    verdict(4, ok, f"18-cell max residual {max(res):.1e} (< 1e-6), flips {sum(flips)}/{len(flips)}")


def test_criterion_5_sobolev_threshold():
    t0 = time.perf_counter()
    rep = sobolev_membership_sweep(DISK, [0.25, 0.3, 0.4, 0.5, 0.6, 0.7], budget=100_000)
    dt = time.perf_counter() - t0
    i = list(rep.s).index(0.5)
    inc = rep.increments[i][-3:]
    spread = np.ptp(inc) / inc.mean()
    ok = abs(rep.s_hat - 0.5) <= 0.05 and spread <= 0.15 and dt < 300
    verdict(5, ok, f"s_hat {rep.s_hat:.4f} vs 0.5 +- 0.05, s=0.5 increment spread "
                   f"{spread:.1%} (<= 15%), {dt:.0f} s (< 300 s)")


def test_criterion_6_minkowski_chain():
    sq = minkowski_dimension(SQUARE)
    koch = koch_snowflake(8)
    a = minkowski_dimension(koch)
    rep = sobolev_membership_sweep(koch, [0.2, 0.3, 0.4, 0.5], budget=30_000)
    gap = abs(rep.s_hat - sobolev_threshold_from_dimension(a))
    ok = abs(sq - 1) <= 0.05 and abs(a - 1.262) <= 0.05 and gap <= 0.08
    verdict(6, ok, f"square {sq:.3f}, Koch {a:.3f} (1.262 +- 0.05), "
                   f"Koch s_hat {rep.s_hat:.3f} vs (2 - a)/2 = {(2 - a) / 2:.3f} (gap {gap:.3f} <= 0.08)")


def test_criterion_7_exponential_growth():
    phi = cosine_profile()
    c = growth_fit(phi, 4 / 3, np.geomspace(1, 1e3, 25))
    a2 = max(abs(circle_ap_norm(phi, lam, 2.0) - 1) for lam in np.geomspace(1e-2, 1e3, 12))
    ok = abs(c.slope - 0.25) <= 0.03 and abs(c.bound_exponent - 0.25) < 1e-9 and a2 <= 1e-10
    verdict(7, ok, f"slope {c.slope:.4f} vs 0.25 +- 0.03 (bound exponent "
                   f"{c.bound_exponent:.4f}), max |A_2 - 1| {a2:.1e}")


def test_criterion_8_constructor():
    rows, ok = [], True
    for alpha in (0.5, 0.75):
        dom = build_theorem3_domain(make_surrogate_profile(Modulus.power(alpha), eta=0.25))
        j = junction_mismatches(dom)
        jm = max(r["mismatch"] for r in j)
        scan = straight_segment_scan(dom)
        e, _, _ = boundary_normal_exponent(sample_boundary(dom, 2e-5), np.geomspace(1e-4, 1e-2, 9))
        good = len(j) == 8 and jm < 1e-6 and scan["passes"] and abs(e - alpha) <= 0.05
        ok &= good
        rows.append(f"alpha={alpha}: junctions {jm:.1e}, scan "
                    f"{'ok' if scan['passes'] else 'straight'}, exponent {e:.3f}")
    verdict(8, ok, "; ".join(rows))


def test_criterion_9_engine_agreement():
    rng = np.random.default_rng(42)
    hexagon = random_convex_polygon(6, seed=7)
    xi = rng.uniform(-30, 30, (50, 2))
    rows, ok = [], True
    for name, d in (("square", SQUARE), ("disk", DISK), ("hexagon", hexagon)):
        if name == "square":
            ref = oracles.rectangle_transform((1.0, 1.0), xi)
        elif name == "disk":
            ref = oracles.disk_transform(1.0, np.hypot(*xi.T))
        else:
            ref = oracles.polygon_transform(hexagon.vertices, xi, order=100)
        b = transform(d, xi, "boundary")
        G = grid_transform(d, 1024)
        g = G.at(xi)
        eb = np.abs(b - ref).max()
        eg = np.abs(g - ref).max()
        good = eb <= 1e-8 * d.area and eg <= G.error
        msg = f"{name}: boundary {eb:.1e}, grid {eg:.1e} (bound {G.error:.1e})"
        if name != "hexagon":
            ec = np.abs(transform(d, xi, "closed") - ref).max()
            good &= ec <= 1e-10 * d.area
            msg += f", closed {ec:.1e}"
        ok &= bool(good)
        rows.append(msg)
    tot = sum(lv.energy for lv in dyadic_energies(DISK, 2.0, (0, 14)).levels)
    tot += low_ball_energy(DISK, 2.0)
    target = parseval_constant(2) * DISK.area
    rel = abs(tot / target - 1)
    ok &= rel <= 0.01
    rows.append(f"Parseval {tot:.3f} vs {target:.3f} ({rel:.1e} <= 1%)")
    verdict(9, ok, "; ".join(rows))
