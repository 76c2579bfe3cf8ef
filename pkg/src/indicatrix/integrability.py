"""Dyadic-annulus L^p energies of indicator spectra and decay-slope diagnostics.

``S_j(p) = int_{2^j <= |xi| < 2^(j+1)} |1_D^(xi)|^p dxi``.  Since the annuli
double in area, ``S_j ~ 2^(beta j)`` with ``beta < 0`` signals a summable
tail and ``beta >= 0`` a divergent one.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import List, Optional

import numpy as np
from scipy import stats

from .errors import (ArgumentError, InsufficientDataError, NoBracketError, OutOfRangeError,
                     UnsupportedDomainError)
from .geometry.domains import AffineImage, Rectangle
from .spectra.transforms import SpectrumGrid, grid_transform, has_closed_form, transform

J_MAX = 14
ANGULAR_DEFAULT = 512
RADIAL_NODES = 6
GL_PERIOD_NODES = 20
USABLE_ERROR = 0.1
VERDICT_BAND = 0.025
RESIDUAL_GATE = 0.05


@dataclass
class LevelRecord:
    j: int
    energy: float
    error: float
    sup: float

    @property
    def usable(self) -> bool:
        return self.energy > 0 and self.error < USABLE_ERROR * self.energy


@dataclass
class DyadicEnergyReport:
    p: float
    levels: List[LevelRecord]
    engine: str
    slope: float = float("nan")
    intercept: float = float("nan")
    stderr: float = float("nan")
    ci: tuple = (float("nan"), float("nan"))
    residual: float = float("nan")
    usable: int = 0
    critical_exponent: Optional[float] = None
    meta: dict = field(default_factory=dict)

    @property
    def js(self) -> np.ndarray:
        return np.array([r.j for r in self.levels])

    @property
    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.levels])

    def summary(self) -> dict:
        out = {"p": self.p, "engine": self.engine, "slope": self.slope, "ci": list(self.ci),
               "residual": self.residual, "usable_levels": self.usable,
               "critical_exponent": self.critical_exponent}
        if self.usable >= 5:
            out["verdict"] = membership_verdict(self, self.p)
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["j", "S_j", "err"])
            for r in self.levels:
                w.writerow([r.j, f"{r.energy:.12g}", f"{r.error:.6g}"])

    def to_json(self, path=None):
        doc = dict(self.summary(), levels=[asdict(r) for r in self.levels])
        if path is None:
            return doc
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
        return doc


# separable quadrature for rectangles ------------------------------------------

def _gl(n):
    return np.polynomial.legendre.leggauss(n)


class _SincPower:
    """Antiderivative ``H(V) = int_0^V |2 sin(a v/2) / v|^p dv``, odd in ``V``."""

    def __init__(self, a: float, p: float, vmax: float, nodes: int = GL_PERIOD_NODES):
        self.a, self.p = a, p
        self.half = 2 * np.pi / a
        k = int(np.ceil(vmax / self.half)) + 1
        self.x, self.w = _gl(nodes)
        edges = self.half * np.arange(k + 1)
        lo, hi = edges[:-1], edges[1:]
        v = 0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * self.x[None]
        seg = (self.f(v) * self.w).sum(1) * 0.5 * (hi - lo)
        self.table = np.concatenate([[0.0], np.cumsum(seg)])

    def f(self, v):
        v = np.asarray(v, float)
        out = np.full(v.shape, self.a ** self.p)
        nz = v != 0
        out[nz] = np.abs(2 * np.sin(0.5 * self.a * v[nz]) / v[nz]) ** self.p
        return out

    def __call__(self, V):
        V = np.asarray(V, float)
        s, A = np.sign(V), np.abs(V)
        k = np.floor(A / self.half).astype(int)
        lo = k * self.half
        v = 0.5 * (lo + A)[..., None] + 0.5 * (A - lo)[..., None] * self.x
        part = (self.f(v) * self.w).sum(-1) * 0.5 * (A - lo)
        return s * (self.table[k] + part)


def _rect_frame(d):
    """Return (widths, Q) with ``d`` the image of ``[0, a1] x [0, a2]`` under ``Q``."""
    if isinstance(d, Rectangle):
        return np.array(d.widths), np.eye(2)
    if isinstance(d, AffineImage) and isinstance(d.base, Rectangle):
        return np.array(d.base.widths), d.Q
    return None


def _separable_level(widths, Q, j: int, p: float, nodes: int):
    a1, a2 = widths
    det = abs(np.linalg.det(Q))
    Qi = np.linalg.inv(Q)
    M = Qi @ Qi.T  # |xi|^2 = v^T M v with v = Q^T xi
    R0, R1 = 2.0 ** j, 2.0 ** (j + 1)
    c = np.sqrt(M[1, 1] / np.linalg.det(M))
    H2 = _SincPower(a2, p, R1 * np.sqrt(np.linalg.eigvalsh(np.linalg.inv(M)).max()) + 10, nodes)

    def roots(v1, R):
        disc = np.maximum(R * R * M[1, 1] - v1 * v1 * np.linalg.det(M), 0.0)
        mid = -M[0, 1] * v1 / M[1, 1]
        half = np.sqrt(disc) / M[1, 1]
        return mid - half, mid + half

    def inner(v1):
        lo1, hi1 = roots(v1, R1)
        total = H2(hi1) - H2(lo1)
        inside0 = np.abs(v1) < R0 * c
        lo0, hi0 = roots(v1, R0)
        total = total - np.where(inside0, H2(hi0) - H2(lo0), 0.0)
        return total

    half1 = 2 * np.pi / a1
    top = R1 * c
    edges = np.unique(np.concatenate([np.arange(0.0, top, half1), [R0 * c, top]]))
    edges = edges[edges <= top]

    def rule(n):
        x, w = _gl(n)
        lo, hi = edges[:-1], edges[1:]
        v = 0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * x[None]
        f1 = np.abs(2 * np.sin(0.5 * a1 * v) / np.where(v == 0, 1.0, v)) ** p
        f1 = np.where(v == 0, a1 ** p, f1)
        vals = f1 * inner(v) * w
        return 2.0 * float(vals.sum(1) @ (0.5 * (hi - lo)))

    fine = rule(nodes)
    coarse = rule(nodes // 2)
    scale = det ** (p - 1.0)
    sup = det * a1 * a2
    return scale * fine, scale * abs(fine - coarse), sup


# polar quadrature -------------------------------------------------------------

def _outer_radius(d) -> float:
    lo, hi = d.bbox
    return float(np.linalg.norm(hi - lo) / 2)


@lru_cache(maxsize=64)
def _polar_level(d, j: int, angular: int, engine: str, panels_per_unit: float):
    """Nodes, weights and ``|1_D^|`` over one annulus (half-plane, doubled in weights)."""
    R0, R1 = 2.0 ** j, 2.0 ** (j + 1)
    width = np.pi / (2 * _outer_radius(d))
    npan = max(2, int(np.ceil((R1 - R0) / width * panels_per_unit)))
    x, w = _gl(RADIAL_NODES)
    edges = np.linspace(R0, R1, npan + 1)
    h = np.diff(edges)
    rho = (edges[:-1, None] + 0.5 * h[:, None] * (x[None] + 1)).ravel()
    wr = (0.5 * h[:, None] * w[None]).ravel() * rho
    half = angular // 2
    th = (np.arange(half) + 0.5) * np.pi / half
    wth = np.full(half, 2 * np.pi / angular) * 2  # Hermitian symmetry doubles each ray
    absval = np.empty((half, rho.size), np.float32)
    for i in range(0, half, 16):
        t = th[i:i + 16]
        xi = np.stack([np.cos(t)[:, None] * rho[None], np.sin(t)[:, None] * rho[None]], -1)
        absval[i:i + 16] = np.abs(transform(d, xi, engine))
    return wr, wth, absval


def _polar_energy(d, j, p, angular, engine):
    wr, wth, A = _polar_level(d, j, angular, engine, 1.0)
    Ap = A ** p
    fine = float(wth @ (Ap @ wr))
    # error: every other angle, and a half-resolution radial rule
    ang = float((wth[::2] * 2) @ (Ap[::2] @ wr))
    wr2, wth2, A2 = _polar_level(d, j, angular, engine, 0.5)
    rad = float(wth2 @ ((A2 ** p) @ wr2))
    err = max(abs(fine - ang), abs(fine - rad))
    return fine, err, float(A.max())


def low_ball_energy(d, p: float, angular: int = 64, nodes: int = 24, engine: str = "auto") -> float:
    """``int_{|xi| < 1} |1_D^(xi)|^p d xi``, the part of the spectrum below the first annulus."""
    engine = _pick_engine(d, engine)
    x, w = _gl(nodes)
    rho = 0.5 * (x + 1)
    wr = 0.5 * w * rho
    th = (np.arange(angular) + 0.5) * 2 * np.pi / angular
    xi = np.stack([np.cos(th)[:, None] * rho[None], np.sin(th)[:, None] * rho[None]], -1)
    A = np.abs(transform(d, xi, engine)) ** float(p)
    return float((2 * np.pi / angular) * np.sum(A @ wr))


# grid summation ---------------------------------------------------------------

def _grid_energy(G: SpectrumGrid, j, p):
    R0, R1 = 2.0 ** j, 2.0 ** (j + 1)
    nyq = min(np.pi / c for c in G.cell)
    if R1 > nyq:
        raise OutOfRangeError(f"level {j} reaches |xi| = {R1:g} beyond the grid limit {nyq:.4g}")
    U = np.meshgrid(*G.axes, indexing="ij")
    r = np.sqrt(sum(u * u for u in U))
    m = (r >= R0) & (r < R1)
    a = np.abs(G.values[m])
    S = float(np.sum(a ** p) * G.du)
    err = float(np.sum(p * np.maximum(a, G.error) ** (p - 1) * G.error) * G.du)
    sup = float(a.max()) if a.size else 0.0
    return S, err, sup


# public -----------------------------------------------------------------------

def _pick_engine(d, engine):
    if engine in (None, "auto"):
        return "closed" if has_closed_form(d) else "boundary"
    if engine not in ("closed", "boundary", "grid"):
        raise ArgumentError(f"unknown engine {engine!r}")
    return engine


def _fit(report: DyadicEnergyReport) -> DyadicEnergyReport:
    use = [r for r in report.levels if r.usable]
    report.usable = len(use)
    if len(use) < 3:
        return report
    j = np.array([r.j for r in use], float)
    y = np.log2([r.energy for r in use])
    res = stats.linregress(j, y)
    report.slope, report.intercept, report.stderr = float(res.slope), float(res.intercept), float(res.stderr)
    q = stats.t.ppf(0.975, len(use) - 2)
    report.ci = (report.slope - q * report.stderr, report.slope + q * report.stderr)
    report.residual = float(np.sqrt(np.mean((y - (res.intercept + res.slope * j)) ** 2)))
    return report


def dyadic_energies(d, p: float, j_range=(3, 12), angular: int = ANGULAR_DEFAULT,
                    engine: str = "auto", grid: Optional[SpectrumGrid] = None,
                    grid_size: int = 1024) -> DyadicEnergyReport:
    """Annulus energies ``S_j(p)`` for ``j`` in ``j_range`` (inclusive) with a log2-slope fit.

    Rectangles and their affine images are integrated separably in the
    frame ``v = Q^T xi``, where the transform is a product of 1-D factors;
    other shapes use polar quadrature with ``angular`` rays and
    Gauss-Legendre radial panels, or grid summation with ``engine='grid'``.
    """
    p = float(p)
    if not 1 < p <= 2:
        raise ArgumentError("p must lie in (1, 2]")
    j0, j1 = int(j_range[0]), int(j_range[1])
    if not 0 <= j0 <= j1 <= J_MAX:
        raise ArgumentError(f"j range must lie in [0, {J_MAX}]")
    if getattr(d, "dimension", 2) != 2:
        raise UnsupportedDomainError("dyadic energies are computed for planar domains")
    engine = _pick_engine(d, engine)
    frame = _rect_frame(d) if engine == "closed" else None
    levels = []
    if engine == "grid" and grid is None:
        grid = grid_transform(d, grid_size)
    for j in range(j0, j1 + 1):
        if engine == "grid":
            S, err, sup = _grid_energy(grid, j, p)
        elif frame is not None:
            S, err, sup = _separable_level(frame[0], frame[1], j, p, GL_PERIOD_NODES)
        else:
            S, err, sup = _polar_energy(d, j, p, angular, engine)
        levels.append(LevelRecord(j, S, err, sup))
    name = "separable" if frame is not None else engine
    return _fit(DyadicEnergyReport(p, levels, name, meta={"angular": angular}))


def membership_verdict(report: DyadicEnergyReport, p: Optional[float] = None) -> str:
    """``converges``, ``diverges`` or ``marginal`` from the fitted slope.

    ``converges`` needs slope < -band, a negative CI and a residual below
    the gate; ``diverges`` needs slope > band and a positive CI.
    """
    if p is not None and abs(p - report.p) > 1e-12:
        raise ArgumentError("report was computed at a different p")
    if report.usable < 5:
        raise InsufficientDataError("verdict needs at least 5 usable levels")
    s, (lo, hi) = report.slope, report.ci
    if s < -VERDICT_BAND and hi < 0 and report.residual < RESIDUAL_GATE:
        return "converges"
    if s > VERDICT_BAND and lo > 0:
        return "diverges"
    return "marginal"


def critical_exponent_estimate(d, p_bracket=(1.1, 1.9), j_range=(3, 12),
                               angular: int = ANGULAR_DEFAULT, engine: str = "auto",
                               tol: float = 1e-4, return_details: bool = False):
    """Root in ``p`` of the fitted slope by bisection.

    Raises :class:`NoBracketError` when the slope keeps one sign on the bracket.
    """
    lo, hi = map(float, p_bracket)
    if not 1 < lo < hi <= 2:
        raise ArgumentError("bracket must satisfy 1 < lo < hi <= 2")
    f = lambda q: dyadic_energies(d, q, j_range, angular, engine)
    rlo, rhi = f(lo), f(hi)
    if np.sign(rlo.slope) == np.sign(rhi.slope):
        raise NoBracketError(f"slope keeps sign on [{lo}, {hi}] ({rlo.slope:.3f}, {rhi.slope:.3f})")
    a, b, ra = lo, hi, rlo
    while b - a > tol:
        m = 0.5 * (a + b)
        rm = f(m)
        if np.sign(rm.slope) == np.sign(ra.slope):
            a, ra = m, rm
        else:
            b = m
    p_hat = 0.5 * (a + b)
    # slope uncertainty mapped through the local derivative d beta / d p
    r1, r2 = f(p_hat - 0.01), f(p_hat + 0.01)
    dbdp = (r2.slope - r1.slope) / 0.02
    unc = abs(ra.stderr / dbdp) if dbdp else float("inf")
    if return_details:
        return {"p_hat": p_hat, "uncertainty": unc, "dslope_dp": dbdp}
    return p_hat
