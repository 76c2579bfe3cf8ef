"""Fourier transforms of indicator functions.

Convention: ``f^(u) = int f(t) exp(-i (u, t)) dt``, so Parseval reads
``int |f^|^2 du = (2 pi)^n int |f|^2 dt``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import (AccuracyError, ArgumentError, ContainmentError, TopologyError,
                      UnsupportedDomainError)
from ..geometry.boundary import BoundarySampling
from ..geometry.domains import AffineImage, Disk, Polygon, Rectangle, Special
from .bessel import jinc_area

CONVENTION = "exp(-i(u,t))"


def parseval_constant(n: int) -> float:
    return (2.0 * np.pi) ** n


def _freqs(xi, n: Optional[int] = None) -> np.ndarray:
    x = np.asarray(xi, float)
    if x.ndim == 0:
        x = x.reshape(1)
    if n is not None and x.shape[-1] != n:
        raise ArgumentError(f"frequency must have {n} components")
    return x


# closed forms -----------------------------------------------------------------

def interval_transform(a: float, w) -> np.ndarray:
    """``int_0^a exp(-i w t) dt = a exp(-i w a/2) sinc(w a / 2)``."""
    w = np.asarray(w, float)
    return a * np.exp(-0.5j * w * a) * np.sinc(w * a / (2 * np.pi))


def _closed(d, xi: np.ndarray) -> np.ndarray:
    if isinstance(d, Rectangle):
        n = d.dimension
        if xi.shape[-1] != n:
            raise ArgumentError(f"frequency must have {n} components")
        out = np.ones(xi.shape[:-1], complex)
        for j, (a, o) in enumerate(zip(d.widths, d.origin)):
            out = out * interval_transform(a, xi[..., j]) * np.exp(-1j * xi[..., j] * o)
        return out
    if isinstance(d, Disk):
        if xi.shape[-1] != 2:
            raise ArgumentError("frequency must have 2 components")
        rho = np.hypot(xi[..., 0], xi[..., 1])
        c = np.asarray(d.center)
        return jinc_area(d.radius, rho) * np.exp(-1j * (xi @ c))
    if isinstance(d, AffineImage):
        # 1_{QD+b}^(v) = |det Q| exp(-i v.b) 1_D^(Q^T v)
        inner = _closed(d.base, xi @ d.Q)
        return abs(d.det) * np.exp(-1j * (xi @ d.shift)) * inner
    raise UnsupportedDomainError(f"no closed form for {d.kind}")


def closed_form(d, xi) -> np.ndarray:
    """Closed-form transform for rectangles, disks and their affine images."""
    return _closed(d, _freqs(xi))[()]


def has_closed_form(d) -> bool:
    if isinstance(d, AffineImage):
        return has_closed_form(d.base)
    return isinstance(d, (Rectangle, Disk))


# boundary line integral -------------------------------------------------------

def _edges_raw(a: np.ndarray, b: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Edge-exact ``sum_e (xi, n_e) int_e exp(-i (xi, x)) ds``.

    ``n_e ds`` is ``(dy, -dx)``; along the edge ``int_0^1 exp(-i k s) ds =
    exp(-i k/2) sinc(k/2)`` with ``k = (xi, b - a)``.
    """
    d = b - a
    flux = xi[..., None, 0] * d[:, 1] - xi[..., None, 1] * d[:, 0]
    k = xi @ d.T
    phase = np.exp(-1j * (xi @ a.T)) * np.exp(-0.5j * k) * np.sinc(k / (2 * np.pi))
    return (flux * phase).sum(-1)


def _polygon_sum(a: np.ndarray, b: np.ndarray, xi: np.ndarray) -> np.ndarray:
    r2 = np.einsum("...i,...i->...", xi, xi)
    return 1j * _edges_raw(a, b, xi) / r2


_GL_ORDER = 16
MAX_PANELS = 1 << 15


def _panel_rule(panels: int, order: int = _GL_ORDER):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = np.diff(edges)
    tau = (edges[:-1, None] + 0.5 * h[:, None] * (x[None] + 1)).ravel()
    wt = (0.5 * h[:, None] * w[None]).ravel()
    return tau, wt


def _piece_panels(pc, xi_max: float, extra_band: float = 0.0) -> int:
    tau = np.linspace(0.0, 1.0, 1025)
    sp = np.linalg.norm(pc.dxy(tau), axis=-1)
    length = float(np.mean(sp))
    need = (xi_max * length + extra_band) / np.pi
    return int(min(MAX_PANELS, max(4, np.ceil(need) + 4)))


def _pieces_sum(pieces, xi: np.ndarray, panels: Optional[int] = None,
                band: float = 0.0) -> np.ndarray:
    xi_max = float(np.max(np.linalg.norm(xi, axis=-1))) if xi.size else 0.0
    total = np.zeros(xi.shape[:-1], complex)
    for pc in pieces:
        if pc.straight:
            a = pc.xy(np.array([0.0]))[0]
            b = pc.xy(np.array([1.0]))[0]
            total += _edges_raw(a[None], b[None], xi)
            continue
        npan = panels or _piece_panels(pc, xi_max, band)
        tau, wt = _panel_rule(npan)
        x = pc.xy(tau)
        dx = pc.dxy(tau)
        flat = xi.reshape(-1, 2)
        acc = np.empty(len(flat), complex)
        # bounded scratch: at most ~4M complex entries per block
        step = max(1, (1 << 22) // len(tau))
        for i in range(0, len(flat), step):
            blk = flat[i:i + step]
            flux = blk[:, None, 0] * dx[:, 1] - blk[:, None, 1] * dx[:, 0]
            acc[i:i + step] = (np.exp(-1j * (blk @ x.T)) * flux) @ wt
        total += acc.reshape(xi.shape[:-1])
    r2 = np.einsum("...i,...i->...", xi, xi)
    return 1j * total / r2


def _profile_band(d) -> float:
    pr = getattr(d, "profile", None)
    if pr is None:
        return 0.0
    depth = pr.params.get("depth")
    if depth is None:
        return 0.0
    return float(2.0 ** depth * np.pi)


def boundary_integral(d, xi, panels: Optional[int] = None) -> np.ndarray:
    """Divergence-theorem transform ``(i/|xi|^2) oint exp(-i (xi, x)) (xi, nu) ds``.

    Polygons and polylines use edge-exact integrals; curved pieces use
    composite Gauss-Legendre with panels scaled to the oscillation.
    """
    xi = _freqs(xi, 2)
    r2 = np.einsum("...i,...i->...", xi, xi)
    if np.any(r2 == 0):
        raise ArgumentError("boundary integral needs xi != 0; use the area at the origin")
    if isinstance(d, BoundarySampling):
        if not d.closed:
            raise TopologyError("boundary integral needs a closed curve")
        a = d.points
        out = _polygon_sum(a, np.roll(a, -1, axis=0), xi)
    elif isinstance(d, Polygon):
        a, b = d.edges()
        out = np.zeros(xi.shape[:-1], complex)
        # bounded scratch for large polygons
        chunk = max(1, (1 << 22) // max(1, int(np.prod(xi.shape[:-1]))))
        for i in range(0, len(a), chunk):
            out += _polygon_sum(a[i:i + chunk], b[i:i + chunk], xi)
    elif getattr(d, "dimension", 2) == 2:
        base = d.base if isinstance(d, AffineImage) else d
        out = _pieces_sum(d.pieces(), xi, panels, _profile_band(base))
    else:
        raise TopologyError("boundary integral is planar")
    return out[()]


# grid engine ------------------------------------------------------------------

@dataclass(eq=False)
class SpectrumGrid:
    """Cartesian spectrum of a rasterized indicator (frequencies ascending, origin centred)."""

    axes: list
    values: np.ndarray
    box: np.ndarray
    cell: np.ndarray
    raster: np.ndarray = field(repr=False)
    error: float = 0.0
    convention: str = CONVENTION

    @property
    def shape(self):
        return self.values.shape

    @property
    def du(self) -> float:
        return float(np.prod([ax[1] - ax[0] for ax in self.axes]))

    @property
    def area(self) -> float:
        return float(self.raster.sum() * np.prod(self.cell))

    def dc(self) -> complex:
        idx = tuple(int(np.argmin(np.abs(ax))) for ax in self.axes)
        return complex(self.values[idx])

    def mesh(self):
        return np.meshgrid(*self.axes, indexing="ij")

    def parseval_sum(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.du)

    def at(self, xi) -> np.ndarray:
        """Transform of the raster itself at arbitrary frequencies (direct sum)."""
        xi = _freqs(xi, len(self.axes))
        idx = np.argwhere(self.raster)
        centres = self.box[0] + (idx + 0.5) * self.cell
        flat = xi.reshape(-1, xi.shape[-1])
        out = np.zeros(len(flat), complex)
        step = max(1, (1 << 22) // max(1, len(centres)))
        for i in range(0, len(flat), step):
            out[i:i + step] = np.exp(-1j * flat[i:i + step] @ centres.T).sum(1)
        return (out * np.prod(self.cell)).reshape(xi.shape[:-1])[()]

    def to_csv(self, path) -> None:
        if len(self.axes) != 2:
            raise ArgumentError("CSV export is planar")
        U1, U2 = self.mesh()
        v = self.values
        rows = np.column_stack([U1.ravel(), U2.ravel(), v.real.ravel(), v.imag.ravel(),
                                np.abs(v).ravel()])
        np.savetxt(path, rows, delimiter=",", header="u1,u2,re,im,abs", comments="", fmt="%.12g")

    def to_binary(self, stem) -> tuple:
        """Write ``stem.bin`` (complex128, row-major) and ``stem.json`` header."""
        bin_path, json_path = f"{stem}.bin", f"{stem}.json"
        np.ascontiguousarray(self.values, dtype="<c16").tofile(bin_path)
        header = {"shape": list(self.values.shape), "dtype": "complex128-le", "order": "C",
                  "convention": self.convention, "box": self.box.tolist(),
                  "axes_start": [float(a[0]) for a in self.axes],
                  "axes_step": [float(a[1] - a[0]) for a in self.axes],
                  "error": self.error}
        with open(json_path, "w") as fh:
            json.dump(header, fh, indent=2, sort_keys=True)
        return bin_path, json_path


def rasterize(d, size, box) -> tuple:
    box = np.asarray(box, float)
    n = box.shape[1]
    size = np.broadcast_to(np.asarray(size, int), (n,))
    for s in size:
        if s < 2 or s & (s - 1):
            raise ArgumentError("grid size must be a power of two")
    lo, hi = d.bbox
    if np.any(lo < box[0] - 1e-12) or np.any(hi > box[1] + 1e-12):
        raise ContainmentError("domain is not contained in the box")
    cell = (box[1] - box[0]) / size
    axes = [box[0, j] + (np.arange(size[j]) + 0.5) * cell[j] for j in range(n)]
    if n == 2:
        raster = np.zeros(tuple(size), bool)
        X = axes[0][:, None]
        for i in range(0, size[0], 256):
            Y = np.broadcast_to(axes[1][None, :], (min(256, size[0] - i), size[1]))
            Xi = np.broadcast_to(X[i:i + 256], Y.shape)
            raster[i:i + 256] = d.contains(np.stack([Xi, Y], -1))
    else:
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), -1)
        raster = d.contains(mesh)
    return raster, cell


def _straddle_count(raster: np.ndarray) -> int:
    edge = np.zeros_like(raster)
    for ax in range(raster.ndim):
        diff = np.diff(raster, axis=ax)
        lo = [slice(None)] * raster.ndim
        hi = [slice(None)] * raster.ndim
        lo[ax] = slice(0, -1)
        hi[ax] = slice(1, None)
        edge[tuple(lo)] |= diff
        edge[tuple(hi)] |= diff
    return int(edge.sum())


def grid_transform(d, size=1024, box=None) -> SpectrumGrid:
    """FFT of the cell-centre raster of ``1_D`` with cell-area weights.

    The attached ``error`` charges one cell area per cell on the raster
    boundary, a uniform bound on the rasterization error.
    """
    if box is None:
        lo, hi = d.bbox
        c, half = (lo + hi) / 2, (hi - lo).max() / 2 * 1.25
        box = np.stack([c - half, c + half])
    box = np.asarray(box, float)
    raster, cell = rasterize(d, size, box)
    n = raster.ndim
    F = np.fft.fftn(raster.astype(float)) * np.prod(cell)
    axes = []
    for j in range(n):
        N = raster.shape[j]
        u = 2 * np.pi * np.fft.fftfreq(N, d=cell[j])
        shape = [1] * n
        shape[j] = N
        F = F * np.exp(-1j * u * (box[0, j] + 0.5 * cell[j])).reshape(shape)
        axes.append(np.fft.fftshift(u))
    F = np.fft.fftshift(F)
    err = _straddle_count(raster) * float(np.prod(cell))
    return SpectrumGrid(axes, F, box, cell, raster, err)


# special domains --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LambdaSlice:
    """``F_lam(t) = (exp(-i lam phi(t)) - 1) / (-i lam)`` on the interval, zero outside."""

    profile: object
    lam: float

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, float)
        pr = self.profile
        inside = (t >= pr.c) & (t <= pr.b)
        out = np.zeros(t.shape, complex)
        phi = pr(t[inside])
        if self.lam == 0:
            out[inside] = phi
        else:
            out[inside] = -np.expm1(-1j * self.lam * phi) / (1j * self.lam)
        return out


LEMMA1_ORDER = 20
LEMMA1_TOL = 1e-12


def _slice_quad(F: LambdaSlice, u: float, panels: int, order: int) -> complex:
    pr = F.profile
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(pr.c, pr.b, panels + 1)
    h = np.diff(edges)
    t = (edges[:-1, None] + 0.5 * h[:, None] * (x[None] + 1)).ravel()
    wt = (0.5 * h[:, None] * w[None]).ravel()
    return complex(np.sum(F(t) * np.exp(-1j * u * t) * wt))


def lemma1_transform(g, u, lam, order: int = LEMMA1_ORDER, tol: float = LEMMA1_TOL,
                     max_panels: int = 1 << 16):
    """Transform of a special domain through its vertical slices.

    Returns ``int_I F_lam(t) exp(-i u t) dt`` where ``F_lam`` is the
    transform of ``y -> 1_(0, phi(t))(y)`` at ``lam``.  Panels are no wider
    than ``pi / max(|u|, |lam| max|phi'|, profile band)`` and are doubled
    until two successive rules agree to ``tol``; otherwise
    :class:`AccuracyError` reports the last estimate.  ``lam = 0`` uses the
    area slice ``F_0 = phi``.
    """
    if not isinstance(g, Special):
        raise UnsupportedDomainError("lemma1_transform needs a special domain")
    pr = g.profile
    u_arr, lam_arr = np.broadcast_arrays(np.asarray(u, float), np.asarray(lam, float))
    out = np.empty(u_arr.shape, complex)
    slope = pr.dphi_max(4097)
    band = _profile_band(g) / pr.length
    for idx in np.ndindex(u_arr.shape):
        uu, ll = float(u_arr[idx]), float(lam_arr[idx])
        F = LambdaSlice(pr, ll)
        omega = max(abs(uu), abs(ll) * slope, band, 1.0)
        panels = int(min(np.ceil(pr.length * omega / np.pi), max_panels // 2))
        prev = _slice_quad(F, uu, panels, order)
        while True:
            panels *= 2
            cur = _slice_quad(F, uu, panels, order)
            if abs(cur - prev) <= tol * max(1.0, abs(cur)):
                break
            if panels > max_panels:
                raise AccuracyError(f"slice quadrature did not settle (diff {abs(cur - prev):.2e})",
                                    estimate=cur)
            prev = cur
        out[idx] = cur
    return out[()]


# dispatch ---------------------------------------------------------------------

def transform(d, xi, engine: str = "auto"):
    """Evaluate ``1_D^`` at ``xi`` with the named engine (closed, boundary, lemma1 or auto)."""
    xi = _freqs(xi)
    if engine == "auto":
        engine = "closed" if has_closed_form(d) else "boundary"
    if engine == "closed":
        return closed_form(d, xi)
    if engine == "boundary":
        r2 = np.einsum("...i,...i->...", xi, xi)
        out = np.full(xi.shape[:-1], d.area, complex)
        nz = r2 > 0
        if np.any(nz):
            out[nz] = boundary_integral(d, xi[nz])
        return out[()]
    if engine == "lemma1":
        return lemma1_transform(d, xi[..., 0], xi[..., 1])
    raise ArgumentError(f"unknown engine {engine!r}")
