"""Boundary sampling and the measured modulus of the normal map."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..errors import ArgumentError, DegenerateDomainError, TopologyError
from .domains import Piece, outward_normals


@dataclass(frozen=True, eq=False)
class BoundarySampling:
    """Ordered points on a closed boundary with arc-length parameters and outward normals."""

    points: np.ndarray
    normals: np.ndarray
    s: np.ndarray
    length: float
    closed: bool = True

    def __len__(self):
        return len(self.points)

    @property
    def max_step(self) -> float:
        gaps = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        if self.closed:
            gaps = np.append(gaps, np.linalg.norm(self.points[0] - self.points[-1]))
        return float(gaps.max())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "x", "y", "nx", "ny"])
            for s, (x, y), (nx, ny) in zip(self.s, self.points, self.normals):
                w.writerow([f"{s:.12g}", f"{x:.12g}", f"{y:.12g}", f"{nx:.12g}", f"{ny:.12g}"])


def _max_speed(pc: Piece) -> float:
    tau = np.linspace(0.0, 1.0, 2049)
    return float(np.linalg.norm(pc.dxy(tau), axis=-1).max())


def _polygon_sampling(vertices: np.ndarray, step: float):
    a = vertices
    b = np.roll(vertices, -1, axis=0)
    d = b - a
    lengths = np.linalg.norm(d, axis=1)
    counts = np.maximum(np.ceil(lengths / step).astype(int), 1)
    edge = np.repeat(np.arange(len(a)), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    frac = offsets / counts[edge]
    pts = a[edge] + frac[:, None] * d[edge]
    nrm = outward_normals(d)[edge]
    return pts, nrm


def sample_boundary(d, step: float) -> BoundarySampling:
    """Sample ``d``'s boundary with consecutive points at most ``step`` apart.

    Normals come from the parametric tangent rotated by -90 degrees; on a
    graph piece ``(t, phi(t))`` this is ``(-phi'(t), 1) / sqrt(1 + phi'^2)``.
    Corner points take the normal of the edge that starts there.
    """
    if not step > 0:
        raise ArgumentError("step must be positive")
    if getattr(d, "dimension", 2) != 2:
        raise TopologyError("boundary sampling is planar; sample rectangle faces separately")
    if not d.area > 0:
        raise DegenerateDomainError("domain has zero area")
    if d.kind == "polygon":
        pts, nrm = _polygon_sampling(d.vertices, step)
    else:
        chunks_p, chunks_n = [], []
        for pc in d.pieces():
            count = max(int(np.ceil(_max_speed(pc) / step)), 1)
            tau = np.arange(count) / count
            chunks_p.append(pc.xy(tau))
            chunks_n.append(outward_normals(pc.dxy(tau)))
        pts = np.concatenate(chunks_p)
        nrm = np.concatenate(chunks_n)
    gaps = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(gaps[:-1])])
    return BoundarySampling(pts, nrm, s, float(gaps.sum()))


def polyline_sampling(points, closed: bool = True) -> BoundarySampling:
    """Wrap a raw polyline (counterclockwise if closed); normals from edge directions."""
    pts = np.asarray(points, float)
    nxt = np.roll(pts, -1, axis=0) if closed else np.vstack([pts[1:], pts[-1:] + (pts[-1] - pts[-2])])
    nrm = outward_normals(nxt - pts)
    gaps = np.linalg.norm(nxt - pts, axis=1)
    s = np.concatenate([[0.0], np.cumsum(gaps[:-1])])
    return BoundarySampling(pts, nrm, s, float(gaps.sum() if closed else gaps[:-1].sum()), closed)


# normal-map modulus -----------------------------------------------------------

PAIRS_PER_POINT = 16


def normal_modulus(bs: BoundarySampling, deltas, pairs_per_point: int = PAIRS_PER_POINT):
    """Measured ``sup |nu(x) - nu(y)|`` over sampled pairs with ``|x - y| <= delta``.

    For large ``delta`` the sampling is thinned so each point sees about
    ``pairs_per_point`` neighbours; the result is made nondecreasing by a
    running maximum over the sorted grid.  Returns ``(deltas, omega)``.
    """
    deltas = np.sort(np.asarray(list(deltas), float))
    if deltas.size == 0:
        raise ArgumentError("delta grid is empty")
    if len(bs) == 0:
        raise ArgumentError("boundary sampling is empty")
    step = bs.max_step
    out = np.empty_like(deltas)
    for i, d in enumerate(deltas):
        stride = max(1, int(d / (step * pairs_per_point / 2)))
        idx = np.arange(0, len(bs), stride)
        pts, nrm = bs.points[idx], bs.normals[idx]
        pairs = cKDTree(pts).query_pairs(d, output_type="ndarray")
        if len(pairs) == 0:
            out[i] = 0.0
            continue
        diff = nrm[pairs[:, 0]] - nrm[pairs[:, 1]]
        out[i] = np.sqrt((diff ** 2).sum(1)).max()
    return deltas, np.maximum.accumulate(out)


def fit_power_law(x, y):
    """Least-squares fit ``log y = log C + e log x``; returns ``(e, C, residual_rms)``."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    res = ly - A @ coef
    return float(coef[0]), float(np.exp(coef[1])), float(np.sqrt(np.mean(res ** 2)))


def boundary_normal_exponent(bs: BoundarySampling, deltas):
    """Fitted exponent and constant of the measured normal modulus on ``deltas``."""
    dl, om = normal_modulus(bs, deltas)
    keep = om > 0
    return fit_power_law(dl[keep], om[keep])
