"""Area-type measurements: symmetric differences, tube areas and box-counting dimension."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from ..errors import (ArgumentError, InsufficientDataError, ResolutionError,
                      UnsupportedDomainError)
from .boundary import BoundarySampling, sample_boundary

MIN_BUDGET = 10_000
MIN_SAMPLES_PER_CELL = 8


@dataclass(frozen=True)
class MCEstimate:
    value: float
    stderr: float
    samples: int

    def __float__(self):
        return self.value


@lru_cache(maxsize=32)
def _cached_boundary(d, step: float) -> BoundarySampling:
    return sample_boundary(d, step)


def boundary_points(d, step: float) -> np.ndarray:
    """Boundary points of ``d`` (or of a sampling / raw point array) at spacing <= ``step``."""
    if isinstance(d, BoundarySampling):
        pts = d.points
        if d.max_step > step:
            pts = _densify(pts, step, d.closed)
        return pts
    if isinstance(d, np.ndarray):
        return _densify(np.asarray(d, float), step, True)
    # quantize so nearby requests share one sampling
    q = 2.0 ** np.floor(np.log2(step))
    return _cached_boundary(d, float(q)).points


def _densify(pts: np.ndarray, step: float, closed: bool) -> np.ndarray:
    nxt = np.roll(pts, -1, axis=0)
    seg = nxt - pts
    if not closed:
        seg[-1] = 0.0
    lengths = np.linalg.norm(seg, axis=1)
    counts = np.maximum(np.ceil(lengths / step).astype(int), 1)
    idx = np.repeat(np.arange(len(pts)), counts)
    off = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    return pts[idx] + (off / counts[idx])[:, None] * seg[idx]


def _check_bounded(d) -> np.ndarray:
    bb = np.asarray(d.bbox, float)
    if not np.all(np.isfinite(bb)):
        raise UnsupportedDomainError("domain is unbounded")
    return bb


_KEY = np.int64(1 << 31)


def _dilated_cells(pts: np.ndarray, h: float, radius_cells: int, origin: np.ndarray,
                   disc: bool = False) -> np.ndarray:
    """Integer cells near any cell holding a point.

    The neighbourhood is the ``(2r+1)^2`` block, or with ``disc=True`` the
    offsets whose nearest corners lie within ``r`` cells.  ``origin`` must sit
    at least ``radius_cells`` cells below every point.
    """
    ij = np.floor((pts - origin) / h).astype(np.int64)
    occ = np.unique(ij[:, 0] * _KEY + ij[:, 1])
    r = np.arange(-radius_cells, radius_cells + 1)
    ox, oy = np.meshgrid(r, r, indexing="ij")
    if disc:
        near = np.maximum(np.abs(ox) - 1, 0) ** 2 + np.maximum(np.abs(oy) - 1, 0) ** 2
        keep = near <= radius_cells ** 2
        ox, oy = ox[keep], oy[keep]
    offs = (ox.ravel() * _KEY + oy.ravel()).astype(np.int64)
    chunk = max(1, 4_000_000 // len(offs))
    parts = [np.unique((occ[i:i + chunk, None] + offs[None]).ravel())
             for i in range(0, len(occ), chunk)]
    keys = np.unique(np.concatenate(parts))
    ix = np.floor_divide(keys + _KEY // 2, _KEY)
    return np.stack([ix, keys - ix * _KEY], axis=1)


@lru_cache(maxsize=256)
def _tube_cells(d, r: float):
    """Cells of side ``1.25 r + r/4`` whose 3x3 blocks cover the ``r``-tube of the boundary.

    A point within ``r`` of the boundary is within ``r + r/8`` of a sample
    spaced ``r/4`` apart, hence inside the block around that sample's cell.
    """
    spacing = r / 4
    h = 1.25 * r + spacing
    pts = boundary_points(d, spacing)
    origin = pts.min(0) - 2 * h
    cells = _dilated_cells(pts, h, 1, origin)
    return cells, origin


def symmetric_difference_measure(d, t, budget: int = 100_000, seed: int = 0,
                                 with_error: bool = False):
    """Monte Carlo estimate of ``|(D - t) symmetric-difference D|``.

    Points of the symmetric difference lie within ``|t|`` of the boundary,
    so sampling is stratified over grid cells covering that tube (or over
    the joint bounding box when it is smaller).  A point ``x`` counts when
    exactly one of ``x`` and ``x + t`` lies in ``D``.  With
    ``with_error=True`` an :class:`MCEstimate` carrying the standard error is
    returned.
    """
    budget = int(budget)
    if budget < MIN_BUDGET:
        raise ArgumentError(f"budget must be at least {MIN_BUDGET}")
    t = np.asarray(t, float).reshape(-1)
    if t.shape != (2,) or not np.all(np.isfinite(t)):
        raise ArgumentError("shift must be a finite planar vector")
    bb = _check_bounded(d)
    r = float(np.hypot(*t))
    if r == 0.0:
        out = MCEstimate(0.0, 0.0, 0)
        return out if with_error else 0.0
    rng = np.random.default_rng(seed)

    # joint box of D and D - t
    lo = np.minimum(bb[0], bb[0] - t)
    hi = np.maximum(bb[1], bb[1] - t)
    box_area = float(np.prod(hi - lo))

    h = 1.25 * r + r / 4
    cells = None
    if box_area > 50 * h * h:
        cells, origin = _tube_cells(d, r)
        if len(cells) * h * h >= box_area:
            cells = None
    if cells is None:
        cells = np.zeros((1, 2), np.int64)
        sizes = hi - lo
        corner0 = lo
    else:
        sizes = np.array([h, h])
        corner0 = origin

    ncell = len(cells)
    cell_area = float(np.prod(sizes))
    if ncell * MIN_SAMPLES_PER_CELL <= budget:
        chosen = cells
        k = budget // ncell
        weight = 1.0
    else:
        m = budget // MIN_SAMPLES_PER_CELL
        chosen = cells[np.sort(rng.choice(ncell, m, replace=False))]
        k = MIN_SAMPLES_PER_CELL
        weight = ncell / m
    u = rng.random((len(chosen), k, 2))
    x = corner0 + (chosen[:, None, :] + u) * sizes
    flat = x.reshape(-1, 2)
    hit = d.contains(flat) ^ d.contains(flat + t)
    frac = hit.reshape(len(chosen), k).mean(axis=1)
    per_cell = cell_area * frac
    value = weight * float(per_cell.sum())
    if weight == 1.0:
        var = float(np.sum(cell_area ** 2 * frac * (1 - frac) / max(k - 1, 1)))
    else:
        m = len(chosen)
        var = ncell ** 2 * float(per_cell.var(ddof=1)) / m * (1 - m / ncell)
    out = MCEstimate(value, float(np.sqrt(max(var, 0.0))), int(flat.shape[0]))
    return out if with_error else value


def neighborhood_area(d, delta: float, resolution: int = 8) -> float:
    """Grid-counting area of the ``delta``-neighbourhood of a boundary curve.

    ``d`` may be a domain, a :class:`BoundarySampling` or an ``(N, 2)`` closed
    polyline.  Cells of side ``delta / resolution`` whose centres lie within
    ``delta`` of the curve are counted.
    """
    if not delta > 0:
        raise ArgumentError("delta must be positive")
    if resolution < 4:
        raise ResolutionError(f"cell side delta/{resolution} exceeds delta/4")
    h = delta / resolution
    pts = boundary_points(d, h / 2)
    origin = pts.min(0) - delta - 2 * h
    cells = _dilated_cells(pts, h, resolution + 1, origin, disc=True)
    centres = origin + (cells + 0.5) * h
    tree = cKDTree(pts)
    count = 0
    for i in range(0, len(centres), 1 << 20):
        dist, _ = tree.query(centres[i:i + (1 << 20)], distance_upper_bound=delta)
        count += int(np.count_nonzero(np.isfinite(dist)))
    return count * h * h


def tube_areas(d, deltas, resolution: int = 8) -> np.ndarray:
    return np.array([neighborhood_area(d, float(x), resolution) for x in deltas])


def minkowski_dimension(curve, deltas=None, resolution: int = 6, n: int = 2,
                        return_fit: bool = False):
    """Box-counting dimension ``n - slope`` of ``log |(F)_delta|`` against ``log delta``.

    The default grid spans three decades, ``10^-3.5`` to ``10^-0.5`` times
    the curve's bounding-box diagonal.  The result is clamped to ``[n-1, n]``.
    """
    if deltas is None:
        if isinstance(curve, (BoundarySampling, np.ndarray)):
            p = curve.points if isinstance(curve, BoundarySampling) else curve
            scale = float(np.linalg.norm(p.max(0) - p.min(0)))
        else:
            lo, hi = curve.bbox
            scale = float(np.linalg.norm(hi - lo))
        deltas = scale * np.logspace(-3.5, -0.5, 13)
    deltas = np.asarray(deltas, float)
    deltas = deltas[np.isfinite(deltas) & (deltas > 0)]
    if deltas.size < 3:
        raise InsufficientDataError("need at least 3 usable delta values")
    if np.log10(deltas.max() / deltas.min()) < 3 - 1e-9:
        raise InsufficientDataError("delta values must span at least 3 decades")
    areas = tube_areas(curve, deltas, resolution)
    slope, icpt = np.polyfit(np.log(deltas), np.log(areas), 1)
    dim = float(np.clip(n - slope, n - 1, n))
    if return_fit:
        return dim, {"deltas": deltas, "areas": areas, "slope": float(slope),
                     "raw_dimension": float(n - slope)}
    return dim
