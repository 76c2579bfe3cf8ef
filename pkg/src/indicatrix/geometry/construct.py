"""Square-with-arches domain built from a monotone profile, plus its checks."""
from __future__ import annotations

import numpy as np

from ..errors import ArgumentError, ConstructionError
from .boundary import sample_boundary
from .domains import Assembled
from .profiles import Profile, theorem3_profile_violations

WINDOW_ARC = 0.05
STRAIGHT_FLOOR = 1e-10


def _angle_between(u, v) -> float:
    cross = u[0] * v[1] - u[1] * v[0]
    return float(abs(np.arctan2(cross, float(np.dot(u, v)))))


def junction_mismatches(dom: Assembled) -> list:
    """Tangent-angle jump (radians) at each of the 8 junctions."""
    out = []
    for row in dom.junctions():
        out.append({"index": row["index"], "kind": row["kind"],
                    "point": [float(x) for x in row["point"]],
                    "mismatch": _angle_between(row["incoming"], row["outgoing"])})
    return out


def build_theorem3_domain(pr: Profile, tol: float = 1e-6) -> Assembled:
    """Glue four copies of the arch over ``[c, 2b - c]`` onto a square of side ``2 (b - c)``.

    The profile is first rescaled vertically so that ``phi'(c) = 1``; the
    remaining conditions (``phi(c) = 0``, ``phi'(b) = 0``, ``phi' > 0``) must
    hold to 1e-9 or :class:`ConstructionError` is raised.  The tangent jump at
    every junction must stay below ``tol``.
    """
    if not tol > 0:
        raise ArgumentError("tol must be positive")
    slope = float(pr.derivative(pr.c))
    if not np.isfinite(slope) or slope <= 0:
        raise ConstructionError(f"phi'(c) = {slope:.6g} must be positive to rescale")
    if abs(slope - 1.0) > 0:
        pr = pr.rescaled(1.0 / slope)
    bad = theorem3_profile_violations(pr, 1e-9)
    if bad:
        raise ConstructionError("; ".join(bad))
    dom = Assembled(pr)
    worst = max(j["mismatch"] for j in junction_mismatches(dom))
    if worst >= tol:
        raise ConstructionError(f"junction tangent mismatch {worst:.3e} >= {tol:g}")
    return dom


def chord_deviations(points: np.ndarray, s: np.ndarray, window: float = WINDOW_ARC) -> np.ndarray:
    """Max distance from the chord over each arc-length window starting at every sample."""
    pts = np.vstack([points, points[:1]])
    total = s[-1] + np.linalg.norm(points[-1] - points[0])
    arc = np.append(s, total)
    # unroll once so windows can wrap past the start
    pts2 = np.vstack([pts[:-1], pts[:-1]])
    arc2 = np.concatenate([arc[:-1], arc[:-1] + total])
    ends = np.searchsorted(arc2, arc[:-1] + window)
    out = np.empty(len(points))
    for i, j in enumerate(ends):
        seg = pts2[i:j + 1]
        a, b = seg[0], seg[-1]
        ch = b - a
        ln = np.hypot(*ch)
        rel = seg - a
        out[i] = np.abs(rel[:, 0] * ch[1] - rel[:, 1] * ch[0]).max() / ln
    return out


def straight_segment_scan(d, step: float = 2e-3, window: float = WINDOW_ARC,
                          stride: int = 1) -> dict:
    """Scan boundary windows of arc length ``window`` for near-straight pieces.

    Returns the minimum chord deviation and whether it exceeds the floor.
    """
    bs = sample_boundary(d, step)
    dev = chord_deviations(bs.points, bs.s, window)[::stride]
    i = int(np.argmin(dev))
    return {"min_deviation": float(dev[i]), "at": bs.points[i * stride].tolist(),
            "windows": int(dev.size), "passes": bool(dev[i] > STRAIGHT_FLOOR)}


def svg_path(d, step: float = 5e-3) -> str:
    """SVG path data for the sampled boundary (y axis flipped)."""
    pts = sample_boundary(d, step).points
    body = " ".join(f"{x:.6f},{-y:.6f}" for x, y in pts)
    return f"M {body} Z"
