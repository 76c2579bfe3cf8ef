"""Domain descriptions.

Every shape exposes ``area``, ``bbox``, ``contains`` and, in the plane, a
list of parametric boundary :class:`Piece` objects traversed
counterclockwise (domain on the left).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, List, Optional

import numpy as np
import shapely

from ..errors import ArgumentError, DegenerateDomainError, InvariantViolation, TopologyError
from .profiles import Profile


@dataclass(frozen=True)
class Piece:
    """A boundary arc ``tau -> xy(tau)`` on ``[0, 1]`` with derivative ``dxy``."""

    xy: Callable[[np.ndarray], np.ndarray]
    dxy: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    straight: bool = False

    def reversed(self) -> "Piece":
        xy, dxy = self.xy, self.dxy
        return Piece(lambda t: xy(1.0 - np.asarray(t, float)),
                     lambda t: -dxy(1.0 - np.asarray(t, float)), self.label, self.straight)

    def mapped(self, Q: np.ndarray, shift: np.ndarray) -> "Piece":
        xy, dxy = self.xy, self.dxy
        return Piece(lambda t: xy(t) @ Q.T + shift, lambda t: dxy(t) @ Q.T, self.label,
                     self.straight)


def segment(a, b, label: str = "") -> Piece:
    a = np.asarray(a, float)
    d = np.asarray(b, float) - a
    return Piece(lambda t: a + np.multiply.outer(np.asarray(t, float), d),
                 lambda t: np.broadcast_to(d, np.shape(t) + (2,)).copy(), label, True)


def outward_normals(dxy: np.ndarray) -> np.ndarray:
    """Unit outward normals from counterclockwise tangents: rotate by -90 degrees."""
    nrm = np.stack([dxy[..., 1], -dxy[..., 0]], axis=-1)
    return nrm / np.linalg.norm(nrm, axis=-1, keepdims=True)


def _points(pts) -> np.ndarray:
    p = np.asarray(pts, float)
    if p.shape[-1] < 1:
        raise ArgumentError("points must have a trailing coordinate axis")
    return p


class _Shape:
    kind = "shape"
    dimension = 2

    def pieces(self) -> List[Piece]:
        raise TopologyError(f"{self.kind} has no planar boundary parameterization")

    @property
    def bbox(self) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Rectangle(_Shape):
    """Axis-parallel box ``origin + [0, w_1] x ... x [0, w_n]``."""

    widths: tuple
    origin: Optional[tuple] = None
    kind = "rectangle"

    def __post_init__(self):
        w = tuple(float(x) for x in self.widths)
        if len(w) < 1 or any(x <= 0 for x in w):
            raise DegenerateDomainError("rectangle widths must be positive")
        object.__setattr__(self, "widths", w)
        o = (0.0,) * len(w) if self.origin is None else tuple(float(x) for x in self.origin)
        if len(o) != len(w):
            raise ArgumentError("origin dimension mismatch")
        object.__setattr__(self, "origin", o)

    @property
    def dimension(self) -> int:
        return len(self.widths)

    @property
    def area(self) -> float:
        return float(np.prod(self.widths))

    @property
    def bbox(self) -> np.ndarray:
        o = np.array(self.origin)
        return np.stack([o, o + np.array(self.widths)])

    def contains(self, pts) -> np.ndarray:
        p = _points(pts) - np.array(self.origin)
        return np.all((p > 0) & (p < np.array(self.widths)), axis=-1)

    def vertices(self) -> np.ndarray:
        if self.dimension != 2:
            raise TopologyError("vertices only for planar rectangles")
        (x0, y0), (x1, y1) = self.bbox
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])

    def pieces(self) -> List[Piece]:
        v = self.vertices()
        return [segment(v[i], v[(i + 1) % 4], f"edge{i}") for i in range(4)]

    def to_json(self) -> dict:
        return {"shape": "rectangle", "widths": list(self.widths), "origin": list(self.origin)}


@dataclass(frozen=True, eq=False)
class Disk(_Shape):
    radius: float = 1.0
    center: tuple = (0.0, 0.0)
    kind = "disk"

    def __post_init__(self):
        if not self.radius > 0:
            raise DegenerateDomainError("disk radius must be positive")
        object.__setattr__(self, "center", tuple(float(x) for x in self.center))

    @property
    def area(self) -> float:
        return float(np.pi * self.radius ** 2)

    @property
    def bbox(self) -> np.ndarray:
        c = np.array(self.center)
        return np.stack([c - self.radius, c + self.radius])

    def contains(self, pts) -> np.ndarray:
        p = _points(pts) - np.array(self.center)
        return np.einsum("...i,...i->...", p, p) < self.radius ** 2

    def pieces(self) -> List[Piece]:
        r, c = self.radius, np.array(self.center)

        def xy(t):
            a = 2 * np.pi * np.asarray(t, float)
            return c + r * np.stack([np.cos(a), np.sin(a)], axis=-1)

        def dxy(t):
            a = 2 * np.pi * np.asarray(t, float)
            return 2 * np.pi * r * np.stack([-np.sin(a), np.cos(a)], axis=-1)

        return [Piece(xy, dxy, "circle")]

    def to_json(self) -> dict:
        return {"shape": "disk", "radius": self.radius, "center": list(self.center)}


@dataclass(frozen=True, eq=False)
class Polygon(_Shape):
    """Simple, counterclockwise polygon."""

    vertices: np.ndarray
    name: str = "polygon"
    kind = "polygon"

    def __post_init__(self):
        v = np.asarray(self.vertices, float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ArgumentError("polygon needs an (N, 2) vertex array with N >= 3")
        if np.allclose(v[0], v[-1]):
            v = v[:-1]
        object.__setattr__(self, "vertices", v)
        poly = shapely.Polygon(v)
        if poly.area <= 0:
            raise DegenerateDomainError("polygon has zero area")
        if not poly.is_valid or not shapely.LinearRing(v).is_simple:
            raise InvariantViolation("polygon is not simple")
        if not shapely.LinearRing(v).is_ccw:
            raise InvariantViolation("polygon must be counterclockwise")

    @cached_property
    def _shapely(self):
        poly = shapely.Polygon(self.vertices)
        shapely.prepare(poly)
        return poly

    @property
    def area(self) -> float:
        x, y = self.vertices.T
        return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @property
    def bbox(self) -> np.ndarray:
        return np.stack([self.vertices.min(0), self.vertices.max(0)])

    def contains(self, pts) -> np.ndarray:
        p = _points(pts)
        flat = p.reshape(-1, 2)
        out = shapely.contains_xy(self._shapely, flat[:, 0], flat[:, 1])
        return out.reshape(p.shape[:-1])

    def edges(self):
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def pieces(self) -> List[Piece]:
        a, b = self.edges()
        return [segment(a[i], b[i], f"edge{i}") for i in range(len(a))]

    def to_json(self) -> dict:
        return {"shape": "polygon", "vertices": self.vertices.tolist()}


@dataclass(frozen=True, eq=False)
class Special(_Shape):
    """``{(t, y): c < t < b, 0 < y < phi(t)}``."""

    profile: Profile
    kind = "special"

    def __post_init__(self):
        inner = self.profile.grid(20001)[1:-1]
        vals = self.profile(inner)
        if np.any(~np.isfinite(vals)):
            raise InvariantViolation("profile must be finite")
        if np.any(vals <= 0):
            raise InvariantViolation("special domain needs phi > 0 on the open interval")

    @property
    def interval(self):
        return self.profile.interval

    @cached_property
    def area(self) -> float:
        from scipy import integrate

        pr = self.profile
        val, _ = integrate.quad(lambda t: float(pr(t)), pr.c, pr.b, limit=400, epsabs=1e-14,
                                epsrel=1e-12)
        return float(val)

    @cached_property
    def bbox(self) -> np.ndarray:
        pr = self.profile
        return np.array([[pr.c, 0.0], [pr.b, pr.phi_max()]])

    def contains(self, pts) -> np.ndarray:
        p = _points(pts)
        t, y = p[..., 0], p[..., 1]
        pr = self.profile
        inside = (t > pr.c) & (t < pr.b) & (y > 0)
        out = np.zeros(t.shape, bool)
        if np.any(inside):
            out[inside] = y[inside] < pr(t[inside])
        return out

    def pieces(self) -> List[Piece]:
        pr = self.profile
        c, b = pr.c, pr.b
        L = b - c
        out = [segment((c, 0.0), (b, 0.0), "base")]
        hb, hc = float(pr(b)), float(pr(c))
        if hb > 0:
            out.append(segment((b, 0.0), (b, hb), "right"))

        def xy(s):
            t = b - L * np.asarray(s, float)
            return np.stack([t, pr(t)], axis=-1)

        def dxy(s):
            t = b - L * np.asarray(s, float)
            return -L * np.stack([np.ones_like(t), pr.derivative(t)], axis=-1)

        out.append(Piece(xy, dxy, "graph"))
        if hc > 0:
            out.append(segment((c, hc), (c, 0.0), "left"))
        return out

    def to_json(self) -> dict:
        return {"shape": "special", "interval": [self.profile.c, self.profile.b],
                "profile": self.profile.to_json()}


@dataclass(frozen=True, eq=False)
class AffineImage(_Shape):
    """Image of ``base`` under ``x -> Q x + shift``."""

    base: object
    Q: np.ndarray
    shift: np.ndarray = field(default_factory=lambda: np.zeros(2))
    kind = "affine"

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, float))
        n = Q.shape[0]
        if Q.shape != (n, n) or n != self.base.dimension:
            raise ArgumentError("matrix shape does not match base dimension")
        det = float(np.linalg.det(Q))
        if abs(det) < 1e-14 * max(1.0, np.abs(Q).max() ** n):
            raise ArgumentError("affine map is singular")
        shift = np.zeros(n) if self.shift is None else np.asarray(self.shift, float).reshape(n)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "shift", shift)

    @property
    def dimension(self) -> int:
        return self.base.dimension

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.Q))

    @property
    def area(self) -> float:
        return abs(self.det) * self.base.area

    @property
    def bbox(self) -> np.ndarray:
        lo, hi = self.base.bbox
        n = len(lo)
        corners = np.array(np.meshgrid(*[[lo[i], hi[i]] for i in range(n)], indexing="ij"))
        corners = corners.reshape(n, -1).T @ self.Q.T + self.shift
        return np.stack([corners.min(0), corners.max(0)])

    def contains(self, pts) -> np.ndarray:
        p = _points(pts)
        back = np.linalg.solve(self.Q, (p - self.shift).reshape(-1, p.shape[-1]).T).T
        return self.base.contains(back.reshape(p.shape))

    def pieces(self) -> List[Piece]:
        out = [pc.mapped(self.Q, self.shift) for pc in self.base.pieces()]
        if self.det < 0:
            out = [pc.reversed() for pc in reversed(out)]
        return out

    def to_json(self) -> dict:
        return {"shape": "affine", "base": self.base.to_json(), "matrix": self.Q.tolist(),
                "shift": self.shift.tolist()}


def affine_image(d, Q, b=None) -> AffineImage:
    """Wrap ``d`` as its image under ``x -> Q x + b``."""
    return AffineImage(d, np.asarray(Q, float), None if b is None else np.asarray(b, float))


@dataclass(frozen=True, eq=False)
class Assembled(_Shape):
    """Square of side ``2 (b - c)`` with a symmetric arch glued outward on every side.

    Each arch is the graph of ``psi(t) = phi(c + t)`` for ``t <= b - c`` and
    ``phi(2b - c - t)`` beyond, measured along the outward normal of its side.
    """

    profile: Profile
    kind = "assembled"

    @property
    def side(self) -> float:
        return 2.0 * self.profile.length

    def psi(self, t):
        pr = self.profile
        t = np.asarray(t, float)
        half = pr.length
        return pr(pr.c + np.where(t <= half, t, 2 * half - t))

    def dpsi(self, t):
        pr = self.profile
        t = np.asarray(t, float)
        half = pr.length
        return np.where(t <= half, 1.0, -1.0) * pr.derivative(pr.c + np.where(t <= half, t, 2 * half - t))

    def frames(self):
        """(corner, unit side direction, unit outward normal) for the four sides, counterclockwise."""
        L = self.side
        corners = np.array([[0.0, 0.0], [L, 0.0], [L, L], [0.0, L]])
        dirs = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        normals = np.stack([dirs[:, 1], -dirs[:, 0]], axis=1)
        return corners, dirs, normals

    @cached_property
    def height(self) -> float:
        return self.profile.phi_max()

    @cached_property
    def area(self) -> float:
        return self.side ** 2 + 8.0 * Special(self.profile).area

    @property
    def bbox(self) -> np.ndarray:
        L, H = self.side, self.height
        return np.array([[-H, -H], [L + H, L + H]])

    def contains(self, pts) -> np.ndarray:
        p = _points(pts)
        L = self.side
        out = np.all((p > 0) & (p < L), axis=-1)
        corners, dirs, normals = self.frames()
        for P, e, nv in zip(corners, dirs, normals):
            q = p - P
            t = q @ e
            h = q @ nv
            cand = (t > 0) & (t < L) & (h >= 0) & ~out
            if np.any(cand):
                sub = np.zeros_like(cand)
                sub[cand] = h[cand] < self.psi(t[cand])
                out |= sub
        return out

    def pieces(self) -> List[Piece]:
        L = self.side
        half = L / 2
        out = []
        corners, dirs, normals = self.frames()
        for k, (P, e, nv) in enumerate(zip(corners, dirs, normals)):
            for j, (t0, t1) in enumerate(((0.0, half), (half, L))):
                def xy(s, P=P, e=e, nv=nv, t0=t0, t1=t1):
                    t = t0 + (t1 - t0) * np.asarray(s, float)
                    return P + np.multiply.outer(t, e) + np.multiply.outer(self.psi(t), nv)

                def dxy(s, e=e, nv=nv, t0=t0, t1=t1):
                    t = t0 + (t1 - t0) * np.asarray(s, float)
                    return (t1 - t0) * (e + np.multiply.outer(self.dpsi(t), nv))

                out.append(Piece(xy, dxy, f"side{k}-{'G' if j == 0 else 'G*'}"))
        return out

    def junctions(self):
        """The 8 junction points with incoming and outgoing tangent directions."""
        pcs = self.pieces()
        rows = []
        for i, pc in enumerate(pcs):
            prev = pcs[i - 1]
            where = "apex" if pc.label.endswith("G*") else "corner"
            rows.append({
                "index": i,
                "kind": where,
                "point": pc.xy(np.array([0.0]))[0],
                "incoming": prev.dxy(np.array([1.0]))[0],
                "outgoing": pc.dxy(np.array([0.0]))[0],
            })
        return rows

    def to_json(self) -> dict:
        return {"shape": "assembled", "interval": [self.profile.c, self.profile.b],
                "profile": self.profile.to_json()}


def koch_snowflake(level: int = 8, side: float = 1.0) -> Polygon:
    """Level-``level`` Koch snowflake prefractal on an equilateral triangle (counterclockwise)."""
    pts = side * np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    c60, s60 = 0.5, np.sqrt(3) / 2
    rot = np.array([[c60, s60], [-s60, c60]])  # -60 degrees: bumps point outward
    for _ in range(level):
        a = pts
        d = np.roll(pts, -1, axis=0) - a
        p1 = a + d / 3
        p2 = p1 + (d / 3) @ rot.T
        p3 = a + 2 * d / 3
        pts = np.stack([a, p1, p2, p3], axis=1).reshape(-1, 2)
    return Polygon(pts, name=f"koch{level}")


def regular_polygon(k: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> Polygon:
    a = phase + 2 * np.pi * np.arange(k) / k
    return Polygon(np.asarray(center) + radius * np.stack([np.cos(a), np.sin(a)], axis=1),
                   name=f"regular{k}")


def random_convex_polygon(k: int, seed: int, radius: float = 1.0) -> Polygon:
    """Convex ``k``-gon with jittered vertex angles and radii."""
    rng = np.random.default_rng(seed)
    base = 2 * np.pi * np.arange(k) / k
    ang = np.sort(base + rng.uniform(-0.3, 0.3, k) * (2 * np.pi / k))
    r = radius * rng.uniform(0.7, 1.0, k)
    v = np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1)
    hull = shapely.MultiPoint(v).convex_hull
    ring = np.asarray(hull.exterior.coords)[:-1]
    if not shapely.LinearRing(ring).is_ccw:
        ring = ring[::-1]
    return Polygon(ring, name=f"random{k}")


def domain_from_json(obj: dict):
    """Build a domain from the JSON schema used by the CLI."""
    from ..moduli import modulus_from_json
    from .profiles import make_surrogate_profile, profile_from_json

    if not isinstance(obj, dict) or "shape" not in obj:
        raise ArgumentError("domain JSON must be an object with a 'shape' field")
    shape = obj["shape"]
    if shape == "disk":
        return Disk(float(obj.get("radius", 1.0)), tuple(obj.get("center", (0.0, 0.0))))
    if shape in ("rectangle", "square"):
        widths = obj.get("widths", [obj.get("side", 1.0)] * int(obj.get("dimension", 2)))
        return Rectangle(tuple(widths), obj.get("origin"))
    if shape == "polygon":
        return Polygon(np.asarray(obj["vertices"], float))
    if shape == "koch":
        return koch_snowflake(int(obj.get("level", 8)), float(obj.get("side", 1.0)))
    if shape == "special":
        prof = dict(obj.get("profile", {}))
        prof.setdefault("interval", obj.get("interval", (0.0, 1.0)))
        return Special(profile_from_json(prof))
    if shape == "assembled":
        if "profile" in obj:
            pr = profile_from_json(obj["profile"])
        else:
            pr = make_surrogate_profile(modulus_from_json(obj["modulus"]),
                                        tuple(obj.get("interval", (0.0, 1.0))),
                                        float(obj.get("eta", 0.25)), obj.get("depth"))
        from .construct import build_theorem3_domain

        return build_theorem3_domain(pr, float(obj.get("tol", 1e-6)))
    if shape == "affine":
        return affine_image(domain_from_json(obj["base"]), obj["matrix"], obj.get("shift"))
    raise ArgumentError(f"unknown shape {shape!r}")


def diameter(d) -> float:
    from .boundary import sample_boundary

    lo, hi = d.bbox
    if d.kind == "disk":
        return 2.0 * d.radius
    if getattr(d, "dimension", 2) != 2:
        return float(np.linalg.norm(hi - lo))
    pts = sample_boundary(d, float(np.linalg.norm(hi - lo)) / 2000).points
    hull = shapely.MultiPoint(pts).convex_hull
    h = np.asarray(hull.exterior.coords)
    diff = h[:, None, :] - h[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())

