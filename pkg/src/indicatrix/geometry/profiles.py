"""Real profiles ``phi`` with derivative access.

A profile generates special domains ``{(t, y): c < t < b, 0 < y < phi(t)}``
and the exponentials ``exp(i lam phi)`` studied in :mod:`indicatrix.apnorms`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from ..errors import ArgumentError, InvariantViolation
from ..moduli import Modulus

SURROGATE_MAX_DEPTH = 30
SURROGATE_COEF_FLOOR = 1e-13
_CHUNK = 1 << 16


def _chunked(fn):
    """Evaluate ``fn`` over flat chunks to bound the (points x terms) scratch."""

    def wrapped(t):
        t = np.asarray(t, float)
        if t.size <= _CHUNK:
            return fn(t)
        flat = t.ravel()
        out = np.concatenate([fn(flat[i:i + _CHUNK]) for i in range(0, flat.size, _CHUNK)])
        return out.reshape(t.shape)

    return wrapped


@dataclass(frozen=True, eq=False)
class Profile:
    phi: Callable[[np.ndarray], np.ndarray]
    dphi: Callable[[np.ndarray], np.ndarray]
    interval: tuple
    modulus: Optional[Modulus] = None
    periodic: bool = False
    name: str = "profile"
    params: dict = field(default_factory=dict)

    def __call__(self, t):
        return self.phi(np.asarray(t, float))

    def derivative(self, t):
        return self.dphi(np.asarray(t, float))

    @property
    def c(self) -> float:
        return float(self.interval[0])

    @property
    def b(self) -> float:
        return float(self.interval[1])

    @property
    def length(self) -> float:
        return self.b - self.c

    def grid(self, n: int = 4097) -> np.ndarray:
        return np.linspace(self.c, self.b, n)

    def dphi_max(self, n: int = 20001) -> float:
        return float(np.max(np.abs(self.dphi(self.grid(n)))))

    def phi_max(self, n: int = 20001) -> float:
        return float(np.max(self.phi(self.grid(n))))

    def rescaled(self, factor: float) -> "Profile":
        """Vertical dilation ``phi -> factor * phi``."""
        f, df = self.phi, self.dphi
        m = self.modulus
        return Profile(lambda t: factor * f(t), lambda t: factor * df(t), self.interval, m,
                       self.periodic, f"{self.name}*{factor:g}", dict(self.params, scale=factor))

    def to_json(self) -> dict:
        out = {"name": self.name, "interval": [self.c, self.b]}
        out.update(self.params)
        if self.modulus is not None:
            out["modulus"] = self.modulus.to_json()
        return out


def constant_profile(height: float, interval=(0.0, 1.0)) -> Profile:
    h = float(height)
    return Profile(lambda t: np.full_like(np.asarray(t, float), h),
                   lambda t: np.zeros_like(np.asarray(t, float)),
                   tuple(map(float, interval)), Modulus.power(1.0), name="constant",
                   params={"kind": "constant", "height": h})


def linear_profile(slope: float = 1.0, interval=(0.0, 1.0), offset: float = 0.0) -> Profile:
    """``phi(t) = offset + slope * (t - c)``."""
    c = float(interval[0])
    k, o = float(slope), float(offset)
    return Profile(lambda t: o + k * (np.asarray(t, float) - c),
                   lambda t: np.full_like(np.asarray(t, float), k),
                   tuple(map(float, interval)), Modulus.power(1.0), name="linear",
                   params={"kind": "linear", "slope": k, "offset": o})


def cosine_profile() -> Profile:
    """``phi = cos`` on the circle ``[0, 2 pi]``; its derivative is Lipschitz."""
    return Profile(np.cos, lambda t: -np.sin(t), (0.0, 2 * np.pi), Modulus.power(1.0),
                   periodic=True, name="cos", params={"kind": "cos"})


def _lacunary_coefficients(m: Modulus, depth: Optional[int]):
    ks = np.arange(1, SURROGATE_MAX_DEPTH + 1)
    a = m(np.minimum(2.0 ** -ks, m.dmax))
    if depth is None:
        keep = a >= SURROGATE_COEF_FLOOR * a[0]
        depth = int(np.count_nonzero(keep))
    return ks[:depth], a[:depth]


def make_surrogate_profile(m: Modulus, interval=(0.0, 1.0), eta: float = 0.25,
                           depth: Optional[int] = None) -> Profile:
    """Ramp times lacunary wiggle, a stand-in for an extremal C^{1,omega} profile.

    With ``u = (t - c)/(b - c)``::

        phi'(t) = (1 - u) (1 + eta W(u)) / (1 + eta S),   W(u) = sum_k a_k cos(2^k pi u)

    where ``a_k = omega(2^-k)`` and ``S = W(0) = sum a_k``.  Hence
    ``phi(c) = 0``, ``phi'(c) = 1``, ``phi'(b) = 0`` and ``phi' > 0`` inside
    whenever ``eta S < 1``.  ``phi`` is the exact antiderivative.
    """
    if not m.doubling:
        raise ArgumentError("surrogate profile requires a modulus with the doubling flag")
    if not 0 <= eta < 0.5:
        raise ArgumentError(f"eta must lie in [0, 1/2), got {eta}")
    ks, a = _lacunary_coefficients(m, depth)
    S = float(a.sum())
    if eta * S >= 1:
        raise ArgumentError(f"eta={eta} too large for positivity (eta * sum a_k = {eta * S:.3f} >= 1)")
    c, b = map(float, interval)
    L = b - c
    w = (2.0 ** ks) * np.pi
    norm = 1.0 + eta * S

    def _u(t):
        return (np.asarray(t, float) - c) / L

    def dphi(t):
        u = _u(t)
        wig = np.cos(np.multiply.outer(u, w)) @ a
        return (1.0 - u) * (1.0 + eta * wig) / norm

    def phi(t):
        u = _u(t)
        wu = np.multiply.outer(u, w)
        terms = ((1.0 - u)[..., None] * np.sin(wu) / w + (1.0 - np.cos(wu)) / w ** 2) @ a
        return L * (u - 0.5 * u * u + eta * terms) / norm

    return Profile(_chunked(phi), _chunked(dphi), (c, b), m, name="surrogate",
                   params={"kind": "surrogate", "eta": float(eta), "depth": int(ks.size)})


def lacunary_periodic_profile(m: Modulus, depth: Optional[int] = None) -> Profile:
    """Periodic C^{1,omega} profile ``phi(t) = sin t + sum_k a_k 2^-k sin(2^k t)``."""
    ks, a = _lacunary_coefficients(m, depth)
    f = 2.0 ** ks

    def phi(t):
        t = np.asarray(t, float)
        return np.sin(t) + np.sin(np.multiply.outer(t, f)) @ (a / f)

    def dphi(t):
        t = np.asarray(t, float)
        return np.cos(t) + np.cos(np.multiply.outer(t, f)) @ a

    return Profile(_chunked(phi), _chunked(dphi), (0.0, 2 * np.pi), m, periodic=True,
                   name="lacunary",
                   params={"kind": "lacunary", "depth": int(ks.size)})


def profile_from_json(obj: dict) -> Profile:
    from ..moduli import modulus_from_json

    kind = obj.get("kind", "surrogate")
    interval = tuple(obj.get("interval", (0.0, 1.0)))
    if kind == "constant":
        return constant_profile(obj.get("height", 1.0), interval)
    if kind == "linear":
        return linear_profile(obj.get("slope", 1.0), interval, obj.get("offset", 0.0))
    if kind == "cos":
        return cosine_profile()
    if kind == "surrogate":
        return make_surrogate_profile(modulus_from_json(obj["modulus"]), interval,
                                      float(obj.get("eta", 0.25)), obj.get("depth"))
    if kind == "lacunary":
        return lacunary_periodic_profile(modulus_from_json(obj["modulus"]), obj.get("depth"))
    raise ArgumentError(f"unknown profile kind {kind!r}")


# checks -----------------------------------------------------------------------

def derivative_modulus(pr: Profile, deltas, n_grid: int = 200001) -> np.ndarray:
    """Measured ``sup_{|x-y| <= delta} |phi'(x) - phi'(y)|`` on a uniform grid."""
    t = pr.grid(n_grid)
    h = t[1] - t[0]
    f = pr.derivative(t)
    out = []
    for d in np.atleast_1d(deltas):
        size = int(np.floor(d / h)) + 1
        out.append(np.max(maximum_filter1d(f, size) - minimum_filter1d(f, size)))
    return np.maximum.accumulate(np.array(out))


def fitted_modulus_constant(pr: Profile, deltas=None, n_grid: int = 200001) -> float:
    """Smallest ``C`` with measured modulus of ``phi'`` <= ``C omega(delta)`` on the grid."""
    if pr.modulus is None:
        raise ArgumentError("profile has no declared modulus")
    if deltas is None:
        deltas = np.geomspace(1e-4, 1e-1, 13) * pr.length
    deltas = np.asarray(deltas, float)
    meas = derivative_modulus(pr, deltas, n_grid)
    return float(np.max(meas / pr.modulus(np.minimum(deltas, pr.modulus.dmax))))


def theorem3_profile_violations(pr: Profile, tol: float = 1e-9, n_grid: int = 100001) -> list:
    """List failed conditions among phi(c)=0, phi'(c)=1, phi'(b)=0, phi' > 0 on (c, b)."""
    bad = []
    c, b = pr.c, pr.b
    if abs(float(pr(c))) > tol:
        bad.append(f"phi(c) = {float(pr(c)):.3e} != 0")
    if abs(float(pr.derivative(c)) - 1.0) > tol:
        bad.append(f"phi'(c) = {float(pr.derivative(c)):.12g} != 1")
    if abs(float(pr.derivative(b))) > tol:
        bad.append(f"phi'(b) = {float(pr.derivative(b)):.3e} != 0")
    inner = pr.grid(n_grid)[1:-1]
    if np.any(pr.derivative(inner) <= 0):
        bad.append("phi' is not positive on (c, b)")
    return bad


def is_nowhere_linear(pr: Profile, n_grid: int = 100001, window: int = 64,
                      floor: float = 1e-12) -> bool:
    """No window of ``window`` consecutive second differences stays below ``floor``."""
    t = pr.grid(n_grid)
    f = pr(t)
    d2 = np.abs(f[2:] - 2 * f[1:-1] + f[:-2])
    big = maximum_filter1d(d2, window)
    return bool(np.all(big[window // 2: -window // 2] >= floor))


def positivity_holds(pr: Profile, n_grid: int = 100001) -> bool:
    return bool(np.all(pr.derivative(pr.grid(n_grid)[:-1]) > 0))


def check_profile_modulus(pr: Profile, max_constant: float = 1e3) -> float:
    C = fitted_modulus_constant(pr)
    if not np.isfinite(C) or C > max_constant:
        raise InvariantViolation(f"measured modulus of phi' not bounded by C*omega (C={C})")
    return C
