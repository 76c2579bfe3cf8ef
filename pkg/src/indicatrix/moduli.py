"""Moduli of continuity and the integral criteria built on them.

A modulus ``omega`` is a nondecreasing continuous gauge on ``[0, dmax]`` with
``omega(0) = 0``.  From it we derive ``chi(delta) = delta * omega(delta)``, the
inverse ``chi^{-1}``, the growth gauge ``Theta_p`` and the two improper
integrals whose finiteness decides integrability of indicator transforms::

    J(eps) = int_eps^1 delta^(n(p-1)-1) / omega(delta)^(n-p) d delta
    I(eps) = int_{1/chi(1)}^{1/chi(eps)} lam^(n-1-p) chi^{-1}(1/lam)^((n-1)p) d lam
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import (
    ArgumentError,
    InvariantViolation,
    OutOfDomainError,
    OutOfRangeError,
    SingularIntegrandError,
)

KINDS = ("power", "power-log", "table", "analytic")

# sample grid used to check monotonicity / doubling of non-closed-form moduli
_CHECK_GRID_SIZE = 2000
_CHECK_GRID_MIN = 1e-12

CHI_RTOL = 1e-10
DIVERGENCE_EPS_SMALL = 1e-8
DIVERGENCE_EPS_LARGE = 1e-2
DIVERGENCE_GROWTH = 1e4


def _check_grid(dmax: float) -> np.ndarray:
    return np.geomspace(_CHECK_GRID_MIN * dmax, dmax, _CHECK_GRID_SIZE)


@dataclass(frozen=True, eq=False)
class Modulus:
    """A modulus of continuity.

    Use the constructors :meth:`power`, :meth:`power_log`, :meth:`table` and
    :meth:`analytic` rather than instantiating directly.
    """

    kind: str
    alpha: float = 1.0
    beta: float = 0.0
    deltas: Optional[np.ndarray] = None
    omegas: Optional[np.ndarray] = None
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    dmax: float = 1.0
    doubling: bool = False
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"unknown modulus kind {self.kind!r}")
        if not self.dmax > 0:
            raise ArgumentError("dmax must be positive")
        if self.kind in ("power", "power-log") and not 0 < self.alpha <= 1:
            raise ArgumentError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.kind == "table":
            d = np.asarray(self.deltas, dtype=float)
            w = np.asarray(self.omegas, dtype=float)
            if d.ndim != 1 or d.shape != w.shape or d.size < 2:
                raise ArgumentError("table modulus needs matching 1-D delta/omega arrays")
            if d[0] != 0.0 or w[0] != 0.0:
                raise InvariantViolation("table modulus must start at (0, 0)")
            if np.any(np.diff(d) <= 0) or np.any(np.diff(w) < 0):
                raise InvariantViolation("table modulus must be monotone")
            object.__setattr__(self, "deltas", d)
            object.__setattr__(self, "omegas", w)
            object.__setattr__(self, "dmax", float(d[-1]))
        if self.kind == "analytic" and self.func is None:
            raise ArgumentError("analytic modulus needs a callable")
        self._validate()

    # constructors ---------------------------------------------------------
    @classmethod
    def power(cls, alpha: float, dmax: float = 1.0, doubling: Optional[bool] = None):
        """``omega(delta) = delta**alpha``; doubling holds strictly iff alpha < 1."""
        if doubling is None:
            doubling = alpha < 1
        return cls("power", alpha=float(alpha), dmax=dmax, doubling=doubling)

    @classmethod
    def power_log(cls, alpha: float, beta: float, dmax: float = 1.0, doubling: bool = False):
        """``omega(delta) = delta**alpha * (1 + log(1/delta))**beta``."""
        return cls("power-log", alpha=float(alpha), beta=float(beta), dmax=dmax, doubling=doubling)

    @classmethod
    def table(cls, deltas: Sequence[float], omegas: Sequence[float], doubling: bool = False):
        return cls("table", deltas=np.asarray(deltas, float), omegas=np.asarray(omegas, float),
                   doubling=doubling)

    @classmethod
    def analytic(cls, func, dmax: float = 1.0, doubling: bool = False, name: str = "analytic"):
        return cls("analytic", func=func, dmax=dmax, doubling=doubling, name=name)

    # evaluation -----------------------------------------------------------
    def _raw(self, d: np.ndarray) -> np.ndarray:
        if self.kind == "power":
            return d ** self.alpha
        if self.kind == "power-log":
            with np.errstate(divide="ignore", invalid="ignore"):
                out = d ** self.alpha * (1.0 + np.log(self.dmax / d)) ** self.beta
            return np.where(d > 0, out, 0.0)
        if self.kind == "table":
            return np.interp(d, self.deltas, self.omegas)
        return np.asarray(self.func(d), dtype=float)

    def __call__(self, delta):
        d = np.asarray(delta, dtype=float)
        slack = 1e-12 * self.dmax
        if np.any(d < 0) or np.any(d > self.dmax + slack) or np.any(np.isnan(d)):
            raise OutOfDomainError(f"delta outside [0, {self.dmax}]")
        d = np.minimum(d, self.dmax)
        out = self._raw(d)
        return float(out) if np.ndim(out) == 0 else out

    def _validate(self):
        grid = _check_grid(self.dmax)
        w = self._raw(grid)
        w0 = float(self._raw(np.array(0.0)))
        if w0 != 0.0:
            raise InvariantViolation("modulus must vanish at 0")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise InvariantViolation("modulus must be finite and nonnegative")
        if np.any(np.diff(w) < -1e-14 * np.maximum(w[1:], 1e-300)):
            raise InvariantViolation("modulus is not nondecreasing on the check grid")
        if self.doubling and not doubling_holds(self):
            raise InvariantViolation("doubling flag set but omega(2d) < 2 omega(d) fails")

    def to_json(self) -> dict:
        if self.kind == "power":
            return {"kind": "power", "alpha": self.alpha}
        if self.kind == "power-log":
            return {"kind": "power-log", "alpha": self.alpha, "beta": self.beta}
        if self.kind == "table":
            return {"kind": "table", "deltas": self.deltas.tolist(), "omegas": self.omegas.tolist()}
        return {"kind": "analytic", "name": self.name}


def eval_modulus(m: Modulus, delta):
    """Evaluate ``omega(delta)``; raises :class:`OutOfDomainError` outside ``[0, dmax]``."""
    return m(delta)


def doubling_holds(m: Modulus, deltas=None) -> bool:
    """Check ``omega(2 d) < 2 omega(d)`` on a grid (default ``d = 2^-k`` times dmax/2, k=0..40)."""
    if deltas is None:
        deltas = m.dmax / 2 * 2.0 ** -np.arange(0, 41)
    d = np.asarray(deltas, float)
    d = d[(d > 0) & (2 * d <= m.dmax)]
    w1 = m._raw(d)
    w2 = m._raw(2 * d)
    return bool(np.all(w2 < 2 * w1))


def modulus_from_json(obj: dict) -> Modulus:
    kind = obj.get("kind")
    if kind == "power":
        return Modulus.power(float(obj["alpha"]))
    if kind == "power-log":
        return Modulus.power_log(float(obj["alpha"]), float(obj.get("beta", 0.0)))
    if kind == "table":
        return Modulus.table(obj["deltas"], obj["omegas"], doubling=bool(obj.get("doubling", False)))
    raise ArgumentError(f"cannot build modulus from {obj!r}")


# chi and its inverse --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ChiMap:
    """``chi(delta) = delta * omega(delta)`` with a bracketing table for inversion."""

    base: Modulus
    _grid: np.ndarray = field(init=False, repr=False)
    _chi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dmax = self.base.dmax
        grid = np.geomspace(1e-150 * dmax, dmax, 4097)
        with np.errstate(under="ignore"):
            chi = grid * self.base._raw(grid)
        positive = chi > 0
        if np.any(np.diff(chi[positive]) <= 0):
            raise InvariantViolation("chi is not strictly increasing")
        if not positive[-1]:
            raise InvariantViolation("omega vanishes identically")
        first = int(np.argmax(positive))
        object.__setattr__(self, "_grid", grid[first:])
        object.__setattr__(self, "_chi", chi[first:])

    def __call__(self, delta):
        d = np.asarray(delta, float)
        out = d * self.base(d)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def chi_max(self) -> float:
        return float(self._chi[-1])

    def inverse(self, y, rtol: float = CHI_RTOL):
        """Solve ``chi(delta) = y`` by bisection in ``log delta``."""
        yy = np.asarray(y, dtype=float)
        scalar = yy.ndim == 0
        yy = np.atleast_1d(yy)
        if np.any(~(yy > 0)) or np.any(yy > self.chi_max * (1 + 1e-14)) or np.any(yy < self._chi[0]):
            raise OutOfRangeError(f"y outside the range of chi (0, {self.chi_max}]")
        yy = np.minimum(yy, self.chi_max)
        idx = np.clip(np.searchsorted(self._chi, yy), 1, len(self._chi) - 1)
        lo = np.log(self._grid[idx - 1])
        hi = np.log(self._grid[idx])
        # 4097 nodes over ~345 in log -> bracket width < 0.09, so 40 halvings give < 1e-13
        tol = min(rtol, 1e-12) * 0.1
        logy = np.log(yy)
        base = self.base
        while np.any(hi - lo > tol):
            mid = 0.5 * (lo + hi)
            d = np.exp(mid)
            with np.errstate(divide="ignore"):
                val = np.log(d * base._raw(d))
            up = val > logy
            hi = np.where(up, mid, hi)
            lo = np.where(up, lo, mid)
        out = np.exp(0.5 * (lo + hi))
        return float(out[0]) if scalar else out


def chi_inverse(c: ChiMap, y):
    return c.inverse(y)


# integral criteria ----------------------------------------------------------

def _check_nonvanishing(m: Modulus, a: float, b: float):
    grid = np.geomspace(a, b, 512)
    if np.any(m._raw(grid) <= 0):
        raise SingularIntegrandError(f"omega vanishes inside ({a}, {b})")


def _breakpoints(m: Modulus, a: float, b: float):
    if m.kind != "table":
        return None
    pts = m.deltas[(m.deltas > a) & (m.deltas < b)]
    if pts.size == 0:
        return None
    return np.log(pts)[:100]


def theorem2_integrand(m: Modulus, n: int, p: float, delta):
    d = np.asarray(delta, float)
    return d ** (n * (p - 1) - 1) / m._raw(d) ** (n - p)


def theorem2_integral(m: Modulus, n: int, p: float, eps: float) -> float:
    """``J(eps) = int_eps^1 delta^(n(p-1)-1) / omega(delta)^(n-p) d delta``.

    Integrated in ``x = log delta`` by adaptive Gauss-Kronrod quadrature.
    """
    if n < 2:
        raise ArgumentError("n must be >= 2")
    if not 0 < eps < 1:
        raise ArgumentError("eps must lie in (0, 1)")
    _check_nonvanishing(m, eps, 1.0)

    def f(x):
        d = np.exp(x)
        return d * theorem2_integrand(m, n, p, d)

    val, _ = integrate.quad(f, np.log(eps), 0.0, epsabs=0.0, epsrel=1e-12, limit=500,
                            points=_breakpoints(m, eps, 1.0))
    return float(val)


def lemma2_dual_integral(c: ChiMap, n: int, p: float, lam_max: float) -> float:
    """``int_{1/chi(1)}^{lam_max} lam^(n-1-p) chi^{-1}(1/lam)^((n-1)p) d lam``."""
    lam_min = 1.0 / c(1.0)
    if not lam_max > lam_min:
        raise ArgumentError(f"upper limit must exceed 1/chi(1) = {lam_min}")

    def f(x):
        lam = np.exp(x)
        return lam ** (n - p) * c.inverse(1.0 / lam) ** ((n - 1) * p)

    pts = None
    if c.base.kind == "table":
        knots = c.base.deltas[(c.base.deltas > 0) & (c.base.deltas < 1.0)]
        lam_knots = 1.0 / (knots * c.base._raw(knots))
        inside = lam_knots[(lam_knots > lam_min) & (lam_knots < lam_max)]
        pts = np.log(inside)[:100] if inside.size else None
    val, _ = integrate.quad(f, np.log(lam_min), np.log(lam_max), epsabs=0.0, epsrel=1e-12,
                            limit=500, points=pts)
    return float(val)


def identity6_rhs(m: Modulus, n: int, p: float, eps: float) -> float:
    """Right-hand side of the integration-by-parts identity relating ``I(eps)`` and ``J(eps)``."""
    boundary = (eps ** (n * (p - 1)) / m(eps) ** (n - p) - 1.0 / m(1.0) ** (n - p)) / (n - p)
    return boundary + (n - 1) * p / (n - p) * theorem2_integral(m, n, p, eps)


def identity6_residual(m: Modulus, n: int, p: float, eps: float = 1e-3) -> float:
    """Relative residual ``|I(eps) - rhs| / |I(eps)|``."""
    c = ChiMap(m)
    lhs = lemma2_dual_integral(c, n, p, 1.0 / c(eps))
    rhs = identity6_rhs(m, n, p, eps)
    return abs(lhs - rhs) / abs(lhs)


def critical_exponent_power(n: int, alpha: float) -> float:
    """Largest ``p`` for which the Theorem-2 integral diverges when ``omega = delta**alpha``."""
    return 1.0 + (n - 1) * alpha / (n + alpha)


def theorem2_exponent(m: Modulus, n: int, p: float) -> float:
    """Power of delta in the integrand near 0 (closed form, power kinds only)."""
    if m.kind not in ("power", "power-log"):
        raise ArgumentError("closed-form exponent only for power kinds")
    return n * (p - 1) - 1 - m.alpha * (n - p)


def theorem2_diverges(m: Modulus, n: int, p: float) -> bool:
    """Classify ``J(0+)`` as divergent.

    Power kinds use the exact exponent test (with the log factor for
    power-log).  Other kinds diverge when ``J(1e-8) > 1e4 J(1e-2)`` or when
    the integrand's log-log slope on ``[1e-8, 1e-6]`` is at most -1.
    """
    if m.kind in ("power", "power-log"):
        e = theorem2_exponent(m, n, p)
        if abs(e + 1) > 1e-12:
            return e < -1
        # delta^-1 * (1 + log(1/delta))^(-beta (n-p))
        return m.beta * (n - p) <= 1
    j_small = theorem2_integral(m, n, p, DIVERGENCE_EPS_SMALL)
    j_large = theorem2_integral(m, n, p, DIVERGENCE_EPS_LARGE)
    if j_small > DIVERGENCE_GROWTH * j_large:
        return True
    d = np.array([1e-8, 1e-6])
    g = theorem2_integrand(m, n, p, d)
    slope = np.log(g[1] / g[0]) / np.log(d[1] / d[0])
    return bool(slope <= -1)


def theta_p(c: ChiMap, p: float, y) -> float:
    """``Theta_p(y) = (int_1^y chi^{-1}(1/tau)^p d tau)^(1/p)``."""
    if not 1 < p:
        raise ArgumentError("p must exceed 1")
    y = float(y)
    if y < 1:
        raise ArgumentError("y must be >= 1")
    if y == 1:
        return 0.0

    def f(x):
        tau = np.exp(x)
        return tau * c.inverse(1.0 / tau) ** p

    val, _ = integrate.quad(f, 0.0, np.log(y), epsabs=0.0, epsrel=1e-11, limit=500)
    return float(val ** (1.0 / p))


def theta_p_curve(c: ChiMap, p: float, y_max: float, points_per_decade: int = 400):
    """``Theta_p`` on a log grid ``[1, y_max]`` by cumulative Simpson integration."""
    n = max(int(np.log10(y_max) * points_per_decade), 16) | 1
    x = np.linspace(0.0, np.log(y_max), n)
    tau = np.exp(x)
    g = tau * c.inverse(1.0 / tau) ** p
    cum = integrate.cumulative_simpson(g, x=x, initial=0.0)
    return tau, np.maximum(cum, 0.0) ** (1.0 / p)


def theta_tail_integral(c: ChiMap, p: float, a: float, points_per_decade: int = 400) -> float:
    """``int_1^a lam^-p Theta_p(lam)^p d lam``; finite as a -> inf iff the Theorem-2 integral converges (n=2)."""
    lam, th = theta_p_curve(c, p, a, points_per_decade)
    x = np.log(lam)
    return float(integrate.simpson(lam ** (1 - p) * th ** p, x=x))


def regularize_modulus(m: Modulus, grid_size: int = 4000) -> Modulus:
    """``omega*(d) = d/(1+d) + d * inf_{0<x<=d} omega(x)/x``.

    The infimum is a running minimum over a log grid from ``1e-15 dmax``;
    ``omega*`` satisfies strict doubling and ``omega* = O(omega)``.
    """
    xs = np.geomspace(1e-15 * m.dmax, m.dmax, grid_size)
    w = m._raw(xs)
    if np.any(w <= 0):
        raise InvariantViolation("regularization needs omega > 0 on (0, dmax]")
    run_min = np.minimum.accumulate(w / xs)

    def omega_star(d):
        d = np.asarray(d, float)
        out = np.zeros_like(d)
        pos = d > 0
        dp = d[pos]
        k = np.searchsorted(xs, dp, side="right") - 1
        grid_inf = np.where(k >= 0, run_min[np.clip(k, 0, None)], np.inf)
        # min(d * grid_inf, omega(d)) is nondecreasing in d
        second = np.minimum(dp * grid_inf, m._raw(dp))
        out[pos] = dp / (1 + dp) + second
        return out

    return Modulus.analytic(omega_star, dmax=m.dmax, doubling=True,
                            name=f"regularized({m.kind})")
