"""Difference-form Sobolev seminorm of indicator functions.

For ``f = 1_D`` the inner integral ``int |f(x + t) - f(x)|^2 dx`` is the
symmetric-difference measure ``sigma(t)``, so

    N(s, eps, T) = int_{eps <= |t| <= T} |t|^(-n - 2s) sigma(t) dt.

Divergence as ``eps -> 0`` is read from the shell increments
``N(s, 2^-(k+1)) - N(s, 2^-k)``, which scale like ``2^(g(s) k)``.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import optimize, stats

from .errors import ArgumentError
from .geometry.domains import diameter
from .geometry.measures import symmetric_difference_measure

RADIAL_NODES = 4
ANGLES = 12
BUDGET = 100_000
SEED = 42
LADDER = tuple(range(4, 13))
LOG_DIVERGENCE_TOL = 0.15
# slopes above -GROWTH_RESOLUTION are indistinguishable from log growth on the ladder
GROWTH_RESOLUTION = 0.02


@lru_cache(maxsize=1 << 14)
def _sigma(d, t: tuple, seed: tuple, budget: int):
    est = symmetric_difference_measure(d, t, budget, seed=np.random.SeedSequence(seed),
                                       with_error=True)
    return est.value, est.stderr


@dataclass
class SigmaTable:
    """``sigma`` on polar nodes: radii ``r`` (with log-radius weights) times angles in ``[0, pi)``."""

    r: np.ndarray
    wlog: np.ndarray
    shell: np.ndarray
    theta: np.ndarray
    sigma: np.ndarray
    stderr: np.ndarray
    area: float
    T: float

    def angular_mean(self) -> np.ndarray:
        # sigma(-t) = sigma(t): the half-circle mean is the full mean
        return self.sigma.mean(1)

    def shell_integrals(self, s: float) -> np.ndarray:
        """Integral over each radial shell of ``|t|^(-2-2s) sigma`` in polar form."""
        vals = 2 * np.pi * self.angular_mean() * self.r ** (-2 * s) * self.wlog
        return np.bincount(self.shell, vals)

    def tail(self, s: float) -> float:
        return 2 * self.area * 2 * np.pi * self.T ** (-2 * s) / (2 * s)


def _shell_edges(eps: float, T: float) -> np.ndarray:
    k_top = int(np.floor(np.log2(T)))
    k_bot = int(np.ceil(np.log2(eps)))
    inner = 2.0 ** np.arange(k_bot, k_top + 1)
    inner = inner[(inner > eps) & (inner < T)]
    return np.concatenate([[eps], inner, [T]])


def sigma_table(d, eps: float, T: Optional[float] = None, budget: int = BUDGET,
                seed: int = SEED, radial_nodes: int = RADIAL_NODES,
                angles: int = ANGLES) -> SigmaTable:
    """Monte Carlo ``sigma`` at Gauss-Legendre nodes in ``log r`` on dyadic shells of ``[eps, T]``."""
    if T is None:
        T = diameter(d) + 1.0
    if not 0 < eps < T:
        raise ArgumentError("need 0 < eps < T")
    edges = _shell_edges(eps, T)
    x, w = np.polynomial.legendre.leggauss(radial_nodes)
    la, lb = np.log(edges[:-1]), np.log(edges[1:])
    logr = 0.5 * (la + lb)[:, None] + 0.5 * (lb - la)[:, None] * x[None]
    wlog = 0.5 * (lb - la)[:, None] * w[None]
    r = np.exp(logr).ravel()
    shell = np.repeat(np.arange(len(edges) - 1), radial_nodes)
    theta = (np.arange(angles) + 0.5) * np.pi / angles
    sig = np.empty((r.size, angles))
    err = np.empty_like(sig)
    for i, rr in enumerate(r):
        for j, th in enumerate(theta):
            t = (float(rr * np.cos(th)), float(rr * np.sin(th)))
            sig[i, j], err[i, j] = _sigma(d, t, (int(seed), i, j), int(budget))
    return SigmaTable(r, wlog.ravel(), shell, theta, sig, err, float(d.area), float(T))


def difference_integral(d, s: float, eps: float, T: Optional[float] = None,
                        budget: int = BUDGET, seed: int = SEED, tail: bool = False) -> float:
    """``int_{eps <= |t| <= T} |t|^(-2-2s) sigma(t) dt`` by polar quadrature of Monte Carlo ``sigma``.

    With ``tail=True`` the exact contribution of ``|t| > T`` (where
    ``sigma = 2|D|`` once ``T`` exceeds the diameter) is added.
    """
    if not 0 < s < 1:
        raise ArgumentError("s must lie in (0, 1)")
    tab = sigma_table(d, eps, T, budget, seed)
    val = float(tab.shell_integrals(s).sum())
    return val + tab.tail(s) if tail else val


@dataclass
class SobolevReport:
    s: np.ndarray
    eps: np.ndarray
    N: np.ndarray
    increments: np.ndarray
    growth: np.ndarray
    divergent: np.ndarray
    log_divergent: np.ndarray
    s_hat: float
    l2: float
    tail: np.ndarray
    meta: dict = field(default_factory=dict)

    def classification(self) -> dict:
        return {f"{s:.6g}": ("diverges" if dv else "converges")
                for s, dv in zip(self.s, self.divergent)}

    def summary(self) -> dict:
        return {"s_hat": self.s_hat, "classification": self.classification(),
                "growth_slope": {f"{s:.6g}": float(g) for s, g in zip(self.s, self.growth)},
                "log_divergent": {f"{s:.6g}": bool(v) for s, v in zip(self.s, self.log_divergent)},
                "l2_term": self.l2, **self.meta}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "eps", "N"])
            for i, s in enumerate(self.s):
                for j, e in enumerate(self.eps):
                    w.writerow([f"{s:.6g}", f"{e:.6g}", f"{self.N[i, j]:.10g}"])

    def to_json(self, path=None):
        doc = self.summary()
        if path is not None:
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
        return doc


def _growth(tab: SigmaTable, s: float, ks: np.ndarray) -> float:
    inc = _increments(tab, s, ks)
    return float(stats.linregress(ks[:-1], np.log2(inc)).slope)


def _increments(tab: SigmaTable, s: float, ks: np.ndarray) -> np.ndarray:
    shells = tab.shell_integrals(s)
    # shells are ordered from the smallest radius; shell m covers [2^-(k+1), 2^-k]
    kmax = ks.max()
    idx = kmax - 1 - ks[:-1]
    return shells[idx]


def sobolev_membership_sweep(d, s_grid, ladder=LADDER, budget: int = BUDGET,
                             seed: int = SEED, T: Optional[float] = None) -> SobolevReport:
    """Classify ``1_D`` in ``W_2^s`` over ``s_grid`` from the ``eps = 2^-k`` ladder.

    ``g(s)`` is the fitted log2-slope of the increments against ``k``; ``s`` is
    divergent when ``g(s) > -0.02`` (flatter than the ladder can resolve) and
    ``s_hat`` is the root of ``g``.  The flag
    ``log_divergent`` marks ladders whose last three increments agree to 15%.
    """
    s_grid = np.asarray(s_grid, float)
    if np.any((s_grid <= 0) | (s_grid >= 1)):
        raise ArgumentError("s values must lie in (0, 1)")
    ks = np.asarray(sorted(ladder), int)
    if ks.size < 4:
        raise ArgumentError("ladder needs at least 4 cutoffs")
    eps = 2.0 ** (-ks.astype(float))
    tab = sigma_table(d, float(eps.min()), T, budget, seed)
    shells_per_s = [tab.shell_integrals(s) for s in s_grid]
    # cumulative from the outside in: N(s, 2^-k) sums shells above 2^-k
    N = np.empty((s_grid.size, ks.size))
    kmax = ks.max()
    for i, sh in enumerate(shells_per_s):
        for j, k in enumerate(ks):
            N[i, j] = sh[kmax - k:].sum()
    inc = np.array([_increments(tab, s, ks) for s in s_grid])
    growth = np.array([_growth(tab, s, ks) for s in s_grid])
    last = inc[:, -3:]
    logdiv = (last.max(1) - last.min(1)) <= LOG_DIVERGENCE_TOL * last.mean(1)
    g = lambda s: _growth(tab, s, ks)
    try:
        s_hat = float(optimize.brentq(g, 1e-3, 1 - 1e-3, xtol=1e-6))
    except ValueError:
        s_hat = float("nan")
    tails = np.array([tab.tail(s) for s in s_grid])
    meta = {"budget": int(budget), "seed": int(seed), "T": tab.T, "ladder": ks.tolist()}
    return SobolevReport(s_grid, eps, N, inc, growth, growth > -GROWTH_RESOLUTION, logdiv, s_hat,
                         float(d.area), tails, meta)


def remark1_bound(a: float, n: int = 2) -> float:
    """``2n / (2n - a)`` for a boundary dimension ``a`` in ``[n - 1, n]``."""
    if not n - 1 <= a <= n:
        raise ArgumentError(f"dimension {a} outside [{n - 1}, {n}]")
    return 2.0 * n / (2.0 * n - a)


def sobolev_threshold_from_dimension(a: float, n: int = 2) -> float:
    return (n - a) / 2.0
