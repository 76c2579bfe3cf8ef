"""Bessel J1: power series near the origin, Hankel asymptotics beyond."""
from __future__ import annotations

import numpy as np

SEAM = 12.0
_SERIES_TERMS = 40


def _series(x: np.ndarray) -> np.ndarray:
    # J1(x) = sum_k (-1)^k (x/2)^(2k+1) / (k! (k+1)!)
    h = x / 2.0
    q = -h * h
    term = h.copy()
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * (k + 1))
        total += term
    return total


def _hankel_coefficients(nu: float = 1.0, count: int = 30) -> np.ndarray:
    mu = 4.0 * nu * nu
    a = [1.0]
    for k in range(1, count):
        a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return np.array(a)


_A = _hankel_coefficients()


def _asymptotic(x: np.ndarray) -> np.ndarray:
    P = np.zeros_like(x)
    Q = np.zeros_like(x)
    inv = 1.0 / x
    prev = np.full_like(x, np.inf)
    live = np.ones(x.shape, bool)
    for k, a in enumerate(_A):
        term = a * inv ** k
        # stop each point at its smallest term (optimal truncation)
        live &= np.abs(term) < prev
        prev = np.abs(term)
        sgn = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            P += np.where(live, sgn * term, 0.0)
        else:
            Q += np.where(live, sgn * term, 0.0)
    chi = x - 0.75 * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (P * np.cos(chi) - Q * np.sin(chi))


def j1(x) -> np.ndarray:
    """Bessel function of the first kind, order one (odd in ``x``)."""
    x = np.asarray(x, float)
    ax = np.abs(x)
    out = np.empty_like(ax)
    near = ax <= SEAM
    out[near] = _series(ax[near])
    out[~near] = _asymptotic(ax[~near])
    return np.sign(x) * out


def seam_gap() -> float:
    """Largest disagreement of the two branches just around the switchover."""
    x = np.linspace(SEAM - 0.5, SEAM + 0.5, 101)
    return float(np.max(np.abs(_series(x) - _asymptotic(x))))


def jinc_area(r: float, rho) -> np.ndarray:
    """``2 pi r J1(r rho) / rho`` with its limit ``pi r^2`` at ``rho = 0``."""
    rho = np.asarray(rho, float)
    out = np.full(rho.shape, np.pi * r * r)
    nz = rho != 0
    out[nz] = 2.0 * np.pi * r * j1(r * rho[nz]) / rho[nz]
    return out
