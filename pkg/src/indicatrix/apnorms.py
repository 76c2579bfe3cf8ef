"""Fourier-algebra norms of exponentials ``exp(i lam phi)``.

On the circle ``||f||_{A_p(T)}`` is the l^p norm of the Fourier
coefficients ``c_k = (2 pi)^-1 int f(t) exp(-i k t) dt``.  On the line
``||g||_{A_p(R)}`` is the L^p norm of ``g^(xi) = int g(t) exp(-i xi t) dt``.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, signal, special, stats

from .errors import ArgumentError, CutoffError
from .geometry.profiles import Profile
from .moduli import ChiMap

TAIL_TOL = 1e-8
MAX_GRID = 1 << 24
LINE_OVERSAMPLE = 8
LINE_RANGE = 8
VERDICT_BAND = 0.05


def _require_periodic(phi: Profile):
    if not phi.periodic:
        raise ArgumentError("profile must be periodic on [0, 2 pi]")
    if abs(phi.c) > 1e-12 or abs(phi.b - 2 * np.pi) > 1e-12:
        raise ArgumentError("periodic profiles live on [0, 2 pi]")


def _min_cutoff(phi: Profile, lam: float) -> int:
    return int(np.ceil(4 * (abs(lam) * phi.dphi_max() + 1)))


def _coefficients(phi: Profile, lam: float, K: int):
    """Centred coefficients ``c_{-K..K}`` of ``exp(i lam phi)`` and the discarded energy."""
    M = 1 << int(np.ceil(np.log2(8 * K)))
    if M > MAX_GRID:
        raise CutoffError(f"cutoff {K} needs a grid beyond {MAX_GRID}")
    t = 2 * np.pi * np.arange(M) / M
    c = np.fft.fft(np.exp(1j * lam * phi(t))) / M
    kept = np.concatenate([c[-K:], c[:K + 1]])
    total = float(np.sum(np.abs(c) ** 2))
    tail = max(total - float(np.sum(np.abs(kept) ** 2)), 0.0)
    return kept, tail


def circle_coefficients(phi: Profile, lam: float, K: Optional[int] = None):
    """Coefficients ``c_k``, ``|k| <= K``, with automatic doubling of ``K`` when not given.

    Returns ``(k, c, K, tail)``.  An explicit ``K`` below ``4 (|lam| max|phi'| + 1)``
    is rejected; a tail energy above 1e-8 raises :class:`CutoffError`.
    """
    _require_periodic(phi)
    kmin = _min_cutoff(phi, lam)
    if K is not None:
        K = int(K)
        if K < kmin:
            raise ArgumentError(f"cutoff K={K} below 4(|lam| max|phi'| + 1) = {kmin}")
        c, tail = _coefficients(phi, lam, K)
        if tail > TAIL_TOL:
            raise CutoffError(f"tail energy {tail:.3e} exceeds {TAIL_TOL:g} at K={K}", estimate=tail)
    else:
        K = kmin
        while True:
            c, tail = _coefficients(phi, lam, K)
            if tail <= TAIL_TOL:
                break
            K *= 2
    return np.arange(-K, K + 1), c, K, tail


def circle_ap_norm(phi: Profile, lam: float, p: float, K: Optional[int] = None,
                   return_tail: bool = False):
    """``(sum_{|k| <= K} |c_k|^p)^(1/p)`` for ``exp(i lam phi)`` on the circle."""
    if not 1 <= p <= 2:
        raise ArgumentError("p must lie in [1, 2]")
    _, c, K, tail = circle_coefficients(phi, lam, K)
    val = float(np.sum(np.abs(c) ** p) ** (1.0 / p))
    return (val, tail) if return_tail else val


def jacobi_anger_norm(lam: float, p: float, K: int) -> float:
    """Norm of ``exp(i lam cos t)`` from its coefficients ``i^k J_k(lam)``."""
    k = np.arange(-K, K + 1)
    return float(np.sum(np.abs(special.jv(k, lam)) ** p) ** (1.0 / p))


# growth fits ------------------------------------------------------------------

@dataclass
class NormCurve:
    lam: np.ndarray
    norms: np.ndarray
    p: float
    slope: float
    ci: tuple
    intercept: float
    fit_mask: np.ndarray
    bound_exponent: Optional[float] = None
    theta_exponent: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {"p": self.p, "slope": self.slope, "ci": list(self.ci),
                "fit_points": int(self.fit_mask.sum()),
                "lower_bound_exponent": self.bound_exponent,
                "theta_exponent": self.theta_exponent, **self.meta}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "norm", "p"])
            for l, n in zip(self.lam, self.norms):
                w.writerow([f"{l:.10g}", f"{n:.12g}", f"{self.p:.6g}"])

    def to_json(self, path=None):
        doc = self.summary()
        if path is not None:
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
        return doc


def _loglog_fit(x, y):
    res = stats.linregress(np.log(x), np.log(y))
    q = stats.t.ppf(0.975, len(x) - 2)
    return float(res.slope), (float(res.slope - q * res.stderr), float(res.slope + q * res.stderr)), float(res.intercept)


def fit_window(lam: np.ndarray) -> np.ndarray:
    """Ladder points above the smallest decade."""
    return lam >= 10 * lam.min() * (1 - 1e-12)


def growth_fit(phi: Profile, p: float, lam_ladder) -> NormCurve:
    """Fit ``log ||exp(i lam phi)||_{A_p}`` against ``log lam``, skipping the smallest decade.

    When the profile declares a modulus, the lower-bound exponent
    ``1/p + d log chi^-1(1/lam) / d log lam`` and the growth exponent of
    ``Theta_p`` are measured on the same window for comparison.
    """
    lam = np.sort(np.asarray(lam_ladder, float))
    if lam.min() <= 0:
        raise ArgumentError("ladder must be positive")
    if np.log10(lam.max() / lam.min()) < 2.5 - 1e-9:
        raise ArgumentError("ladder must span at least 2.5 decades")
    mask = fit_window(lam)
    if mask.sum() < 8:
        raise ArgumentError("slope fit needs at least 8 ladder points above the smallest decade")
    norms = np.array([circle_ap_norm(phi, l, p) for l in lam])
    slope, ci, icpt = _loglog_fit(lam[mask], norms[mask])
    bexp = texp = None
    if phi.modulus is not None and lam[mask].min() >= 1:
        from .moduli import theta_p_curve

        chi = ChiMap(phi.modulus)
        lw = lam[mask]
        bexp = 1.0 / p + _loglog_fit(lw, chi.inverse(1.0 / lw))[0]
        tau, th = theta_p_curve(chi, p, float(lw.max()))
        sel = tau >= lw.min()
        texp = _loglog_fit(tau[sel], th[sel])[0]
    return NormCurve(lam, norms, float(p), slope, ci, icpt, mask, bexp, texp)


# line side --------------------------------------------------------------------

def _sin_power_mean(p: float) -> float:
    return float(special.gamma((p + 1) / 2) / (np.sqrt(np.pi) * special.gamma(p / 2 + 1)))


def line_transform(phi: Profile, lam: float, K: Optional[int] = None,
                   oversample: int = LINE_OVERSAMPLE, span: int = LINE_RANGE):
    """Samples of ``g^`` for ``g = (exp(i lam phi) - 1) 1_[0, 2 pi]`` on ``|xi| <= span * K``.

    With ``g = sum_k c_k e^{ikt}`` on ``[0, 2 pi]``,
    ``g^(xi) = (exp(-2 pi i xi) - 1)/i * sum_k c_k / (k - xi)`` and
    ``g^(k) = 2 pi c_k`` at integers.  The sum is a discrete convolution
    on the grid ``xi = m / oversample``.  Returns ``(xi, values, K, c0)`` with
    ``c0 = g(0)`` the size of the jumps at the endpoints.
    """
    k, c, K, _ = circle_coefficients(phi, lam, K)
    c = c.astype(complex)
    c[K] -= 1.0  # subtract the constant 1
    P = int(oversample)
    X = span * K
    m = np.arange(-X * P, X * P + 1)
    xi = m / P
    up = np.zeros((2 * K) * P + 1, complex)
    up[::P] = c  # c_k sits at m = P k, offset by -K P
    n = np.arange(-(X + K) * P, (X + K) * P + 1)
    kern = np.zeros(n.size)
    nz = n != 0
    kern[nz] = P / n[nz]
    # s(m) = sum_k c_k P / (P k - m); up index a = P k + K P, kernel index i = n + (X + K) P
    conv = signal.fftconvolve(up, kern)
    s = -conv[m + K * P + (X + K) * P]
    vals = (np.exp(-2j * np.pi * xi) - 1) / 1j * s
    on = (m % P) == 0
    kk = m[on] // P
    inside = np.abs(kk) <= K
    exact = np.zeros(on.sum(), complex)
    exact[inside] = 2 * np.pi * c[kk[inside] + K]
    vals[on] = exact
    c0 = complex(np.exp(1j * lam * phi(np.array([0.0])))[0] - 1.0)
    return xi, vals, K, c0


def line_restriction_norm(phi: Profile, lam: float, p: float, K: Optional[int] = None) -> float:
    """``||g^||_{L^p(R)}`` for ``g = (exp(i lam phi) - 1) 1_[0, 2 pi]``.

    Riemann sum on the sampled window plus the closed form of the
    ``|c0| |2 sin(pi xi) / xi|`` tail beyond it.
    """
    if not 1 < p <= 2:
        raise ArgumentError("p must lie in (1, 2]")
    if lam == 0:
        return 0.0
    xi, vals, K, c0 = line_transform(phi, lam, K)
    dxi = xi[1] - xi[0]
    body = float(np.sum(np.abs(vals) ** p) * dxi)
    X = xi.max()
    tail = 2 * abs(c0) ** p * 2 ** p * _sin_power_mean(p) * X ** (1 - p) / (p - 1)
    return float((body + tail) ** (1.0 / p))


# Lemma-1 integrand ------------------------------------------------------------

@dataclass
class IntegrandScan:
    lam: np.ndarray
    integrand: np.ndarray
    truncated_integral: float
    exponent: float
    ci: tuple
    verdict: str
    p: float

    def summary(self) -> dict:
        return {"p": self.p, "exponent": self.exponent, "ci": list(self.ci),
                "truncated_integral": self.truncated_integral, "verdict": self.verdict}


def lemma1_integrand_scan(phi: Profile, p: float, lam_ladder, norm: str = "line") -> IntegrandScan:
    """Ladder of ``lam^-p ||exp(i lam phi) - 1||^p`` with a tail-exponent verdict.

    The exponent ``kappa`` is fitted above the smallest decade; the
    integral over ``lam`` converges iff ``kappa < -1``, so the verdict is
    ``converges`` for ``kappa < -1.05``, ``diverges`` for ``kappa > -0.95``
    and ``marginal`` between.
    """
    lam = np.asarray(lam_ladder, float)
    if np.any(lam == 0):
        raise ArgumentError("ladder must avoid lam = 0")
    lam = lam[np.argsort(np.abs(lam), kind="stable")]
    if norm == "line":
        vals = np.array([line_restriction_norm(phi, l, p) for l in lam])
    elif norm == "circle":
        vals = np.array([_circle_minus_one(phi, l, p) for l in lam])
    else:
        raise ArgumentError(f"unknown norm {norm!r}")
    a = np.abs(lam)
    integrand = a ** (-p) * vals ** p
    pos = lam > 0
    trunc = float(integrate.trapezoid(integrand[pos], lam[pos])) if pos.sum() > 1 else 0.0
    mask = fit_window(a)
    if mask.sum() < 3:
        raise ArgumentError("need at least 3 ladder points above the smallest decade")
    kappa, ci, _ = _loglog_fit(a[mask], integrand[mask])
    if kappa < -1 - VERDICT_BAND:
        verdict = "converges"
    elif kappa > -1 + VERDICT_BAND:
        verdict = "diverges"
    else:
        verdict = "marginal"
    return IntegrandScan(lam, integrand, trunc, kappa, ci, verdict, float(p))


def _circle_minus_one(phi: Profile, lam: float, p: float) -> float:
    _, c, K, _ = circle_coefficients(phi, lam)
    c = c.copy()
    c[K] -= 1.0
    return float(np.sum(np.abs(c) ** p) ** (1.0 / p))


def circle_minus_one_norm(phi: Profile, lam: float, p: float) -> float:
    """Circle norm of ``exp(i lam phi) - 1``."""
    return 0.0 if lam == 0 else _circle_minus_one(phi, lam, p)
