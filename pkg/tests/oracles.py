"""Independent reference values used by the tests.

None of these call into the package's quadrature or transform code; they
rely on scipy and plain Gauss-Legendre tensor rules.
"""
import numpy as np
from scipy import integrate, special


def disk_transform(r, rho):
    rho = np.asarray(rho, float)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 2 * np.pi * r * special.j1(r * rho) / rho
    return np.where(rho == 0, np.pi * r * r, out)


def rectangle_transform(widths, xi):
    xi = np.atleast_2d(np.asarray(xi, float))
    out = np.ones(len(xi), complex)
    for a, w in zip(widths, xi.T):
        with np.errstate(invalid="ignore", divide="ignore"):
            f = (1 - np.exp(-1j * w * a)) / (1j * w)
        out *= np.where(w == 0, a, f)
    return out


def triangle_rule(order=40):
    """Collapsed-square Gauss-Legendre rule on the reference triangle."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1)
    w = 0.5 * w
    s, t = np.meshgrid(x, x, indexing="ij")
    ws = np.outer(w, w)
    a = s
    b = t * (1 - s)
    return np.stack([a.ravel(), b.ravel()], 1), (ws * (1 - s)).ravel()


def polygon_transform(vertices, xi, order=40):
    """Fan triangulation of a convex polygon, tensor Gauss-Legendre on each triangle."""
    v = np.asarray(vertices, float)
    xi = np.atleast_2d(np.asarray(xi, float))
    ref, wref = triangle_rule(order)
    out = np.zeros(len(xi), complex)
    for k in range(1, len(v) - 1):
        p0, p1, p2 = v[0], v[k], v[k + 1]
        J = np.column_stack([p1 - p0, p2 - p0])
        pts = p0 + ref @ J.T
        out += abs(np.linalg.det(J)) * (np.exp(-1j * xi @ pts.T) @ wref)
    return out


def special_transform(phi, c, b, u, lam, inner_nodes=60, breaks=None):
    """int_c^b int_0^phi(t) exp(-i(u t + lam y)) dy dt.

    The inner integral uses a Gauss-Legendre rule in y, the outer one scipy's
    adaptive quadrature.
    """
    x, w = np.polynomial.legendre.leggauss(inner_nodes)

    def inner(t):
        h = phi(t)
        y = 0.5 * h * (x + 1)
        return 0.5 * h * np.sum(w * np.exp(-1j * lam * y)) * np.exp(-1j * u * t)

    kw = dict(limit=5000, epsabs=1e-13, epsrel=1e-13)
    if breaks is not None:
        kw["points"] = breaks
    re = integrate.quad(lambda t: inner(t).real, c, b, **kw)[0]
    im = integrate.quad(lambda t: inner(t).imag, c, b, **kw)[0]
    return re + 1j * im


def jacobi_anger_coefficients(lam, K):
    k = np.arange(-K, K + 1)
    return k, (1j) ** k * special.jv(k, lam)
