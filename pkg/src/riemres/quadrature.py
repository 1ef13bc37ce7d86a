"""Level curves of cut-offs, contour integrals and annular area integrals.

All rules are deterministic: trapezoid in the angle (spectrally accurate for
smooth periodic integrands) and Gauss-Legendre in the radius, with panels
graded geometrically toward the excluded inner boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LevelSetNotBracketed, QuadratureBudgetExceeded
from .series import jet_dz

__all__ = [
    "LevelCurve",
    "levelset_radius",
    "level_curve",
    "circle_integrate",
    "annulus_integrate",
]

GL_ORDER = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W

CURVE_RTOL = 1e-13


def _eta_bound(eta, rho):
    """Upper bound for ``|eta(z) - eta(0)|`` on ``|z| <= rho``."""
    n = np.arange(eta.order + 1)
    p = rho ** np.add.outer(n, n)
    c = np.abs(eta.coeffs).copy()
    c[0, 0] = 0.0
    return float(np.sum(c * p))


def _radii(lam, theta, eps, rho=1.0, bisect=30, newton=4):
    """Vectorized solve of ``log r + eta(r e^{i theta}) = log eps``."""
    theta = np.asarray(theta, dtype=float)
    eta = lam.eta
    deta = jet_dz(eta)
    e0 = float(eta[0, 0].real)
    M = _eta_bound(eta, rho)
    lo = np.full(theta.shape, np.log(eps) - e0 - M)
    hi = np.full(theta.shape, np.log(eps) - e0 + M)
    if not eps > 0 or hi.max() >= np.log(rho):
        raise LevelSetNotBracketed(
            f"level set lambda={eps:g} not bracketed inside |z| < {rho:g}")
    if M == 0:
        # constant eta: closed form, exact for the radial cut-off
        return np.full(theta.shape, eps * np.exp(-e0))
    u = np.exp(1j * theta)
    logeps = np.log(eps)

    def G(s):
        return s + eta(np.exp(s) * u).real - logeps

    glo, ghi = G(lo), G(hi)
    if np.any(glo > 0) or np.any(ghi < 0):
        raise LevelSetNotBracketed("cut-off level set not bracketed by the eta bound")
    for _ in range(bisect):
        mid = 0.5 * (lo + hi)
        neg = G(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    s = 0.5 * (lo + hi)
    for _ in range(newton):
        r = np.exp(s)
        # dG/ds = 1 + r * d eta / dr, d eta / dr = 2 Re(e^{i theta} d eta / dz)
        dG = 1.0 + r * 2.0 * (u * deta(r * u)).real
        s = s - G(s) / dG
    return np.exp(s)


def levelset_radius(lam, theta, eps, rho=1.0):
    """Radius ``r`` with ``lambda(r e^{i theta}) = eps`` (bisection, then Newton)."""
    return float(_radii(lam, np.array([theta]), eps, rho)[0])


@dataclass(frozen=True)
class LevelCurve:
    """Samples ``r_j`` of the curve ``lambda = eps`` at ``theta_j = 2 pi j / K``.

    ``dr`` holds ``dr/dtheta`` from implicit differentiation.
    """

    eps: float
    theta: np.ndarray
    r: np.ndarray
    dr: np.ndarray

    @property
    def K(self):
        return self.theta.size

    @property
    def z(self):
        return self.r * np.exp(1j * self.theta)

    @property
    def dz(self):
        """``dz/dtheta`` along the curve."""
        return (self.dr + 1j * self.r) * np.exp(1j * self.theta)

    def residual(self, lam):
        return float(np.max(np.abs(lam(self.z) - self.eps)) / self.eps)

    def to_csv(self, path):
        np.savetxt(path, np.column_stack([self.theta, self.r]), delimiter=",",
                   header="theta,r", comments="", fmt="%.17g")


def level_curve(lam, eps, K=64, rho=1.0):
    if K < 64 or K & (K - 1):
        raise ValueError("level curves need K >= 64, a power of two")
    theta = 2 * np.pi * np.arange(K) / K
    r = _radii(lam, theta, eps, rho)
    z = r * np.exp(1j * theta)
    dz_eta = jet_dz(lam.eta)(z)
    g_r = 1.0 / r + 2.0 * (np.exp(1j * theta) * dz_eta).real
    g_t = 2.0 * (1j * z * dz_eta).real
    curve = LevelCurve(float(eps), theta, r, -g_t / g_r)
    res = curve.residual(lam)
    if res > CURVE_RTOL:
        raise LevelSetNotBracketed(f"level curve residual {res:.2e} above {CURVE_RTOL:g}")
    return curve


def _trapezoid(f, r, K, mode):
    theta = 2 * np.pi * np.arange(K) / K
    z = r * np.exp(1j * theta)
    v = np.asarray(f(z), dtype=complex)
    if mode == "dz":
        v = v * 1j * z
    elif mode != "dtheta":
        raise ValueError("mode must be 'dtheta' or 'dz'")
    return 2 * np.pi * np.sum(v) / K


def circle_integrate(f, r, K=64, mode="dtheta", tol=1e-12, K_max=2 ** 16):
    """Trapezoid rule for ``int f dtheta`` or ``int f dz`` over ``|z| = r``.

    ``K`` doubles until two successive values agree to ``tol`` (relative to
    ``max(1, |value|)``).
    """
    if K < 1 or K & (K - 1):
        raise ValueError("K must be a power of two")
    prev = _trapezoid(f, r, K, mode)
    while K < K_max:
        K *= 2
        cur = _trapezoid(f, r, K, mode)
        if abs(cur - prev) < tol * max(1.0, abs(cur)):
            return complex(cur)
        prev = cur
    raise QuadratureBudgetExceeded(f"circle quadrature unresolved at K={K}")


def _radial_nodes(a, b, panels, graded):
    """Gauss nodes/weights on ``[a_j, b]`` per ray (``a`` is an array).

    ``graded`` panels are uniform in ``log r``; weights include the Jacobian
    and the polar factor ``r``.
    """
    a = np.asarray(a, dtype=float)[:, None]
    t = ((np.arange(panels)[:, None] + _GL_X[None, :]) / panels).ravel()[None, :]
    w = np.tile(_GL_W, panels)[None, :] / panels
    if graded:
        la, lb = np.log(a), np.log(b)
        r = np.exp(la + (lb - la) * t)
        wr = w * (lb - la) * r * r
    else:
        r = a + (b - a) * t
        wr = w * (b - a) * r
    return r, wr


def _annulus_once(f, curve, outer, breaks, panels):
    edges = [b for b in breaks if b < outer] + [outer]
    if curve.r.max() >= edges[0]:
        raise LevelSetNotBracketed("level curve crosses the first radial break")
    u = np.exp(1j * curve.theta)[:, None]
    total = np.zeros(curve.K, dtype=complex)
    start = curve.r
    for i, b in enumerate(edges):
        r, wr = _radial_nodes(start, b, panels, graded=(i == 0))
        total += np.sum(np.asarray(f(r * u), dtype=complex) * wr, axis=1)
        start = np.full(curve.K, b)
    return 2 * np.pi * np.sum(total) / curve.K


def annulus_integrate(f, inner, outer_rho, panels=4, breaks=(), tol=1e-9, max_panels=256):
    """Area integral of ``f`` over ``{r_inner(theta) <= |z| <= outer_rho}``.

    Radial segments run from the level curve to the first break (graded
    panels), then between breaks and up to ``outer_rho`` (uniform panels).
    Panel counts double until two passes agree to ``tol`` absolutely.
    """
    prev = _annulus_once(f, inner, outer_rho, breaks, panels)
    while panels < max_panels:
        panels *= 2
        cur = _annulus_once(f, inner, outer_rho, breaks, panels)
        if abs(cur - prev) < tol:
            return complex(cur)
        prev = cur
    raise QuadratureBudgetExceeded(f"radial quadrature unresolved at {panels} panels")
