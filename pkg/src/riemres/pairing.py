"""Regularized pairings of a (1,0)-form with poles against ``b(z) dz / z``.

    <alpha, beta>_{lambda, eps} = (1 / 2 pi i) * integral over {lambda >= eps} of alpha ^ conj(beta)

evaluated in polar coordinates around the origin.  Fitting the pairing
against ``log eps`` on a geometric grid gives the divergent coefficient ``I0``
and the cut-off dependent finite part ``I1``.  ``I1`` only has meaning through
differences between cut-offs.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import FitIllConditioned, QuadratureBudgetExceeded
from .quadrature import annulus_integrate, level_curve
from .residue import Form1D, res_dolbeault, res_log_pairing
from .riemann import solve
from .series import series_derivative

log = logging.getLogger(__name__)

__all__ = [
    "PairingFit",
    "DEFAULT_GRID",
    "regularized_pairing",
    "divergence_fit",
    "variation",
    "boundary_pairing",
    "boundary_limit",
    "boundary_prediction",
    "stokes_consistency",
]

DEFAULT_GRID = tuple(0.02 * 2.0 ** -k for k in range(6))
K_START = 64
K_MAX = 4096
QUAD_TOL = 1e-11


def _integrand(alpha, beta):
    # alpha ^ conj(beta) = -2i alpha(z) conj(beta(z)) dx ^ dy, times 1 / (2 pi i)
    def f(z):
        return -alpha(z) * np.conj(beta(z)) / np.pi
    return f


def regularized_pairing(alpha, beta, lam, eps, tol=QUAD_TOL):
    """``<alpha, beta>`` over ``lambda >= eps`` (n = 1, sign ``+1``).

    The radial integrals run from the level curve to ``rho/2`` on graded panels
    and over the window transition ``[rho/2, rho]`` on uniform ones; the number
    of rays doubles until the value settles to ``tol``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    f = _integrand(alpha, beta)
    rho = alpha.rho
    K = K_START
    prev = None
    while K <= K_MAX:
        curve = level_curve(lam, eps, K, rho)
        cur = annulus_integrate(f, curve, rho, breaks=(rho / 2,), tol=tol)
        if prev is not None and abs(cur - prev) < tol * max(1.0, abs(cur)):
            return cur
        prev = cur
        K *= 2
    raise QuadratureBudgetExceeded(f"angular quadrature unresolved at K={K_MAX}")


def _check_grid(grid):
    g = np.asarray(grid, dtype=float)
    if g.size < 3:
        raise FitIllConditioned(f"need at least 3 grid points, got {g.size}")
    if np.any(g <= 0):
        raise ValueError("eps grid must be positive")
    ratio = g[1:] / g[:-1]
    if np.any(ratio < 0.25 - 1e-12) or np.any(ratio > 1 / 1.5 + 1e-12):
        raise ValueError("eps grid must decrease with ratios in [1/4, 1/1.5]")
    return g


@dataclass
class PairingFit:
    I0: complex
    I1: complex
    eps_grid: np.ndarray
    values: np.ndarray
    fit_residual: float
    remainder_slope: float | None
    remainder: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    I0_predicted: complex | None = None

    def to_json(self):
        def pair(v):
            return [float(v.real), float(v.imag)]
        out = {
            "I0": pair(self.I0),
            "I1": pair(self.I1),
            "grid": [float(e) for e in self.eps_grid],
            "values": [pair(v) for v in self.values],
            "fit_residual": float(self.fit_residual),
            "remainder_slope": (None if self.remainder_slope is None
                                else float(self.remainder_slope)),
            "remainder": [pair(v) for v in self.remainder],
        }
        if self.I0_predicted is not None:
            out["I0_predicted"] = pair(self.I0_predicted)
        return out

    def csv_text(self):
        """Plot series: one row per eps with columns eps, log_eps, re_value, im_value."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eps", "log_eps", "re_value", "im_value"])
        for e, v in zip(self.eps_grid, self.values):
            w.writerow([repr(float(e)), repr(float(np.log(e))),
                        repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())


def _remainder_slope(grid, values):
    """Observed order ``p`` of the remainder ``~ eps**p`` (None if not resolved).

    Second differences of the values cancel both ``I0 log eps`` (on a geometric
    grid) and ``I1``; consecutive ratios then decay like ``q**p``.
    """
    if grid.size < 4:
        return None
    ratio = grid[1:] / grid[:-1]
    if np.ptp(ratio) > 1e-9 * ratio.mean():
        return None
    d2 = np.abs(np.diff(values, 2))
    if np.all(d2 < 1e-10 * max(1.0, np.abs(values).max())):
        return None
    ok = (d2[:-1] > 0) & (d2[1:] > 0)
    if not ok.any():
        return None
    slopes = np.log(d2[:-1][ok] / d2[1:][ok]) / np.log(1.0 / ratio[0])
    return float(np.median(slopes))


def divergence_fit(alpha, beta, lam, grid=DEFAULT_GRID, remainder=2):
    """Least-squares fit ``value = I0 log eps + I1 + sum_k I2_k eps**k``.

    ``remainder`` is the number of ``eps**k`` correction terms (0 gives the
    plain affine fit).
    """
    g = _check_grid(grid)
    if g.size < 2 + remainder:
        raise FitIllConditioned(f"{g.size} grid points cannot fit {2 + remainder} terms")
    values = np.array([regularized_pairing(alpha, beta, lam, e) for e in g])
    cols = [np.log(g), np.ones_like(g)] + [g ** k for k in range(1, remainder + 1)]
    V = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(V, values, rcond=None)
    fit_residual = float(np.abs(V @ coef - values).max())
    I0 = complex(coef[0])
    predicted = 2 * res_dolbeault(alpha) * np.conj(beta.residue)
    if abs(I0 - predicted) > 1e-5 * max(1.0, abs(predicted)):
        log.warning("fitted I0 %s differs from 2 Res(alpha) conj(Res beta) = %s",
                    I0, predicted)
    return PairingFit(
        I0=I0,
        I1=complex(coef[1]),
        eps_grid=g,
        values=values,
        fit_residual=fit_residual,
        remainder_slope=_remainder_slope(g, values),
        remainder=np.asarray(coef[2:], dtype=complex),
        I0_predicted=complex(predicted),
    )


def variation(alpha, beta, lam, phi, grid=DEFAULT_GRID, remainder=2):
    """Measured and predicted change of ``I1`` under ``lambda -> exp(phi) lambda``.

    Prediction: ``-2 Res(phi alpha) conj(Res beta)``.
    """
    base = divergence_fit(alpha, beta, lam, grid, remainder)
    moved = divergence_fit(alpha, beta, lam.times_exp(phi), grid, remainder)
    phi_alpha = Form1D(alpha.m, alpha.numer.mul_jet(phi))
    predicted = -2 * res_dolbeault(phi_alpha) * np.conj(beta.residue)
    return {
        "measured": moved.I1 - base.I1,
        "predicted": complex(predicted),
        "I0_base": base.I0,
        "I0_moved": moved.I0,
        "fits": (base, moved),
    }


def _curve_levelset(lam, eps, K, rho):
    c = level_curve(lam, eps, K, rho)
    return c.z, c.dz


def _curve_riemann(lam, eps, K, order):
    mu = lam.weight(order)
    f = solve(mu, eps, order=order).series()
    df = series_derivative(f)
    u = np.exp(2j * np.pi * np.arange(K) / K)
    w = eps * u
    return f(w), df(w) * 1j * w


def boundary_pairing(gamma, beta, lam, eps, method="levelset", rho=None, order=16,
                     tol=1e-13):
    """``(-1 / 2 pi i)`` times the integral of ``gamma conj(beta)`` over ``lambda = eps``.

    The curve is traversed counterclockwise.  ``method="levelset"`` parametrizes
    it by polar root finding; ``method="riemann"`` by the inverse Riemann map of
    ``lambda**2 < eps**2`` (weight truncated at ``order``).
    """
    if rho is None:
        rho = gamma.terms[0][0].rho if gamma.terms else 1.0
    K = K_START
    prev = None
    while K <= K_MAX:
        if method == "levelset":
            z, dz = _curve_levelset(lam, eps, K, rho)
        elif method == "riemann":
            z, dz = _curve_riemann(lam, eps, K, order)
        else:
            raise ValueError(f"unknown method {method!r}")
        # conj(beta) = conj(b(z)) dzbar / zbar
        vals = gamma(z) * np.conj(beta.b(z)) * np.conj(dz) / np.conj(z)
        cur = -np.sum(vals) * (2 * np.pi / K) / (2j * np.pi)
        # rounding in the sum scales with the integrand, not with the result
        scale = max(1.0, abs(cur), float(np.mean(np.abs(vals))))
        if prev is not None and abs(cur - prev) < tol * scale:
            return complex(cur)
        prev = cur
        K *= 2
    raise QuadratureBudgetExceeded(f"boundary quadrature unresolved at K={K_MAX}")


def boundary_limit(gamma, beta, lam, eps_grid, degree=2, method="levelset"):
    """``eps -> 0`` limit of ``boundary_pairing`` by a polynomial fit in ``eps``.

    Returns ``(limit, values)``.
    """
    g = np.asarray(eps_grid, dtype=float)
    if g.size < degree + 2:
        raise FitIllConditioned("not enough grid points for the extrapolation degree")
    vals = np.array([boundary_pairing(gamma, beta, lam, e, method) for e in g])
    V = np.vander(g, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(V, vals, rcond=None)
    return complex(coef[0]), vals


def boundary_prediction(gamma, beta, lam):
    """``2 Res((d log lambda) gamma) conj(Res beta)``, the ``eps -> 0`` limit."""
    return 2 * res_log_pairing(gamma, lam) * np.conj(beta.residue)


def stokes_consistency(gamma, beta, lam, eps):
    """Interior pairing of ``d(gamma)`` and the boundary integral at the same ``eps``."""
    interior = regularized_pairing(gamma.d(), beta, lam, eps)
    boundary = boundary_pairing(gamma, beta, lam, eps)
    return {"interior": complex(interior), "boundary": complex(boundary)}
