"""Asymptotic Riemann maps of the level-set domains ``mu(z) < eps**2``.

The weight is ``mu(z) = sum c[r, s] z**(r+1) conj(z)**(s+1)`` with ``c[0, 0] > 0``.
Internally everything runs on the rescaled weight ``mu / c[0, 0]`` (so the
leading coefficient is one) at ``eps / sqrt(c[0, 0])``; public results are
converted back to the original scale.

The unknown is the coefficient sequence ``a`` of the inverse map
``f(w) = w * (a_0 + a_1 w + ...)`` from ``|w| < eps`` onto the domain.  It is
the fixed point of a map ``F(eps; .)`` obtained by matching Fourier
coefficients of the boundary condition ``mu(f(eps u)) = eps**2`` on ``|u| = 1``;
for small ``eps`` that map contracts a ball around ``(1, 0, 0, ...)`` in the
weighted norm ``sum |a_n| R**n``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidEps, NoContractionRadius, NotConverged
from .series import Jet2, Series1, jet_exp, series_revert

log = logging.getLogger(__name__)

__all__ = [
    "AnalyticWeight",
    "CoeffSeq",
    "ContractionCert",
    "SolveOptions",
    "fixed_point_map",
    "radius_certificate",
    "best_certificate",
    "solve",
    "limit_map",
    "riemann_map",
    "boundary_residual",
    "richardson_limit",
]

R_GRID_MAX = 1.0
DELTA_GRID = tuple(np.round(np.arange(0.05, 0.951, 0.05), 2))


class AnalyticWeight:
    """Real-analytic weight ``mu(z) = sum c[r, s] z**(r+1) conj(z)**(s+1)``.

    ``coeffs`` holds the normalized table (``coeffs[0, 0] == 1``) and
    ``scale`` the original ``c[0, 0]``.
    """

    __slots__ = ("coeffs", "scale")

    def __init__(self, c):
        c = np.array(c, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("weight coefficients must form a square table")
        c00 = c[0, 0]
        if abs(c00.imag) > 1e-14 * abs(c00) or c00.real <= 0:
            raise ValueError("weight needs a real positive c[0, 0]")
        tol = 1e-12 * max(1.0, np.abs(c).max())
        if np.abs(c - c.T.conj()).max() > tol:
            raise ValueError("weight is not real-valued: c[s, r] != conj(c[r, s])")
        c = 0.5 * (c + c.T.conj())
        self.scale = float(c00.real)
        n = c / self.scale
        n[0, 0] = 1.0
        n.setflags(write=False)
        self.coeffs = n

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    @property
    def original(self):
        return self.coeffs * self.scale

    def __repr__(self):
        return f"AnalyticWeight(order={self.order}, scale={self.scale:g})"

    def __call__(self, z):
        """Evaluate ``mu`` (original scale) at ``z``."""
        z = np.asarray(z, dtype=complex)
        k = Jet2(self.original)(z)
        return (np.abs(z) ** 2 * k).real

    # -- constructors for the standard families ---------------------------
    @classmethod
    def from_terms(cls, terms, order=None):
        return cls(Jet2.from_terms(terms, order=order).coeffs)

    @classmethod
    def from_holomorphic(cls, h):
        """``mu = |h|**2`` for ``h(z) = z * (h_0 + h_1 z + ...)``, ``h_0 > 0``."""
        h = np.asarray(h.coeffs if isinstance(h, Series1) else h, dtype=complex)
        return cls(np.outer(h, h.conj()))

    @classmethod
    def radial(cls, psi):
        """``mu = psi(|z|**2)`` with ``psi(t) = psi[0] t + psi[1] t**2 + ...``."""
        psi = np.asarray(psi, dtype=float)
        return cls(np.diag(psi).astype(complex))

    @classmethod
    def from_log_factor(cls, eta, order):
        """``mu = |z|**2 exp(2 eta)`` for a real jet ``eta``, truncated at ``order``."""
        return cls(jet_exp(eta * 2.0, order).coeffs)

    def to_json(self):
        c = self.original
        terms = [[int(r), int(s), float(c[r, s].real), float(c[r, s].imag)]
                 for r, s in zip(*np.nonzero(c))]
        return {"c": terms, "order": self.order}

    @classmethod
    def from_json(cls, obj):
        order = int(obj["order"])
        if order < 0:
            raise ValueError("weight order must be non-negative")
        c = np.zeros((order + 1, order + 1), dtype=complex)
        for r, s, re, im in obj["c"]:
            r, s = int(r), int(s)
            if not (0 <= r <= order and 0 <= s <= order):
                raise ValueError(f"weight index ({r}, {s}) outside 0..{order}")
            c[r, s] += complex(re, im)
        return cls(c)


@dataclass(frozen=True)
class CoeffSeq:
    """Truncated sequence ``(a_0, ..., a_N)`` with weighted norm radius ``R``."""

    a: np.ndarray
    R: float
    iters: int = field(default=0, compare=False)

    def __post_init__(self):
        a = np.array(self.a, dtype=complex).ravel()
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @classmethod
    def center(cls, N, R=1.0):
        a = np.zeros(N + 1, dtype=complex)
        a[0] = 1.0
        return cls(a, R)

    @property
    def order(self):
        return self.a.size - 1

    def norm(self, R=None):
        R = self.R if R is None else R
        return float(np.sum(np.abs(self.a) * R ** np.arange(self.a.size)))

    def distance(self, other, R=None):
        R = self.R if R is None else R
        return float(np.sum(np.abs(self.a - other.a) * R ** np.arange(self.a.size)))

    def series(self):
        """The inverse Riemann map ``w * (a_0 + a_1 w + ...)``."""
        return Series1(self.a, normalized=True)


@dataclass(frozen=True)
class ContractionCert:
    """Radius ``R`` (normalized scale), ball radius ``delta``, contraction factor ``theta``.

    ``eps_radius`` is ``R`` expressed for the original weight.
    """

    R: float
    delta: float
    theta: float
    eps_radius: float

    def bounds(self, mu):
        """The two certificate sums at ``R``; both must be <= 0 when satisfied."""
        return _certificate_slack(mu.coeffs, self.R, self.delta, self.theta)


@dataclass(frozen=True)
class SolveOptions:
    order: int = 16
    tol: float = 1e-12
    max_iter: int = 200
    delta: float | None = None


def _certificate_slack(c, R, delta, theta):
    idx = np.add.outer(np.arange(c.shape[0]), np.arange(c.shape[1]))
    ac = np.abs(c).copy()
    ac[0, 0] = 0.0
    s5 = np.sum(ac * R ** idx * (1 + delta) ** (idx + 2))
    s6 = np.sum((idx + 2) * ac * R ** idx * (1 + delta) ** (idx + 1))
    return s5 - (delta - delta ** 2 / 2), s6 - (theta - delta)


def radius_certificate(mu, delta, R_max=R_GRID_MAX, steps=40):
    """Largest radius for which ``F`` maps ``B_delta`` into itself and contracts.

    Halves ``R`` from ``R_max`` until both bounds hold, then bisects between the
    first passing grid point and its failing neighbour.  ``theta = (1 + delta)/2``.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    theta = (1 + delta) / 2

    def ok(R):
        s5, s6 = _certificate_slack(mu.coeffs, R, delta, theta)
        return s5 <= 0 and s6 <= 0

    R = R_max
    for k in range(steps):
        if ok(R):
            break
        R *= 0.5
    else:
        raise NoContractionRadius(f"no contraction radius down to {R:.3e} for delta={delta}")
    if R < R_max:
        lo, hi = R, 2 * R
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
        R = lo
    return ContractionCert(R=R, delta=delta, theta=theta,
                           eps_radius=R * np.sqrt(mu.scale))


def best_certificate(mu, deltas=DELTA_GRID):
    """Certificate with the largest radius over a grid of ball radii."""
    best = None
    for d in deltas:
        try:
            cert = radius_certificate(mu, float(d))
        except NoContractionRadius:
            continue
        if best is None or cert.R > best.R:
            best = cert
    if best is None:
        raise NoContractionRadius("no ball radius on the grid admits a contraction radius")
    return best


def _poly_powers(base, kmax):
    out = [np.ones(1, dtype=complex)]
    for _ in range(kmax):
        out.append(np.convolve(out[-1], base))
    return out


def _weight_terms(c, a, e2):
    """``T_n``: the c-dependent Fourier sums for ``n = 0..N``.

    ``T_n = sum_{r+s>0} c[r, s] sum_j P_r[n + j] Q_s[j] eps**(2j)`` with
    ``P_r(x) = x**r A(x)**(r+1)``, ``Q_s(y) = y**s conj(A)(y)**(s+1)`` and
    ``A(x) = sum a_p x**p``.  This is the multi-index sum over ``(p, q)``
    collected by the degree of the conjugate block.
    """
    N = a.size - 1
    active = np.abs(c) > 0
    active[0, 0] = False
    T = np.zeros(N + 1, dtype=complex)
    if not active.any():
        return T
    rows = np.nonzero(active.any(axis=1))[0]
    cols = np.nonzero(active.any(axis=0))[0]
    Apow = _poly_powers(a, int(rows.max()) + 1)
    Bpow = _poly_powers(a.conj(), int(cols.max()) + 1)
    for r in rows:
        P = np.concatenate([np.zeros(r, dtype=complex), Apow[r + 1]])
        ss = np.nonzero(active[r])[0]
        S = np.zeros(int(ss.max()) + Bpow[int(ss.max()) + 1].size, dtype=complex)
        for s in ss:
            Q = Bpow[s + 1]
            S[s:s + Q.size] += c[r, s] * Q
        S *= _eps_powers(e2, S.size)
        # T_n += sum_j P[n + j] S[j]
        for n in range(N + 1):
            m = min(S.size, P.size - n)
            if m > 0:
                T[n] += np.dot(P[n:n + m], S[:m])
    return T


def _eps_powers(e2, n):
    w = np.empty(n, dtype=complex)
    w[0] = 1.0  # includes 0**0 == 1 at eps == 0
    if n > 1:
        w[1:] = e2 ** np.arange(1, n)
    return w


def fixed_point_map(eps, a, mu):
    """Evaluate ``F(eps; a)`` for the normalized weight.

    ``eps`` and ``a`` refer to the normalized problem (weight divided by its
    leading coefficient); for weights with ``c[0, 0] == 1`` this is the
    original problem.  Indices above the truncation order count as zero.
    """
    av = np.asarray(a.a if isinstance(a, CoeffSeq) else a, dtype=complex)
    N = av.size - 1
    e2 = complex(eps) ** 2
    T = _weight_terms(mu.coeffs, av, e2)
    w = _eps_powers(e2, N + 1)
    F = np.empty(N + 1, dtype=complex)
    for n in range(1, N + 1):
        tail = np.dot(av[n + 1:], av[1:N + 1 - n].conj() * w[1:N + 1 - n])
        F[n] = -T[n] - av[n] * (av[0].conj() - 1) - tail
    F[0] = (1 - 0.5 * T[0] - 0.5 * abs(av[0] - 1) ** 2
            - 0.5 * np.dot(av[1:], av[1:].conj() * w[1:]))
    R = a.R if isinstance(a, CoeffSeq) else 1.0
    return CoeffSeq(F, R)


def solve(mu, eps, opts=None, **kw):
    """Fixed point ``a(eps)`` of the inverse Riemann map, in the original scale.

    Iterates ``a <- F(eps; a)`` from ``(1, 0, 0, ...)`` until both the weighted
    and the coefficientwise step fall below ``tol``.  Raises ``InvalidEps`` outside the certified radius and
    ``NotConverged`` when ``max_iter`` is exhausted.
    """
    opts = opts or SolveOptions(**kw)
    if opts.order < 1 or opts.tol <= 0:
        raise ValueError("solve needs order >= 1 and tol > 0")
    cert = (radius_certificate(mu, opts.delta) if opts.delta is not None
            else best_certificate(mu))
    eps_n = eps / np.sqrt(mu.scale)
    if abs(eps_n) >= cert.R:
        raise InvalidEps(f"|eps|={abs(eps):g} outside the certified radius {cert.eps_radius:g}")
    a = CoeffSeq.center(opts.order, cert.R)
    step = np.inf
    for it in range(1, opts.max_iter + 1):
        nxt = fixed_point_map(eps_n, a, mu)
        if not np.all(np.isfinite(nxt.a)):
            raise NotConverged(it, step)
        # the weighted norm alone hides unconverged high coefficients when R < 1
        step = max(nxt.distance(a), float(np.abs(nxt.a - a.a).max()))
        a = nxt
        if step < opts.tol:
            break
    else:
        raise NotConverged(opts.max_iter, step)
    # back to the original scale: a_n -> a_n * scale**(-(n+1)/2)
    sq = np.sqrt(mu.scale)
    n = np.arange(a.a.size)
    orig = a.a * sq ** (-(n + 1.0))
    return CoeffSeq(orig, cert.R * sq, iters=it)


def limit_map(mu):
    """Limit ``h(0, z) = sum c[r, 0] / sqrt(c[0, 0]) z**(r+1)`` (original scale)."""
    col = mu.original[:, 0] / np.sqrt(mu.scale)
    return Series1(col, normalized=True)


def riemann_map(mu, eps, opts=None, **kw):
    """Normalized Riemann map ``h(eps, .)`` as a series in ``z``."""
    sol = solve(mu, eps, opts, **kw)
    return series_revert(sol.series(), sol.order + 1)


def boundary_residual(mu, eps, a, K=64):
    """``max |mu(f(eps u)) - eps**2| / eps**2`` over ``K`` points of ``|u| = 1``."""
    if K < 8:
        raise ValueError("boundary_residual needs K >= 8")
    u = np.exp(2j * np.pi * np.arange(K) / K)
    z = a.series()(eps * u)
    return float(np.max(np.abs(mu(z) - eps ** 2)) / eps ** 2)


def richardson_limit(mu, eps_values, opts=None, degree=2, **kw):
    """Extrapolate ``a(eps)`` to ``eps = 0`` by a polynomial fit in ``eps**2``.

    Returns ``(a0, max_fit_residual)``.
    """
    eps_values = np.asarray(eps_values, dtype=float)
    A = np.vstack([solve(mu, e, opts, **kw).a for e in eps_values])
    V = np.vander(eps_values ** 2, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(V, A, rcond=None)
    resid = np.abs(V @ coef - A).max()
    return coef[0], float(resid)
