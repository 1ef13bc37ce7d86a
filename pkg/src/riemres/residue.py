"""Residues of smooth (1,0)-forms with a pole at the origin.

A form is ``alpha = W(z) dz / z**m`` where the numerator ``W`` is a windowed
polynomial

    W(z) = sum_k P_k(z, conj z) * chi^(k)(|z|**2 / rho**2)

(``chi^(k)`` the k-th derivative of the cut-off profile).  Plain inputs have a
single term ``k = 0``; the higher terms appear when ``d/dz`` hits the window,
which keeps pole-order reduction and exact forms ``d(gamma)`` exact.

The Dolbeault residue at ``z = 0`` of ``g dz / z**m`` is
``d^(m-1) g / dz^(m-1) (0) / (m-1)!``: only the ``z**(m-1)`` coefficient of
``P_0`` contributes, since every ``chi^(k)`` with ``k >= 1`` vanishes near 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .series import Jet2, Series1, jet_dz, jet_mul
from .window import chi

log = logging.getLogger(__name__)

__all__ = [
    "WindowedJet",
    "Form1D",
    "FunctionWithPole",
    "HoloForm",
    "CutoffSpec",
    "res_dolbeault",
    "res_classical",
    "pole_reduce",
    "res_log_pairing",
    "exact_form",
]


def _product_order(a, b):
    return a.order + b.order


@dataclass(frozen=True)
class WindowedJet:
    """``sum_k terms[k] * chi^(k)(|z|**2 / rho**2)``."""

    terms: tuple
    rho: float = 1.0

    def __post_init__(self):
        terms = self.terms
        if isinstance(terms, Jet2):
            terms = (terms,)
        if not terms:
            terms = (Jet2.zeros(0),)
        object.__setattr__(self, "terms", tuple(terms))
        if self.rho <= 0:
            raise ValueError("window radius rho must be positive")

    @property
    def base(self):
        return self.terms[0]

    @property
    def order(self):
        return max(t.order for t in self.terms)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        t = (np.abs(z) / self.rho) ** 2
        out = np.zeros(z.shape, dtype=complex)
        for k, P in enumerate(self.terms):
            if np.any(P.coeffs):
                out = out + P(z) * chi(t, k)
        return out if out.ndim else complex(out)

    def _map(self, fn):
        return WindowedJet(tuple(fn(P) for P in self.terms), self.rho)

    def __add__(self, other):
        if other.rho != self.rho:
            raise ValueError("cannot add numerators with different windows")
        n = max(len(self.terms), len(other.terms))
        pad = Jet2.zeros(0)
        a = self.terms + (pad,) * (n - len(self.terms))
        b = other.terms + (pad,) * (n - len(other.terms))
        return WindowedJet(tuple(x + y for x, y in zip(a, b)), self.rho)

    def __mul__(self, k):
        return self._map(lambda P: P * k)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def shift(self, dr=0, ds=0):
        """Multiply by ``z**dr * conj(z)**ds``."""
        return self._map(lambda P: P.shift(dr, ds))

    def mul_jet(self, J):
        """Exact product with a polynomial jet (no truncation)."""
        return self._map(lambda P: jet_mul(P, J, _product_order(P, J)))

    def dz(self):
        """``d/dz``: ``dP_k/dz chi^(k) + P_k conj(z)/rho**2 chi^(k+1)``."""
        out = [jet_dz(P) for P in self.terms] + [Jet2.zeros(0)]
        for k, P in enumerate(self.terms):
            out[k + 1] = out[k + 1] + P.shift(0, 1) / self.rho ** 2
        while len(out) > 1 and not np.any(out[-1].coeffs):
            out.pop()
        return WindowedJet(tuple(out), self.rho)

    def divisible_by_z(self):
        return all(not np.any(P.coeffs[0, :]) for P in self.terms)

    def div_z(self):
        def f(P):
            c = np.zeros_like(P.coeffs)
            c[:-1, :] = P.coeffs[1:, :]
            return Jet2(c)
        return self._map(f)


@dataclass(frozen=True)
class Form1D:
    """``alpha = W(z) dz / z**m`` with windowed numerator ``W``.

    ``Form1D(m, P, rho)`` with a ``Jet2`` ``P`` is the basic form
    ``P chi(|z|**2/rho**2) dz / z**m``.
    """

    m: int
    numer: WindowedJet

    def __init__(self, m, P, rho=1.0):
        if m < 0:
            raise ValueError("pole order must be non-negative")
        numer = P if isinstance(P, WindowedJet) else WindowedJet((P,), rho)
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "numer", numer)

    @property
    def P(self):
        return self.numer.base

    @property
    def rho(self):
        return self.numer.rho

    def __call__(self, z):
        """Coefficient of ``dz`` at ``z``."""
        z = np.asarray(z, dtype=complex)
        return self.numer(z) / z ** self.m

    def __add__(self, other):
        m = max(self.m, other.m)
        return Form1D(m, self.numer.shift(m - self.m) + other.numer.shift(m - other.m))

    def __mul__(self, k):
        return Form1D(self.m, self.numer * k)

    __rmul__ = __mul__

    def to_json(self):
        if len(self.numer.terms) > 1:
            raise ValueError("only forms with a plain windowed numerator serialize")
        return {"m": self.m, "P": self.P.to_json(), "rho": self.rho}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["m"]), Jet2.from_json(obj["P"]), float(obj["rho"]))


@dataclass(frozen=True)
class FunctionWithPole:
    """``gamma = sum_j W_j(z) / z**j`` kept as separate ``(W_j, j)`` terms."""

    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((W, int(j)) for W, j in self.terms))

    @classmethod
    def simple(cls, sigma, m, rho=1.0):
        """``sigma(z, conj z) chi(|z|**2/rho**2) / z**m``."""
        return cls(((WindowedJet((sigma,), rho), m),))

    @property
    def pole_order(self):
        return max((j for _, j in self.terms), default=0)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for W, j in self.terms:
            out = out + W(z) / z ** j
        return out if out.ndim else complex(out)

    def __add__(self, other):
        return FunctionWithPole(self.terms + other.terms)

    def d(self):
        """``d(gamma) = d/dz(gamma) dz`` assembled as a single ``Form1D``."""
        return exact_form(self)


def exact_form(gamma):
    """The form ``d(gamma)`` with ``d`` acting as ``dz * d/dz`` on functions."""
    if not gamma.terms:
        return Form1D(0, Jet2.zeros(0))
    M = max(j for _, j in gamma.terms) + 1
    numer = None
    for W, j in gamma.terms:
        # d(W / z**j) = W' / z**j - j W / z**(j+1)
        part = W.dz().shift(M - j) + (-j) * W.shift(M - j - 1)
        numer = part if numer is None else numer + part
    return Form1D(M, numer)


@dataclass(frozen=True)
class HoloForm:
    """``beta = b(z) dz / z`` with ``b`` a plain polynomial series."""

    b: Series1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.b(z) / z

    @property
    def residue(self):
        return complex(self.b.poly()[0])

    def to_json(self):
        return {"b": self.b.to_json()}

    @classmethod
    def from_json(cls, obj):
        return cls(Series1.from_json(obj["b"]))


@dataclass(frozen=True)
class CutoffSpec:
    """Cut-off ``lambda(z) = |z| exp(eta(z, conj z))`` for a real jet ``eta``."""

    eta: Jet2

    def __post_init__(self):
        if not self.eta.is_hermitian(1e-12 * max(1.0, np.abs(self.eta.coeffs).max())):
            raise ValueError("cut-off exponent eta must be real-valued")
        if not self.eta.real:
            object.__setattr__(self, "eta", Jet2(self.eta.coeffs, real=True))

    @classmethod
    def radial(cls):
        return cls(Jet2.zeros(0, real=True))

    def times_exp(self, phi):
        """The cut-off ``exp(phi) * lambda``."""
        return CutoffSpec(Jet2((self.eta + phi).coeffs, real=True))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.abs(z) * np.exp(self.eta(z).real)

    def weight(self, order):
        """``lambda**2`` as an analytic weight truncated at ``order``."""
        from .riemann import AnalyticWeight
        return AnalyticWeight.from_log_factor(self.eta, order)

    def to_json(self):
        return {"eta": self.eta.to_json()}

    @classmethod
    def from_json(cls, obj):
        return cls(Jet2.from_json(obj["eta"], real=True))


def res_dolbeault(alpha):
    """Dolbeault residue of ``alpha`` at the origin.

    For ``m == 0`` the form is smooth and the residue is 0; this is reported
    at INFO level rather than raised.
    """
    m = alpha.m
    if m == 0:
        log.info("res_dolbeault: pole order 0, residue is 0")
        return 0j
    g = alpha.P
    for _ in range(m - 1):
        g = jet_dz(g)
    value = g[0, 0] / math.factorial(m - 1)
    direct = alpha.P[m - 1, 0]
    assert abs(value - direct) <= 1e-12 * max(1.0, abs(direct)), (value, direct)
    return complex(value)


def res_classical(alpha, r=None, K=64):
    """``(1/2 pi i)`` times the contour integral of ``alpha`` over ``|z| = r``.

    Only defined here for simple poles; ``r`` defaults to ``rho / 4``.  For
    numerators depending on ``conj(z)`` the value varies with ``r`` and carries
    no residue meaning.
    """
    if alpha.m != 1:
        raise ValueError("res_classical needs a simple pole (m == 1)")
    r = alpha.rho / 4 if r is None else r
    val = quadrature.circle_integrate(alpha, r, K, mode="dz")
    return val / (2j * np.pi)


def pole_reduce(alpha):
    """Lower the pole order to one by subtracting exact forms.

    Uses ``W dz / z**(j+1) = (dW/dz / j) dz / z**j - d(W / (j z**j))``
    repeatedly.  Returns ``(alpha_reduced, gamma)`` with
    ``alpha - alpha_reduced = d(gamma)``.  A simple-pole result whose numerator
    is divisible by ``z`` is returned as a smooth (``m == 0``) form.
    """
    W, m = alpha.numer, alpha.m
    terms = []
    for j in range(m - 1, 0, -1):
        terms.append((W * (-1.0 / j), j))
        W = W.dz() * (1.0 / j)
    m = min(m, 1)
    if m == 1 and W.divisible_by_z():
        W, m = W.div_z(), 0
    return Form1D(m, W), FunctionWithPole(tuple(terms))


def res_log_pairing(gamma, lam):
    """``Res((d log lambda) gamma)`` with ``d log lambda = dz/(2z) + (d eta/dz) dz``."""
    deta = jet_dz(lam.eta)
    form = None
    for W, j in gamma.terms:
        part = Form1D(j + 1, W * 0.5) + Form1D(j, W.mul_jet(deta))
        form = part if form is None else form + part
    if form is None:
        return 0j
    return res_dolbeault(form)
