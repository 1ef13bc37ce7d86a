"""Truncated power series in one variable and Taylor jets in (z, conj(z)).

Two carriers live here:

``Jet2``
    a dense table ``g[r, s]`` standing for ``sum g[r, s] z**r * conj(z)**s``
    with ``0 <= r, s <= order``.  Used for numerators of differential forms,
    cut-off exponents and analytic weights.

``Series1``
    a univariate series, either plain (``sum b_k w**k``) or in the
    "univalent-normalized" shape ``w * (b_0 + b_1 w + ...)``.

Every operation takes an explicit output order; coefficients beyond it are
dropped, never estimated.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Jet2",
    "Series1",
    "jet_mul",
    "jet_dz",
    "jet_dzbar",
    "jet_eval",
    "jet_conj",
    "jet_exp",
    "series_mul",
    "series_compose",
    "series_revert",
    "series_eval",
    "series_derivative",
]

# reality check tolerance for real-flagged jets
_HERMITIAN_RTOL = 1e-12


def _frozen(arr):
    arr.setflags(write=False)
    return arr


class Jet2:
    """Truncated bivariate Taylor expansion in ``z`` and ``conj(z)``.

    Parameters
    ----------
    coeffs : array_like, shape (N+1, N+1)
        ``coeffs[r, s]`` multiplies ``z**r * conj(z)**s``.
    real : bool
        Flag a real-valued germ.  Requires ``coeffs[s, r] == conj(coeffs[r, s])``
        and symmetrizes away round-off.
    """

    __slots__ = ("_c", "real")

    def __init__(self, coeffs, real=False):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
            raise ValueError("Jet2 coefficients must be a non-empty square table")
        if real:
            scale = max(1.0, float(np.abs(c).max()))
            if np.abs(c - c.T.conj()).max() > _HERMITIAN_RTOL * scale:
                raise ValueError("real-flagged jet violates g[s, r] == conj(g[r, s])")
            c = 0.5 * (c + c.T.conj())
        self._c = _frozen(c)
        self.real = bool(real)

    # -- construction -----------------------------------------------------
    @classmethod
    def zeros(cls, order, real=False):
        return cls(np.zeros((order + 1, order + 1)), real=real)

    @classmethod
    def constant(cls, value, order=0):
        c = np.zeros((order + 1, order + 1), dtype=complex)
        c[0, 0] = value
        return cls(c, real=np.imag(value) == 0)

    @classmethod
    def from_terms(cls, terms, order=None, real=False):
        """Build from ``{(r, s): value}``; order defaults to the largest index."""
        if order is None:
            order = max([max(r, s) for r, s in terms] + [0])
        c = np.zeros((order + 1, order + 1), dtype=complex)
        for (r, s), v in terms.items():
            if r < 0 or s < 0:
                raise ValueError(f"negative jet index ({r}, {s})")
            if r <= order and s <= order:
                c[r, s] += v
        return cls(c, real=real)

    @classmethod
    def z(cls, order=1):
        return cls.from_terms({(1, 0): 1.0}, order=max(order, 1))

    @classmethod
    def zbar(cls, order=1):
        return cls.from_terms({(0, 1): 1.0}, order=max(order, 1))

    # -- basic protocol ---------------------------------------------------
    @property
    def coeffs(self):
        return self._c

    @property
    def order(self):
        return self._c.shape[0] - 1

    def __getitem__(self, idx):
        r, s = idx
        if r > self.order or s > self.order:
            return 0j
        return complex(self._c[r, s])

    def __repr__(self):
        nz = {(int(r), int(s)): complex(self._c[r, s]) for r, s in zip(*np.nonzero(self._c))}
        return f"Jet2(order={self.order}, {nz}{', real' if self.real else ''})"

    def resize(self, order):
        """Pad with zeros or truncate to ``order``."""
        c = np.zeros((order + 1, order + 1), dtype=complex)
        k = min(order, self.order) + 1
        c[:k, :k] = self._c[:k, :k]
        return Jet2(c, real=self.real)

    def _aligned(self, other):
        n = max(self.order, other.order)
        return self.resize(n)._c, other.resize(n)._c

    def __add__(self, other):
        if isinstance(other, Jet2):
            a, b = self._aligned(other)
            return Jet2(a + b, real=self.real and other.real)
        c = self._c.copy()
        c[0, 0] += other
        return Jet2(c, real=self.real and np.imag(other) == 0)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self._c, real=self.real)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if isinstance(k, Jet2):
            return NotImplemented  # products need an explicit order: use jet_mul
        return Jet2(self._c * k, real=self.real and np.imag(k) == 0)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1.0 / k)

    def shift(self, dr=0, ds=0, order=None):
        """Multiply by ``z**dr * conj(z)**ds``."""
        n = self.order + max(dr, ds) if order is None else order
        c = np.zeros((n + 1, n + 1), dtype=complex)
        k = min(self.order, n - dr, n - ds) + 1 if min(n - dr, n - ds) >= 0 else 0
        if k > 0:
            c[dr:dr + k, ds:ds + k] = self._c[:k, :k]
        return Jet2(c, real=self.real and dr == ds)

    def allclose(self, other, atol=1e-12):
        a, b = self._aligned(other)
        return bool(np.abs(a - b).max() <= atol)

    def is_hermitian(self, atol=1e-12):
        return bool(np.abs(self._c - self._c.T.conj()).max() <= atol)

    def depends_on_zbar(self):
        return bool(np.any(self._c[:, 1:] != 0))

    def __call__(self, z):
        return jet_eval(self, z)

    # -- serialization ----------------------------------------------------
    def to_json(self):
        terms = [[int(r), int(s), float(self._c[r, s].real), float(self._c[r, s].imag)]
                 for r, s in zip(*np.nonzero(self._c))]
        return {"order": self.order, "coeffs": terms}

    @classmethod
    def from_json(cls, obj, real=False):
        order = int(obj["order"])
        if order < 0:
            raise ValueError("jet order must be non-negative")
        c = np.zeros((order + 1, order + 1), dtype=complex)
        for r, s, re, im in obj["coeffs"]:
            r, s = int(r), int(s)
            if not (0 <= r <= order and 0 <= s <= order):
                raise ValueError(f"jet index ({r}, {s}) outside 0..{order}")
            c[r, s] += complex(re, im)
        return cls(c, real=real)


def jet_mul(a, b, N):
    """Product of two jets, truncated to indices ``r, s <= N``."""
    n = N + 1
    ca, cb = a.resize(N).coeffs, b.resize(N).coeffs
    out = np.zeros((n, n), dtype=complex)
    for r in range(n):
        for s in range(n):
            v = ca[r, s]
            if v != 0:
                out[r:, s:] += v * cb[: n - r, : n - s]
    return Jet2(out, real=a.real and b.real)


def jet_dz(g):
    """Holomorphic derivative ``d/dz`` acting on ``z**r conj(z)**s``."""
    c = np.zeros_like(g.coeffs)
    r = np.arange(1, g.order + 1)[:, None]
    c[:-1, :] = r * g.coeffs[1:, :]
    return Jet2(c)


def jet_dzbar(g):
    c = np.zeros_like(g.coeffs)
    s = np.arange(1, g.order + 1)[None, :]
    c[:, :-1] = s * g.coeffs[:, 1:]
    return Jet2(c)


def jet_conj(g):
    """Jet of the complex conjugate function."""
    return Jet2(g.coeffs.T.conj(), real=g.real)


def jet_eval(g, z):
    """Evaluate at ``z`` (scalar or array) by nested Horner in ``z`` then ``conj(z)``."""
    z = np.asarray(z, dtype=complex)
    zb = z.conj()
    c = g.coeffs
    acc = np.zeros(z.shape, dtype=complex)
    for r in range(g.order, -1, -1):
        row = np.zeros(z.shape, dtype=complex)
        for s in range(g.order, -1, -1):
            row = row * zb + c[r, s]
        acc = acc * z + row
    if acc.ndim == 0:
        return complex(acc)
    return acc


def jet_exp(g, N):
    """``exp(g)`` truncated to order ``N`` (exact within the truncation)."""
    g = g.resize(N)
    g0 = g[0, 0]
    h = g - g0
    term = Jet2.constant(1.0, N)
    total = Jet2.constant(1.0, N)
    # h has no constant term, so h**k vanishes in the N x N box once k > 2N
    for k in range(1, 2 * N + 1):
        term = jet_mul(term, h, N) / k
        total = total + term
    out = total * np.exp(g0)
    return Jet2(out.coeffs, real=g.real)


class Series1:
    """Truncated univariate power series.

    ``normalized=False``: ``coeffs[k]`` multiplies ``w**k``.
    ``normalized=True``: the series is ``w * (coeffs[0] + coeffs[1] w + ...)``
    with ``coeffs[0] != 0``; this is the shape of a normalized univalent map.

    ``order`` is the highest power of ``w`` represented in either shape.
    """

    __slots__ = ("_b", "normalized")

    def __init__(self, coeffs, normalized=False):
        b = np.array(coeffs, dtype=complex).ravel()
        if b.size == 0:
            raise ValueError("series needs at least one coefficient")
        if normalized and b[0] == 0:
            raise ValueError("univalent-normalized series requires b_0 != 0")
        self._b = _frozen(b)
        self.normalized = bool(normalized)

    @property
    def coeffs(self):
        return self._b

    @property
    def order(self):
        return self._b.size if self.normalized else self._b.size - 1

    def poly(self, order=None):
        """Plain coefficient array indexed by the power of ``w``."""
        p = np.concatenate([[0j], self._b]) if self.normalized else self._b.copy()
        if order is not None:
            p = _fit(p, order)
        return p

    @classmethod
    def from_poly(cls, p, normalized=None):
        """Build from plain coefficients; ``normalized=None`` picks the shape."""
        p = np.asarray(p, dtype=complex)
        if normalized is None:
            normalized = p.size > 1 and p[0] == 0 and p[1] != 0
        if normalized:
            if p[0] != 0:
                raise ValueError("normalized shape needs zero constant term")
            return cls(p[1:], normalized=True)
        return cls(p)

    @classmethod
    def identity(cls, order=1):
        b = np.zeros(order)
        b[0] = 1.0
        return cls(b, normalized=True)

    def __repr__(self):
        kind = "normalized" if self.normalized else "plain"
        return f"Series1({kind}, {np.array2string(self._b, precision=6)})"

    def __call__(self, w):
        return series_eval(self, w)

    def allclose(self, other, atol=1e-12):
        n = max(self.order, other.order)
        return bool(np.abs(self.poly(n) - other.poly(n)).max() <= atol)

    def to_json(self):
        return {"coeffs": [[float(v.real), float(v.imag)] for v in self._b],
                "normalized": self.normalized}

    @classmethod
    def from_json(cls, obj):
        b = [complex(re, im) for re, im in obj["coeffs"]]
        return cls(b, normalized=bool(obj.get("normalized", False)))


def _fit(p, order):
    out = np.zeros(order + 1, dtype=complex)
    k = min(order + 1, p.size)
    out[:k] = p[:k]
    return out


def _pmul(a, b, N):
    return _fit(np.convolve(a[: N + 1], b[: N + 1]), N)


def _pinv(a, N):
    """Reciprocal of a plain series with ``a[0] != 0`` by Newton doubling."""
    if a[0] == 0:
        raise ZeroDivisionError("series reciprocal needs a nonzero constant term")
    x = np.array([1.0 / a[0]], dtype=complex)
    k = 1
    while k < N + 1:
        k = min(2 * k, N + 1)
        ax = _pmul(a, x, k - 1)
        corr = -ax
        corr[0] += 2.0
        x = _pmul(x, corr, k - 1)
    return _fit(x, N)


def _pcompose(f, g, N):
    if g[0] != 0:
        raise ValueError("inner series must have zero constant term")
    out = np.zeros(N + 1, dtype=complex)
    for c in f[::-1]:
        out = _pmul(out, g, N)
        out[0] += c
    return out


def series_mul(f, g, N):
    return Series1(_pmul(f.poly(N), g.poly(N), N))


def series_derivative(f):
    p = f.poly()
    if p.size == 1:
        return Series1([0j])
    return Series1(p[1:] * np.arange(1, p.size))


def series_eval(f, w):
    w = np.asarray(w, dtype=complex)
    acc = np.zeros(w.shape, dtype=complex)
    for c in f.poly()[::-1]:
        acc = acc * w + c
    return complex(acc) if acc.ndim == 0 else acc


def series_compose(f, g, N):
    """Truncated composition ``f(g(w))`` through ``w**N``.

    The result is normalized when both inputs are, plain otherwise.
    """
    gp = g.poly()
    if gp[0] != 0:
        raise ValueError("series_compose: inner series has a nonzero constant term")
    out = _pcompose(f.poly(), _fit(gp, N), N)
    if f.normalized and g.normalized and N >= 1 and out[1] != 0:
        return Series1(out[1:], normalized=True)
    return Series1(out)


def _revert_recurrence(fp, N):
    g = np.zeros(N + 1, dtype=complex)
    g[1] = 1.0 / fp[1]
    for k in range(2, N + 1):
        c = _pcompose(fp[: k + 1], g[: k + 1], k)[k]
        g[k] = -c / fp[1]
    return g


def _revert_newton(fp, N):
    # g <- g - (f(g) - w) / f'(g), doubling the correct order each pass
    dfp = fp[1:] * np.arange(1, fp.size)
    g = np.zeros(2, dtype=complex)
    g[1] = 1.0 / fp[1]
    k = 1
    while k < N:
        k = min(2 * k, N)
        g = _fit(g, k)
        fg = _pcompose(_fit(fp, k), g, k)
        fg[1] -= 1.0
        dfg = _pcompose(_fit(dfp, k), g, k)
        g = g - _pmul(fg, _pinv(dfg, k), k)
    return g


def series_revert(f, N):
    """Compositional inverse ``g`` with ``f(g(w)) = w + O(w**(N+1))``.

    Direct coefficient recurrence for ``N <= 8``, Newton doubling above.
    """
    fp = f.poly()
    if fp[0] != 0 or fp.size < 2 or fp[1] == 0:
        raise ValueError("series_revert needs f = w * (b_0 + ...) with b_0 != 0")
    if N < 1:
        raise ValueError("reversion order must be >= 1")
    fp = _fit(fp, N)
    g = _revert_recurrence(fp, N) if N <= 8 else _revert_newton(fp, N)
    return Series1(g[1:], normalized=True)

