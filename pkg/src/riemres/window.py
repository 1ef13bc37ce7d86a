"""The fixed smooth cut-off profile ``chi`` and its derivatives.

``chi(t) = 1`` for ``t <= 1/4``, ``chi(t) = 0`` for ``t >= 1``, and in between
the standard ``exp(-1/x)`` smooth step.  Forms are windowed as
``chi(|z|**2 / rho**2)``, so they equal their germ on ``|z| <= rho/2`` and
vanish outside ``|z| < rho``.
"""

from functools import lru_cache

import numpy as np
import sympy as sp

T_FLAT = 0.25
T_ZERO = 1.0
# within this margin of the transition ends every derivative is negligible (< 1e-13)
_EDGE_X = 1e-2

_t = sp.Symbol("t", real=True)
_x = (T_ZERO - _t) / (T_ZERO - T_FLAT)
_phi = sp.exp(-1 / _x)
_psi = sp.exp(-1 / (1 - _x))
_CHI = _phi / (_phi + _psi)


@lru_cache(maxsize=None)
def _derivative(k):
    return sp.lambdify(_t, sp.diff(_CHI, _t, k), "numpy")


def chi(t, k=0):
    """``k``-th derivative of the profile at ``t`` (array-friendly)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    if k == 0:
        out[t <= T_FLAT] = 1.0
    x = (T_ZERO - t) / (T_ZERO - T_FLAT)
    mid = (x > _EDGE_X) & (x < 1 - _EDGE_X)
    if k == 0:
        out[(x >= 1 - _EDGE_X) & (t > T_FLAT)] = 1.0
    if np.any(mid):
        out[mid] = _derivative(k)(t[mid])
    return out if out.ndim else float(out)
