"""Built-in verification suites.

Each check returns a dict ``{"name", "passed", "measurements", "seconds",
"budget"}`` where ``measurements`` maps a label to ``[value, tolerance]``.  Suites group
the checks by module: ``series``, ``riemann``, ``residue``, ``pairing`` and
``all``.
"""

from __future__ import annotations

import time

import numpy as np

from . import pairing as pr
from .residue import (CutoffSpec, Form1D, FunctionWithPole, HoloForm,
                      exact_form, pole_reduce, res_classical, res_dolbeault)
from .riemann import (AnalyticWeight, boundary_residual, limit_map,
                      richardson_limit, solve)
from .series import (Jet2, Series1, jet_mul, series_compose, series_revert)

__all__ = ["SUITES", "run_suite"]

ORDER = 16
SMALL_EPS = tuple(0.002 * k for k in range(1, 7))


def _check(name, budget, fn):
    t0 = time.perf_counter()
    meas = {k: [float(v), float(t)] for k, (v, t) in fn().items()}
    dt = time.perf_counter() - t0
    ok = all(v <= t for v, t in meas.values()) and dt <= budget
    return {"name": name, "passed": bool(ok), "measurements": meas,
            "seconds": round(dt, 3), "budget": budget}


# -- weights used throughout -------------------------------------------------
def weight_holomorphic():
    return AnalyticWeight.from_holomorphic(Series1([1.0, 0.3], normalized=True))


def weight_radial():
    return AnalyticWeight.radial([1.0, 1.0])


def weight_cubic():
    return AnalyticWeight.from_terms({(0, 0): 1.0, (1, 0): 0.5, (0, 1): 0.5})


def _revert(b, N=ORDER):
    return series_revert(Series1(b, normalized=True), N + 1).coeffs


# -- series ------------------------------------------------------------------
def _series_roundtrip():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        b = 0.3 * (rng.normal(size=9) + 1j * rng.normal(size=9))
        b[0] = 1.0
        f = Series1(b, normalized=True)
        g = series_revert(f, 12)
        err = np.abs(series_compose(f, g, 12).poly(12) - Series1.identity(12).poly(12))
        # relative to the coefficient size of the inverse, which grows with order
        worst = max(worst, float(err.max() / max(1.0, np.abs(g.coeffs).max())))
    return worst


def _jet_product_commutes():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        a = Jet2(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        b = Jet2(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        worst = max(worst, float(np.abs((jet_mul(a, b, 6) - jet_mul(b, a, 6)).coeffs).max()))
    return worst


def _json_roundtrip():
    rng = np.random.default_rng(9)
    a = Jet2(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    s = Series1(rng.normal(size=6) + 1j * rng.normal(size=6))
    e1 = np.abs((Jet2.from_json(a.to_json()) - a).coeffs).max()
    e2 = np.abs(Series1.from_json(s.to_json()).coeffs - s.coeffs).max()
    return max(e1, e2)


def suite_series():
    return [
        _check("series: reversion composes back to the identity", 1.0,
               lambda: {"max error": (_series_roundtrip(), 1e-12)}),
        _check("series: jet product commutes", 1.0,
               lambda: {"max error": (_jet_product_commutes(), 1e-13)}),
        _check("series: JSON round trip is lossless", 1.0,
               lambda: {"max error": (_json_roundtrip(), 0.0)}),
    ]


# -- riemann (criteria 1-5) --------------------------------------------------
def criterion_1():
    mu = weight_holomorphic()
    ref = _revert([1.0, 0.3])
    sols = [solve(mu, e, order=ORDER).a for e in (0.02, 0.05, 0.1)]
    err = max(np.abs(a - ref).max() for a in sols)
    spread = max(np.abs(a - sols[0]).max() for a in sols)
    return {"max error": (err, 1e-10), "eps spread": (spread, 1e-10)}


def criterion_2():
    mu = weight_radial()
    e0 = en = 0.0
    for e in (0.05, 0.1):
        a = solve(mu, e, order=ORDER).a
        t = (-1.0 + np.sqrt(1.0 + 4.0 * e * e)) / 2.0
        e0 = max(e0, abs(a[0] - np.sqrt(t) / e))
        en = max(en, np.abs(a[1:]).max())
    return {"a0 error": (e0, 1e-10), "max |a_n|, n >= 1": (en, 1e-10)}


def criterion_3():
    mu = weight_cubic()
    a0, _ = richardson_limit(mu, SMALL_EPS, order=ORDER, degree=2)
    err = np.abs(a0 - _revert([1.0, 0.5])).max()
    lm = limit_map(mu).poly(ORDER + 1)
    exact = np.zeros(ORDER + 2, dtype=complex)
    exact[1], exact[2] = 1.0, 0.5
    return {"extrapolation error": (err, 1e-6),
            "limit map mismatch": (np.abs(lm - exact).max(), 0.0)}


def criterion_4():
    worst = 0.0
    for mu, grid in ((weight_holomorphic(), (0.02, 0.05, 0.1)),
                     (weight_radial(), (0.05, 0.1)),
                     (weight_cubic(), (0.01, 0.02, 0.04))):
        for e in grid:
            worst = max(worst, boundary_residual(mu, e, solve(mu, e, order=ORDER)))
    return {"boundary residual": (worst, 1e-7)}


def criterion_5():
    mu = weight_cubic()
    even = max(np.abs(solve(mu, e, order=ORDER).a - solve(mu, -e, order=ORDER).a).max()
               for e in (0.01, 0.03))
    _, resid = richardson_limit(mu, SMALL_EPS, order=ORDER, degree=2)
    return {"eps vs -eps": (even, 1e-10), "eps**2 fit residual": (resid, 1e-6)}


def suite_riemann():
    return [
        _check("criterion 1: holomorphic weight reproduces the reverted map", 1.0, criterion_1),
        _check("criterion 2: radial weight reproduces the closed form", 1.0, criterion_2),
        _check("criterion 3: extrapolated limit and exact limit map", 2.0, criterion_3),
        _check("criterion 4: boundary residual of converged solves", 2.0, criterion_4),
        _check("criterion 5: evenness and eps**2 fit", 2.0, criterion_5),
    ]


# -- residue (criterion 10) --------------------------------------------------
def _random_jet(rng, order, holomorphic=False):
    c = rng.normal(size=(order + 1, order + 1)) + 1j * rng.normal(size=(order + 1, order + 1))
    if holomorphic:
        c[:, 1:] = 0.0
    return Jet2(c)


def _exact_forms_vanish():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(100):
        g = FunctionWithPole.simple(_random_jet(rng, 3), int(rng.integers(0, 4)))
        worst = max(worst, abs(res_dolbeault(exact_form(g))))
    return worst


def _pole_reduce_preserves():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        alpha = Form1D(int(rng.integers(1, 5)), _random_jet(rng, 4))
        reduced, _ = pole_reduce(alpha)
        worst = max(worst, abs(res_dolbeault(reduced) - res_dolbeault(alpha)))
    return worst


def _classical_matches():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(20):
        alpha = Form1D(1, _random_jet(rng, 3, holomorphic=True))
        worst = max(worst, abs(res_classical(alpha) - res_dolbeault(alpha)))
    return worst


def suite_residue():
    def crit10():
        return {"residue of exact forms": (_exact_forms_vanish(), 1e-12),
                "pole_reduce residue change": (_pole_reduce_preserves(), 1e-12),
                "classical vs Dolbeault": (_classical_matches(), 1e-10)}
    return [_check("criterion 10: exact forms, pole reduction, classical residue",
                   5.0, crit10)]


# -- pairing (criteria 6-9) --------------------------------------------------
ONE = HoloForm(Series1([1.0]))
RADIAL = CutoffSpec.radial()
TILTED = CutoffSpec(Jet2.from_terms({(1, 0): 0.05, (0, 1): 0.05}, real=True))
RE_Z = Jet2.from_terms({(1, 0): 0.5, (0, 1): 0.5}, real=True)


def criterion_6():
    alpha = Form1D(1, Jet2.constant(1.0))
    e1 = abs(pr.divergence_fit(alpha, ONE, RADIAL).I0 - 2.0) / 2.0
    e2 = abs(pr.divergence_fit(alpha, ONE, TILTED).I0 - 2.0) / 2.0
    return {"radial cut-off": (e1, 1e-5), "tilted cut-off": (e2, 2e-5)}


def criterion_7():
    a1 = Form1D(2, Jet2.from_terms({(0, 0): 1.0, (1, 0): 1.0}))
    a2 = Form1D(2, Jet2.zbar())
    e1 = abs(pr.divergence_fit(a1, ONE, RADIAL).I0 - 2.0) / 2.0
    e2 = abs(pr.divergence_fit(a2, ONE, RADIAL).I0)
    return {"simple numerator": (e1, 1e-4), "conj(z) numerator": (e2, 1e-5)}


def criterion_8():
    a1 = Form1D(1, Jet2.constant(1.0))
    a2 = Form1D(2, Jet2.from_terms({(0, 0): 1.0, (1, 0): 1.0}))
    v1 = pr.variation(a1, ONE, RADIAL, Jet2.constant(0.3))
    v2 = pr.variation(a2, ONE, RADIAL, RE_Z)
    v3 = pr.variation(a2, ONE, RADIAL, RE_Z * 2.0)
    e1 = abs(v1["measured"] + 0.6)
    e2 = abs(v2["measured"] + 1.0)
    lin = abs(v3["measured"] - 2 * v2["measured"]) / abs(2 * v2["measured"])
    return {"constant phi": (e1, 1e-4), "phi = Re z": (e2, 1e-3), "linearity": (lin, 1e-3)}


STOKES_CASES = (
    (FunctionWithPole.simple(Jet2.constant(1.0), 1), RADIAL),
    (FunctionWithPole.simple(Jet2.from_terms({(0, 0): 1.0, (0, 1): 1.0}), 1), TILTED),
    (FunctionWithPole.simple(Jet2.from_terms({(1, 0): 1.0, (2, 0): 2.0, (1, 1): 0.5}), 2), TILTED),
)
BOUNDARY_GRID = tuple(0.001 * k for k in range(6, 0, -1))


def criterion_9():
    stokes = 0.0
    for g, lam in STOKES_CASES:
        s = pr.stokes_consistency(g, ONE, lam, 0.01)
        stokes = max(stokes, abs(s["interior"] - s["boundary"]))
    worst = 0.0
    cases = (
        (FunctionWithPole.simple(Jet2.z(), 1), RADIAL, "levelset"),
        (FunctionWithPole.simple(Jet2.constant(1.0), 1), TILTED, "levelset"),
        (FunctionWithPole.simple(Jet2.from_terms({(1, 0): 1.0, (2, 0): 2.0}), 2), TILTED, "riemann"),
    )
    for g, lam, method in cases:
        lim, _ = pr.boundary_limit(g, ONE, lam, BOUNDARY_GRID, method=method)
        err = abs(lim - pr.boundary_prediction(g, ONE, lam))
        worst = max(worst, err)
    return {"Stokes": (stokes, 1e-6), "boundary limit": (worst, 1e-5)}


def suite_pairing():
    return [
        _check("criterion 6: divergent coefficient is cut-off independent", 30.0, criterion_6),
        _check("criterion 7: higher-order pole divergent coefficient", 60.0, criterion_7),
        _check("criterion 8: variation of the finite part", 90.0, criterion_8),
        _check("criterion 9: Stokes consistency and boundary limits", 30.0, criterion_9),
    ]


SUITES = {
    "series": suite_series,
    "riemann": suite_riemann,
    "residue": suite_residue,
    "pairing": suite_pairing,
}


def run_suite(name):
    """Run one suite (or ``all``); returns ``(all_passed, checks)``."""
    if name == "all":
        checks = [c for fn in SUITES.values() for c in fn()]
    elif name in SUITES:
        checks = SUITES[name]()
    else:
        raise ValueError(f"unknown suite {name!r}")
    return all(c["passed"] for c in checks), checks
