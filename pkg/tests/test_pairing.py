import json

import numpy as np
import pytest
from scipy.integrate import quad

from riemres import pairing as pr
from riemres.errors import FitIllConditioned, LevelSetNotBracketed
from riemres.residue import CutoffSpec, Form1D, FunctionWithPole, HoloForm
from riemres.series import Jet2, Series1

ONE = HoloForm(Series1([1.0]))
RADIAL = CutoffSpec.radial()
TILTED = CutoffSpec(Jet2.from_terms({(1, 0): 0.05, (0, 1): 0.05}, real=True))
RE_Z = Jet2.from_terms({(1, 0): 0.5, (0, 1): 0.5}, real=True)

SIMPLE = Form1D(1, Jet2.constant(1.0))
DOUBLE = Form1D(2, Jet2.from_terms({(0, 0): 1.0, (1, 0): 1.0}))


def chi_ref(t):
    x = (1.0 - t) / 0.75
    if t <= 0.25:
        return 1.0
    if x <= 0:
        return 0.0
    a, b = np.exp(-1 / x), np.exp(-1 / (1 - x))
    return a / (a + b)


# -- regularized pairing ----------------------------------------------------------------
def test_simple_pole_matches_radial_oracle():
    eps = 1e-3
    # theta-integral is exactly 2 pi: value = -2 int_eps^1 chi(r**2) dr / r
    inner = -2 * np.log(0.5 / eps)
    outer = -2 * quad(lambda r: chi_ref(r * r) / r, 0.5, 1.0, epsabs=1e-14, limit=200)[0]
    v = pr.regularized_pairing(SIMPLE, ONE, RADIAL, eps)
    assert abs(v - (inner + outer)) < 1e-8 * abs(inner + outer)


def test_conj_numerator_has_no_log():
    alpha = Form1D(1, Jet2.zbar())
    assert abs(pr.regularized_pairing(alpha, ONE, RADIAL, 1e-3)) <= 1e-6


def test_annulus_difference_is_exact_log():
    v1 = pr.regularized_pairing(SIMPLE, ONE, RADIAL, 0.01)
    v2 = pr.regularized_pairing(SIMPLE, ONE, RADIAL, 0.004)
    assert abs((v2 - v1) - 2 * np.log(0.004 / 0.01)) < 1e-8


def test_pairing_rejects_large_eps():
    with pytest.raises(LevelSetNotBracketed):
        pr.regularized_pairing(SIMPLE, ONE, RADIAL, 0.6)
    with pytest.raises(ValueError):
        pr.regularized_pairing(SIMPLE, ONE, RADIAL, 0.0)


def test_pairing_conjugate_linear_in_beta():
    beta = HoloForm(Series1([2.0 + 1.0j, 0.3]))
    v1 = pr.regularized_pairing(DOUBLE, beta, TILTED, 0.01)
    v2 = pr.regularized_pairing(DOUBLE, HoloForm(Series1([1j * (2.0 + 1.0j), 0.3j])), TILTED, 0.01)
    assert abs(v2 - (-1j) * v1) < 1e-10


# -- divergence fit ---------------------------------------------------------------------
def test_fit_simple_pole():
    fit = pr.divergence_fit(SIMPLE, ONE, RADIAL)
    assert abs(fit.I0 - 2) < 1e-5 * 2
    assert fit.fit_residual < 1e-9
    assert fit.I0_predicted == 2


def test_fit_double_pole():
    fit = pr.divergence_fit(DOUBLE, ONE, RADIAL)
    assert abs(fit.I0 - 2) < 1e-5 * 2


def test_fit_conj_numerator():
    fit = pr.divergence_fit(Form1D(1, Jet2.zbar()), ONE, RADIAL)
    assert abs(fit.I0) < 1e-5


def test_fit_uses_residue_of_beta():
    beta = HoloForm(Series1([1.0 - 2.0j, 0.7]))
    fit = pr.divergence_fit(SIMPLE, beta, TILTED)
    assert abs(fit.I0 - 2 * np.conj(1.0 - 2.0j)) < 1e-5 * abs(fit.I0)


def test_cutoff_independence_of_I0():
    a = pr.divergence_fit(DOUBLE, ONE, RADIAL).I0
    b = pr.divergence_fit(DOUBLE, ONE, TILTED).I0
    assert abs(a - b) <= 2e-5 * abs(a)


def test_exact_forms_have_no_divergence():
    g = FunctionWithPole.simple(Jet2.from_terms({(0, 0): 1.0, (1, 0): 0.5, (0, 1): 1.0}), 1)
    fit = pr.divergence_fit(g.d(), ONE, TILTED)
    assert abs(fit.I0) < 1e-5


def test_fit_residual_shrinks_with_smaller_eps():
    grid = np.array(pr.DEFAULT_GRID)
    big = pr.divergence_fit(DOUBLE, ONE, TILTED, grid, remainder=0)
    small = pr.divergence_fit(DOUBLE, ONE, TILTED, grid / 2, remainder=0)
    assert small.fit_residual < big.fit_residual
    # the remainder is at least first order in eps (second order for this form)
    assert big.remainder_slope > 0.8


def test_grid_validation():
    with pytest.raises(FitIllConditioned):
        pr.divergence_fit(SIMPLE, ONE, RADIAL, [0.02, 0.01])
    with pytest.raises(ValueError):
        pr.divergence_fit(SIMPLE, ONE, RADIAL, [0.01, 0.02, 0.04])
    with pytest.raises(ValueError):
        pr.divergence_fit(SIMPLE, ONE, RADIAL, [0.02, 0.001, 0.0005])
    with pytest.raises(FitIllConditioned):
        pr.divergence_fit(SIMPLE, ONE, RADIAL, [0.02, 0.01, 0.005], remainder=2)


def test_fit_json_and_csv(tmp_path):
    fit = pr.divergence_fit(SIMPLE, ONE, RADIAL, [0.02, 0.01, 0.005, 0.0025], remainder=1)
    obj = json.loads(json.dumps(fit.to_json()))
    for key in ("I0", "I1", "grid", "values", "fit_residual", "remainder_slope"):
        assert key in obj
    assert len(obj["values"]) == 4
    path = tmp_path / "fit.csv"
    fit.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "eps,log_eps,re_value,im_value"
    row = [float(x) for x in lines[1].split(",")]
    assert row[0] == 0.02 and row[1] == pytest.approx(np.log(0.02))


# -- variation of the finite part ----------------------------------------------------------
def test_variation_constant_phi():
    v = pr.variation(SIMPLE, ONE, RADIAL, Jet2.constant(0.3))
    assert v["predicted"] == pytest.approx(-0.6)
    assert abs(v["measured"] + 0.6) < 1e-5
    assert abs(v["I0_base"] - v["I0_moved"]) < 2e-5 * 2


def test_variation_re_z_simple_pole_vanishes():
    v = pr.variation(SIMPLE, ONE, RADIAL, RE_Z)
    assert v["predicted"] == 0
    assert abs(v["measured"]) < 1e-4


def test_variation_re_z_double_pole():
    v = pr.variation(DOUBLE, ONE, RADIAL, RE_Z)
    assert v["predicted"] == pytest.approx(-1.0)
    assert abs(v["measured"] + 1.0) < 1e-3


def test_variation_is_linear_in_phi():
    v1 = pr.variation(DOUBLE, ONE, RADIAL, RE_Z)["measured"]
    v2 = pr.variation(DOUBLE, ONE, RADIAL, RE_Z * 2.0)["measured"]
    assert abs(v2 - 2 * v1) <= 1e-3 * abs(2 * v1)


def test_variation_independent_of_base_cutoff():
    phi = Jet2.from_terms({(0, 0): 0.1, (1, 0): 0.2, (0, 1): 0.2}, real=True)
    v1 = pr.variation(DOUBLE, ONE, RADIAL, phi)["measured"]
    v2 = pr.variation(DOUBLE, ONE, TILTED, phi)["measured"]
    assert abs(v1 - v2) < 1e-4


# -- boundary pairing ---------------------------------------------------------------------------
def test_boundary_pairing_constant_gamma():
    # gamma = 1 (sigma = z, m = 1): exact value 1 on every circle
    g = FunctionWithPole.simple(Jet2.z(), 1)
    assert abs(pr.boundary_pairing(g, ONE, RADIAL, 0.01) - 1) < 1e-13
    assert abs(pr.boundary_prediction(g, ONE, RADIAL) - 1) < 1e-15


def test_boundary_pairing_inverse_z_radial_is_zero():
    g = FunctionWithPole.simple(Jet2.constant(1.0), 1)
    assert abs(pr.boundary_pairing(g, ONE, RADIAL, 0.01)) < 1e-13
    assert pr.boundary_prediction(g, ONE, RADIAL) == 0


def test_boundary_pairing_smooth_vanishing_gamma():
    g = FunctionWithPole.simple(Jet2.from_terms({(1, 0): 1.0, (1, 1): 2.0}), 0)
    lim, _ = pr.boundary_limit(g, ONE, TILTED, [0.004, 0.003, 0.002, 0.001])
    assert abs(lim) < 1e-10


def test_boundary_pairing_tilted_inverse_z():
    g = FunctionWithPole.simple(Jet2.constant(1.0), 1)
    lam = CutoffSpec(Jet2.from_terms({(1, 0): 0.05, (0, 1): 0.05}, real=True))
    pred = pr.boundary_prediction(g, ONE, lam)
    assert pred == pytest.approx(0.1)
    assert abs(pr.boundary_pairing(g, ONE, lam, 1e-3) - pred) < 1e-6


def test_boundary_pairing_riemann_method_agrees_with_levelset():
    g = FunctionWithPole.simple(Jet2.from_terms({(0, 0): 1.0, (1, 0): 2.0, (0, 1): 0.5}), 2)
    for eps in (0.01, 0.02):
        a = pr.boundary_pairing(g, ONE, TILTED, eps, method="levelset")
        b = pr.boundary_pairing(g, ONE, TILTED, eps, method="riemann")
        assert abs(a - b) < 1e-10


def test_boundary_pairing_unknown_method():
    g = FunctionWithPole.simple(Jet2.constant(1.0), 1)
    with pytest.raises(ValueError):
        pr.boundary_pairing(g, ONE, RADIAL, 0.01, method="spline")


# -- Stokes ------------------------------------------------------------------------------------
def test_stokes_inverse_z():
    g = FunctionWithPole.simple(Jet2.constant(1.0), 1)
    s = pr.stokes_consistency(g, ONE, RADIAL, 0.01)
    assert abs(s["interior"] - s["boundary"]) < 1e-8


def test_stokes_smooth_gamma_is_eps_stable():
    g = FunctionWithPole.simple(Jet2.from_terms({(0, 0): 1.0, (1, 1): 3.0}), 0)
    vals = [pr.stokes_consistency(g, ONE, RADIAL, e) for e in (0.01, 0.02)]
    for s in vals:
        assert abs(s["interior"] - s["boundary"]) < 1e-8
    # both sides approach gamma(0) * conj(b(0)) = 1 as eps shrinks (O(eps**2) here)
    assert abs(vals[0]["boundary"] - 1) < 1e-3


def test_stokes_tilted_cutoff():
    g = FunctionWithPole.simple(Jet2.from_terms({(0, 0): 1.0, (0, 1): 1.0}), 1)
    s = pr.stokes_consistency(g, ONE, TILTED, 0.01)
    assert abs(s["interior"] - s["boundary"]) < 1e-6
