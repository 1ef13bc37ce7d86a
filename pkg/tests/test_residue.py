import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riemres.residue import (CutoffSpec, Form1D, FunctionWithPole, HoloForm, WindowedJet,
                             exact_form, pole_reduce, res_classical, res_dolbeault,
                             res_log_pairing)
from riemres.series import Jet2, Series1
from riemres.quadrature import circle_integrate


def chi_ref(t):
    """Independent transcription of the window profile."""
    t = np.asarray(t, dtype=float)
    x = (1.0 - t) / 0.75
    out = np.where(t <= 0.25, 1.0, 0.0)
    mid = (x > 0) & (x < 1)
    xm = x[mid]
    a, b = np.exp(-1 / xm), np.exp(-1 / (1 - xm))
    out[mid] = a / (a + b)
    return out


def random_jet(rng, order, holomorphic=False):
    c = rng.normal(size=(order + 1, order + 1)) + 1j * rng.normal(size=(order + 1, order + 1))
    if holomorphic:
        c[:, 1:] = 0
    return Jet2(c)


def fd_dz(f, z, h=1e-5):
    fx = (f(z + h) - f(z - h)) / (2 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    return 0.5 * (fx - 1j * fy)


# -- Dolbeault residue ---------------------------------------------------------------
def test_res_dolbeault_examples():
    assert res_dolbeault(Form1D(1, Jet2.constant(1.0))) == 1
    assert res_dolbeault(Form1D(2, Jet2.from_terms({(0, 0): 1, (1, 0): 1}))) == 1
    assert res_dolbeault(Form1D(3, Jet2.from_terms({(0, 1): 1, (2, 0): 4}))) == 4


def test_res_dolbeault_matches_finite_difference_of_windowed_numerator():
    # (m-1)-st holomorphic derivative of P * chi at 0, by nested central differences
    P = Jet2.from_terms({(0, 0): 1, (1, 0): 1})
    alpha = Form1D(2, P)
    g = lambda z: alpha.numer(z)
    assert abs(fd_dz(g, 0.0) - res_dolbeault(alpha)) < 1e-8
    P3 = Jet2.from_terms({(0, 1): 1, (2, 0): 4})
    g3 = Form1D(3, P3).numer
    d2 = fd_dz(lambda z: fd_dz(g3, z, 1e-3), 0.0, 1e-3) / math.factorial(2)
    assert abs(d2 - 4) < 1e-6


def test_res_dolbeault_of_smooth_form_is_zero(caplog):
    with caplog.at_level("INFO"):
        assert res_dolbeault(Form1D(0, Jet2.constant(5.0))) == 0
    assert "pole order 0" in caplog.text


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 4))
def test_res_dolbeault_is_linear(seed, m):
    rng = np.random.default_rng(seed)
    a1, a2 = Form1D(m, random_jet(rng, 4)), Form1D(m, random_jet(rng, 4))
    x, y = rng.normal(size=2) + 1j * rng.normal(size=2)
    lhs = res_dolbeault(a1 * x + a2 * y)
    assert abs(lhs - (x * res_dolbeault(a1) + y * res_dolbeault(a2))) < 1e-12


def test_form_json_round_trip():
    alpha = Form1D(2, Jet2.from_terms({(0, 1): 1.5, (2, 0): -4j}), rho=0.7)
    back = Form1D.from_json(alpha.to_json())
    assert back.m == 2 and back.rho == 0.7
    assert np.array_equal(back.P.coeffs, alpha.P.coeffs)


def test_form_values_include_window():
    alpha = Form1D(1, Jet2.constant(1.0), rho=1.0)
    z = np.array([0.1, 0.6, 0.8j, 1.2])
    assert np.allclose(alpha(z), chi_ref(np.abs(z) ** 2) / z, atol=1e-13)


def test_form_validation():
    with pytest.raises(ValueError):
        Form1D(-1, Jet2.constant(1.0))
    with pytest.raises(ValueError):
        Form1D(1, Jet2.constant(1.0), rho=0.0)


# -- classical residue ---------------------------------------------------------------
def test_res_classical_examples():
    assert abs(res_classical(Form1D(1, Jet2.constant(1.0))) - 1) < 1e-14
    a = Form1D(1, Jet2.from_terms({(0, 0): 1, (1, 0): 2}))
    assert abs(res_classical(a, r=0.1) - res_dolbeault(a)) < 1e-12
    with pytest.raises(ValueError):
        res_classical(Form1D(2, Jet2.constant(1.0)))


def test_res_classical_of_conj_numerator_depends_on_radius():
    # (1/2 pi i) int zbar/z dz over |z| = r is 0 for every r (mode -2 in theta);
    # the non-closed form zbar**... with (1,1) term shows the radius dependence
    a = Form1D(1, Jet2.zbar())
    for r in (0.05, 0.1):
        assert abs(res_classical(a, r=r)) < 1e-14
    b = Form1D(1, Jet2.from_terms({(1, 1): 1.0}))
    vals = [res_classical(b, r=r) for r in (0.05, 0.1)]
    assert np.allclose(vals, [0.05 ** 2, 0.1 ** 2])
    assert res_dolbeault(b) == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_res_classical_matches_dolbeault_for_meromorphic(seed):
    rng = np.random.default_rng(seed)
    a = Form1D(1, random_jet(rng, 3, holomorphic=True))
    assert abs(res_classical(a) - res_dolbeault(a)) < 1e-10


# -- exact forms and pole reduction ---------------------------------------------------
def test_exact_form_values_match_finite_differences():
    g = FunctionWithPole.simple(Jet2.from_terms({(0, 0): 1, (0, 1): 2, (1, 1): 0.5}), 2)
    alpha = g.d()
    # include points inside the window transition, where chi' terms matter
    for z in (0.1 + 0.05j, 0.55, -0.3 + 0.5j, 0.2 - 0.7j):
        assert abs(alpha(z) - fd_dz(g, z)) < 1e-7 * max(1, abs(alpha(z)))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(0, 4))
def test_residue_of_exact_forms_vanishes(seed, m):
    rng = np.random.default_rng(seed)
    g = FunctionWithPole.simple(random_jet(rng, 3), m)
    assert abs(res_dolbeault(exact_form(g))) <= 1e-12


def test_pole_reduce_simple_pole_unchanged():
    a = Form1D(1, Jet2.from_terms({(0, 0): 2, (0, 1): 1}))
    red, gamma = pole_reduce(a)
    assert red.m == 1 and red.P.allclose(a.P)
    assert gamma.terms == ()


def test_pole_reduce_example():
    a = Form1D(2, Jet2.from_terms({(0, 0): 1, (1, 0): 1}))
    red, _ = pole_reduce(a)
    assert red.m == 1
    assert res_dolbeault(red) == res_dolbeault(a) == 1


def test_pole_reduce_drops_to_smooth_form():
    # z**2 conj(z) dz / z**2 reduces to a smooth form
    a = Form1D(2, Jet2.from_terms({(2, 1): 1.0}))
    red, _ = pole_reduce(a)
    assert red.m == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 5))
def test_pole_reduce_preserves_residue(seed, m):
    rng = np.random.default_rng(seed)
    a = Form1D(m, random_jet(rng, 5))
    red, _ = pole_reduce(a)
    assert red.m <= 1
    assert abs(res_dolbeault(red) - res_dolbeault(a)) <= 1e-12 * max(1, abs(res_dolbeault(a)))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(2, 4))
def test_pole_reduce_identity_pointwise(seed, m):
    rng = np.random.default_rng(seed)
    a = Form1D(m, random_jet(rng, 3))
    red, gamma = pole_reduce(a)
    dg = gamma.d()
    t = rng.uniform(0.25, 0.5, size=20)
    z = np.sqrt(t) * np.exp(2j * np.pi * rng.uniform(size=20))
    diff = a(z) - red(z) - dg(z)
    assert np.abs(diff).max() <= 1e-9 * max(1.0, np.abs(a(z)).max())


def test_windowed_jet_requires_common_rho():
    a = WindowedJet((Jet2.constant(1.0),), 1.0)
    b = WindowedJet((Jet2.constant(1.0),), 0.5)
    with pytest.raises(ValueError):
        a + b


# -- log pairing residue --------------------------------------------------------------
def test_res_log_pairing_examples():
    radial = CutoffSpec.radial()
    rng = np.random.default_rng(4)
    for m in (1, 2, 3):
        sigma = random_jet(rng, 4)
        g = FunctionWithPole.simple(sigma, m)
        assert abs(res_log_pairing(g, radial) - 0.5 * sigma[m, 0]) < 1e-14
    smooth = FunctionWithPole.simple(Jet2.from_terms({(0, 0): 3.0, (1, 1): 1.0}), 0)
    assert abs(res_log_pairing(smooth, radial) - 1.5) < 1e-14
    re_z = CutoffSpec(Jet2.from_terms({(1, 0): 0.5, (0, 1): 0.5}, real=True))
    inv_z = FunctionWithPole.simple(Jet2.constant(1.0), 1)
    assert abs(res_log_pairing(inv_z, re_z) - 0.5) < 1e-14


# -- cut-off and holomorphic forms -----------------------------------------------------
def test_cutoff_validation_and_values():
    with pytest.raises(ValueError):
        CutoffSpec(Jet2.from_terms({(1, 0): 1.0}))
    lam = CutoffSpec(Jet2.from_terms({(0, 0): 0.2}))
    assert lam(0.1j) == pytest.approx(0.1 * np.exp(0.2))
    lam2 = lam.times_exp(Jet2.constant(0.3))
    assert lam2(0.1) == pytest.approx(0.1 * np.exp(0.5))


def test_holo_form_json_and_residue():
    beta = HoloForm(Series1([2 - 1j, 0.5]))
    assert beta.residue == 2 - 1j
    back = HoloForm.from_json(beta.to_json())
    assert np.array_equal(back.b.coeffs, beta.b.coeffs)
    assert abs(beta(0.1) - (2 - 1j + 0.05) / 0.1) < 1e-13


def test_cutoff_json_round_trip():
    lam = CutoffSpec(Jet2.from_terms({(1, 0): 0.05, (0, 1): 0.05}, real=True))
    back = CutoffSpec.from_json(lam.to_json())
    assert np.array_equal(back.eta.coeffs, lam.eta.coeffs)


def test_circle_integral_oracle_for_classical_residue():
    # independent: residue of (1 + 2z) / z via direct quadrature of the dz coefficient
    val = circle_integrate(lambda z: (1 + 2 * z) / z, 0.1, mode="dz") / (2j * np.pi)
    assert abs(val - 1) < 1e-14
