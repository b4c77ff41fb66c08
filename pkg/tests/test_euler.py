"""Full Euler weighted mode evolution.

Special-solution reference values come from mpmath.hyp2f1 at 30 digits with
k = 1, beta = 1/2, B^2 = 1/2 (kappa = 1/sqrt(1.0625), beta1 = kappa / 4).
"""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strato.boussinesq import ModeIndex, RegimeParams, evolve_mode
from strato.errors import InvalidMode, InvalidParams
from strato.euler import (EulerModeParams, asymptotic_fit_residual, euler_mode_coefficients, euler_special_solutions,
                          evolve_euler_mode, weighted_initial_velocity, wronskian)
from strato.ode import ModeCase, OdeKind, OdeSpec, compare_closed_form, integrate

G3_0 = 2.62635983709502302015665203405
G4_0 = 8.64285102388802105980076640357
G3_S3 = complex(-0.135260753663926289446960958927, 0.567140745198744092462310613974)
G4_S3 = complex(-0.356688191963909151765021800924, 1.35252063274211426209639975672)
G3_HALF_PLUS_5I = complex(-0.0734911250162874400278622884444, 0.0729616869212047008131732111878)

complexes = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


@pytest.fixture
def params():
    return EulerModeParams(1, 0.0, 0.5, 0.5)


def test_special_solutions_against_frozen_values(params):
    g3, g4, _, _ = euler_special_solutions(params, 0.0)
    assert abs(g3 - G3_0) < 1e-12 and abs(g4 - G4_0) < 1e-11
    g3, g4, _, _ = euler_special_solutions(params, 3.0)
    assert abs(g3 - G3_S3) < 1e-11 and abs(g4 - G4_S3) < 1e-11


def test_half_line_value_by_ode_continuation(params):
    # carry (g3, g3') from s = 0 along the mode equation to v = 1/2 + 5i
    g3, _, dg3, _ = euler_special_solutions(params, 0.0)
    s_end = 10.0 / params.kappa
    traj = integrate(OdeSpec(OdeKind.EULER_CHI, 1, 0.0, (g3, dg3), B2=0.5, beta=0.5), np.array([0.0, s_end]),
                     rtol=1e-12, atol=1e-14)
    assert abs(traj[-1, 0] - G3_HALF_PLUS_5I) < 1e-8
    assert abs(euler_special_solutions(params, s_end)[0] - G3_HALF_PLUS_5I) < 1e-10


def test_wronskian_value_at_zero(params):
    g3, g4, dg3, dg4 = euler_special_solutions(params, 0.0)
    expected = 8j * params.kappa * (params.beta1 - 1)
    assert abs(wronskian(params, 0.0) - expected) < 1e-13
    assert abs(g3 * dg4 - dg3 * g4 - expected) < 1e-10


@pytest.mark.parametrize("B2", [3 / 16, 0.5, 2.0])
def test_wronskian_closed_form_along_s(B2):
    p = EulerModeParams(2, 0.3, 0.5, B2)
    s = np.linspace(-30, 30, 41)
    g3, g4, dg3, dg4 = euler_special_solutions(p, s)
    W = wronskian(p, s)
    assert np.max(np.abs(g3 * dg4 - dg3 * g4 - W) / np.abs(W)) < 1e-8


def test_inverse_wronskian_growth_bound():
    # |W(s0)|^-1 = (1 + kappa^2 s0^2)^2 / (8 kappa (1 - beta1)) <= <s0>^4 / (8 kappa (1 - beta1))
    for k in (1, 2, 5):
        eta = np.linspace(-50, 50, 201)
        p = EulerModeParams(k, eta, 0.5, 0.5)
        C = 1.0 / (8 * p.kappa * (1 - p.beta1))
        ratio = 1.0 / np.abs(wronskian(p)) / (1 + p.s0**2) ** 2
        assert np.max(ratio) <= C * (1 + 1e-12)


@pytest.mark.parametrize("B2", [3 / 16, 0.5])
def test_large_s_exponents(B2):
    p = EulerModeParams(1, 0.0, 0.5, B2)
    s = np.geomspace(30, 50, 20)
    assert asymptotic_fit_residual(p, s, 3) < 0.03
    assert asymptotic_fit_residual(p, s, 4) < 0.03


@settings(max_examples=30, deadline=None)
@given(B2=st.sampled_from([3 / 16, 0.5, 1.5]), k=st.sampled_from([-2, -1, 1, 3]), eta=st.floats(-10, 10),
       Psi0=complexes, U0=complexes)
def test_reconstruction(B2, k, eta, Psi0, U0):
    p = EulerModeParams(k, eta, 0.5, B2)
    C3, C4 = euler_mode_coefficients(p, Psi0, U0)
    g3, g4, dg3, dg4 = euler_special_solutions(p, p.s0)
    scale = 1 + abs(Psi0) + abs(U0)
    assert abs(C3 * g3 + C4 * g4 - Psi0) < 1e-11 * scale * max(1.0, abs(C3 * g3), abs(C4 * g4))
    assert abs(C3 * dg3 + C4 * dg4 - weighted_initial_velocity(p, Psi0, U0)) < 1e-10 * scale * (1 + abs(p.s0)) ** 2
    st0 = evolve_euler_mode(p, 0.0, Psi0, U0)
    assert abs(st0.chi - Psi0) < 1e-10 * scale
    assert abs(st0.mu - U0) < 1e-9 * scale


def test_zero_data_stays_zero(params):
    st_ = evolve_euler_mode(params, np.linspace(0, 50, 11), 0.0, 0.0)
    assert np.all(st_.chi == 0) and np.all(st_.mu == 0)


@pytest.mark.parametrize("B2", [3 / 16, 0.5])
def test_oracle_agreement(B2, rng):
    t = np.linspace(0.0, 100.0, 101)
    for _ in range(3):
        case = ModeCase("euler", int(rng.choice([-2, 1, 2])), float(rng.uniform(-5, 5)), B2,
                        complex(*rng.normal(size=2)), complex(*rng.normal(size=2)), 0.5)
        assert compare_closed_form(case, t) < 1e-6


def test_critical_uses_oracle_path():
    p = EulerModeParams(1, 0.5, 0.5, 0.25)
    assert p.critical
    st_ = evolve_euler_mode(p, np.array([0.0, 5.0]), 1.0, 0.5)
    assert abs(st_.chi[0] - 1.0) < 1e-12


def test_small_beta_continuity():
    t = np.linspace(0.0, 20.0, 41)
    for k, eta in ((1, 0.0), (2, 1.5)):
        e = evolve_euler_mode(EulerModeParams(k, eta, 1e-3, 0.5), t, 1.0, 0.5j).chi
        b = evolve_mode(ModeIndex(k, eta), RegimeParams.from_richardson(0.5), t, 1.0, 0.5j).phi
        assert np.max(np.abs(e - b)) / np.max(np.abs(b)) < 1e-3


def test_weighted_envelope_bounded():
    s = np.geomspace(1.0, 1e3, 40)
    for B2, power in ((3 / 16, 1.5 - 0.25), (0.5, 1.5)):
        st_ = evolve_euler_mode(EulerModeParams(1, 0.0, 0.5, B2), s, 1.0, 0.5)
        assert np.max(np.abs(st_.chi) * (1 + s * s) ** (power / 2)) < 20.0


@settings(max_examples=20, deadline=None)
@given(k=st.sampled_from([1, 2]), eta=st.floats(-5, 5), Psi0=complexes, U0=complexes)
def test_hermitian_pairs(k, eta, Psi0, U0):
    t = np.linspace(0.0, 30.0, 7)
    a = evolve_euler_mode(EulerModeParams(k, eta, 0.5, 0.5), t, Psi0, U0)
    b = evolve_euler_mode(EulerModeParams(-k, -eta, 0.5, 0.5), t, np.conj(Psi0), np.conj(U0))
    assert np.allclose(a.chi, np.conj(b.chi), rtol=1e-10, atol=1e-13)


def test_invalid_parameters():
    with pytest.raises(InvalidMode):
        EulerModeParams(0, 0.0, 0.5, 0.5)
    with pytest.raises(InvalidMode):
        EulerModeParams(1, 0.0, 0.0, 0.5)
    with pytest.raises(InvalidParams):
        EulerModeParams(1, 0.0, 0.5, 0.0)
