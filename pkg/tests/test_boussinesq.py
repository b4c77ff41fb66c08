"""Closed-form Boussinesq mode evolution."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strato.boussinesq import (ModeIndex, Regime, RegimeParams, asymptotic_solutions, classify, envelope_bound_ratio,
                               evolve_mode, evolve_mode_homogeneous, initial_velocity, mode_coefficients,
                               special_solutions)
from strato.errors import InvalidMode, InvalidParams
from strato.ode import ModeCase, compare_closed_form

B2_VALUES = (3 / 16, 0.25, 0.5)
complexes = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("B2, regime", [(3 / 16, Regime.SUBCRITICAL), (0.25, Regime.CRITICAL),
                                        (0.5, Regime.SUPERCRITICAL), (0.0, Regime.HOMOGENEOUS)])
def test_classify(B2, regime):
    assert classify(B2) is regime


def test_special_solutions_at_origin():
    for B2 in B2_VALUES:
        g1, g2, dg1, dg2 = special_solutions(RegimeParams.from_richardson(B2).nu, 0.0)
        assert (g1, g2, dg1, dg2) == pytest.approx((1, 0, 0, 1), abs=1e-15)


@pytest.mark.parametrize("B2", B2_VALUES)
def test_wronskian_is_rational(B2):
    s = np.concatenate((-np.geomspace(1e-3, 1e3, 30), np.geomspace(1e-3, 1e3, 30)))
    g1, g2, dg1, dg2 = special_solutions(RegimeParams.from_richardson(B2).nu, s)
    W = g1 * dg2 - dg1 * g2
    assert np.max(np.abs(W * (1 + s * s) ** 2 - 1)) < 1e-8


@pytest.mark.parametrize("B2", B2_VALUES)
def test_large_s_forms(B2):
    nu = RegimeParams.from_richardson(B2).nu
    exact = special_solutions(nu, 50.0)
    approx = asymptotic_solutions(nu, 50.0)
    for e, a in zip(exact, approx):
        assert abs(e - a) <= 0.02 * abs(e)


def test_coefficients_at_zero_shift():
    p = RegimeParams.from_richardson(3 / 16)
    C1, C2 = mode_coefficients(ModeIndex(1, 0.0), p, 1.0, 0.0)
    assert C1 == pytest.approx(1.0) and abs(C2) < 1e-15
    C1, C2 = mode_coefficients(ModeIndex(1, 0.0), p, 0.0, 1.0)
    assert abs(C1) < 1e-15 and C2 == pytest.approx(0.1875j)


@settings(max_examples=40, deadline=None)
@given(B2=st.sampled_from(B2_VALUES), k=st.sampled_from([-3, -1, 1, 2]), eta=st.floats(-20, 20),
       psi0=complexes, T0=complexes)
def test_reconstruction_at_t0(B2, k, eta, psi0, T0):
    p = RegimeParams.from_richardson(B2)
    m = ModeIndex(k, eta)
    s0 = -eta / k
    C1, C2 = mode_coefficients(m, p, psi0, T0)
    g1, g2, dg1, dg2 = special_solutions(p.nu, s0)
    scale = 1.0 + abs(psi0) + abs(T0)
    assert abs(C1 * g1 + C2 * g2 - psi0) < 1e-10 * scale
    assert abs(C1 * dg1 + C2 * dg2 - initial_velocity(k, B2, s0, psi0, T0)) < 1e-10 * scale
    st0 = evolve_mode(m, p, 0.0, psi0, T0)
    assert abs(st0.phi - psi0) < 1e-10 * scale
    assert abs(st0.tau - T0) < 1e-9 * scale


@pytest.mark.parametrize("B2", B2_VALUES)
def test_oracle_agreement(B2, rng):
    t = np.linspace(0.0, 100.0, 101)
    for _ in range(4):
        case = ModeCase("boussinesq", int(rng.choice([-2, -1, 1, 3])), float(rng.uniform(-5, 5)), B2,
                        complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))
        assert compare_closed_form(case, t) < 1e-6


@settings(max_examples=25, deadline=None)
@given(B2=st.sampled_from(B2_VALUES), k=st.sampled_from([1, 2, 3]), eta=st.floats(-5, 5), psi0=complexes,
       T0=complexes)
def test_hermitian_pairs(B2, k, eta, psi0, T0):
    p = RegimeParams.from_richardson(B2)
    t = np.linspace(0.0, 40.0, 9)
    a = evolve_mode(ModeIndex(k, eta), p, t, psi0, T0)
    b = evolve_mode(ModeIndex(-k, -eta), p, t, np.conj(psi0), np.conj(T0))
    assert np.allclose(a.phi, np.conj(b.phi), rtol=1e-12, atol=1e-14)
    assert np.allclose(a.tau, np.conj(b.tau), rtol=1e-12, atol=1e-14)


def test_velocity_components():
    p = RegimeParams.from_richardson(0.5)
    m = ModeIndex(2, 1.0)
    st_ = evolve_mode(m, p, 3.0, 1.0, 0.2j)
    s = 3.0 - 0.5
    assert st_.vy == pytest.approx(2j * st_.phi)
    assert st_.vx == pytest.approx(s * st_.vy)


def test_homogeneous_zero_density():
    m = ModeIndex(1, 1.0)
    t = np.linspace(0.0, 20.0, 5)
    st_ = evolve_mode_homogeneous(m, t, 1.0, 0.0)
    s0, s = -1.0, t - 1.0
    assert np.allclose(st_.phi, (1 + s0 * s0) / (1 + s * s), rtol=1e-14)


def test_homogeneous_matches_weak_stratification_limit():
    # the general solution with B^2 -> 0 (T = rho / beta) tends to the homogeneous one
    m = ModeIndex(2, 0.7)
    t = np.linspace(0.0, 30.0, 31)
    weak = evolve_mode(m, RegimeParams(R=1.0, beta=1e-8, g=1.0), t, 0.4 + 0.1j, (0.3 - 0.2j) / 1e-8).phi
    exact = evolve_mode_homogeneous(m, t, 0.4 + 0.1j, 0.3 - 0.2j).phi
    assert np.max(np.abs(weak - exact)) < 1e-7 * np.max(np.abs(exact))


def test_homogeneous_against_oracle():
    case = ModeCase("boussinesq", 1, 1.0, 0.0, 1.0, 1.0)
    assert compare_closed_form(case, np.linspace(0.0, 3.0, 31)) < 1e-8


def test_envelope_ratio_stable_under_horizon_doubling():
    p = RegimeParams.from_richardson(0.5)
    m = ModeIndex(1, 0.0)
    short = envelope_bound_ratio(m, p, np.linspace(0, 100, 201), 1.0, 0.5)
    long = envelope_bound_ratio(m, p, np.linspace(0, 400, 801), 1.0, 0.5)
    assert long <= short * (1 + 1e-9)
    assert envelope_bound_ratio(m, p, [0.0, 10.0], 0.0, 0.0) == 0.0


@pytest.mark.parametrize("B2", B2_VALUES)
def test_envelope_ratio_bounded(B2):
    p = RegimeParams.from_richardson(B2)
    t = np.geomspace(1e-2, 1e3, 60)
    for k, eta in ((1, 0.0), (2, -3.0), (-1, 4.0)):
        assert envelope_bound_ratio(ModeIndex(k, eta), p, t, 1.0, 0.5) < 10.0


def test_supercritical_amplitude_bounded():
    s = np.geomspace(1.0, 1e3, 50)
    st_ = evolve_mode(ModeIndex(1, 0.0), RegimeParams.from_richardson(0.5), s, 1.0, 0.5)
    weighted = np.abs(st_.phi) * (1 + s * s) ** 0.75
    assert np.max(weighted) < 5.0


def test_zero_mode_rejected():
    with pytest.raises(InvalidMode):
        evolve_mode(ModeIndex(0, 1.0), RegimeParams.from_richardson(0.5), 1.0, 1.0, 0.0)
    with pytest.raises(InvalidMode):
        evolve_mode_homogeneous(ModeIndex(0, 1.0), 1.0, 1.0, 0.0)


def test_closed_form_needs_stratification():
    with pytest.raises(InvalidParams):
        mode_coefficients(ModeIndex(1, 0.0), RegimeParams(R=1.0, beta=0.0, g=1.0), 1.0, 0.0)
