"""No-shear internal gravity waves and the oscillatory integral."""
from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strato.boussinesq import RegimeParams
from strato.dispersive import (SQRT3_GAMMA_THIRD, DispersionParams, SharpnessGeometry, conservation_drift, dispersion,
                               evolve_no_shear_mode, gk_integrate, lemma_envelope, mode_energy, oscillatory_integral,
                               sharpness_profile, sharpness_value, stationary_points, sup_abs_integral,
                               truncated_power_integral, vdc_bound_check)
from strato.errors import BadWindow, InvalidMode, InvalidParams, NotConvex
from strato.field import GridSpec, Model, ingest_initial_data
from strato.fitting import fit_decay
from strato.recipes import gaussian_packet

# sqrt(3) Gamma(1/3) from mpmath at 30 digits
SQRT3_GAMMA_THIRD_REF = 4.64005765246793910117660966777

complexes = st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False)


def test_limit_constant():
    assert abs(SQRT3_GAMMA_THIRD - SQRT3_GAMMA_THIRD_REF) < 1e-13


@pytest.mark.parametrize("k, eta, p, expected", [
    (1, 0.0, DispersionParams(1.0), 1.0),
    (1, 1.0, DispersionParams(1.0), 1 / math.sqrt(2)),
    (1, 0.0, DispersionParams(1.0, beta=2.0, model="full_euler"), 1 / math.sqrt(2)),
])
def test_dispersion_examples(k, eta, p, expected):
    assert dispersion(k, eta, p) == pytest.approx(expected, rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(k=st.integers(-20, 20).filter(bool), eta=st.floats(-1e3, 1e3), N=st.floats(0.1, 10.0))
def test_frequency_below_buoyancy(k, eta, N):
    lam = dispersion(k, eta, DispersionParams(N))
    assert 0 < lam <= N * (1 + 1e-15)


def test_dispersion_rejects_zero_mode():
    with pytest.raises(InvalidMode):
        dispersion(0, 1.0, DispersionParams(1.0))


def test_single_branch_is_a_phase_rotation():
    p = DispersionParams(1.3)
    k, eta, psi0 = 2, 0.7, 0.4 - 0.3j
    lam = dispersion(k, eta, p)
    for t in (0.0, 1.0, 17.5, 1e3):
        psi, _ = evolve_no_shear_mode(k, eta, p, t, psi0, k / lam * psi0)
        assert abs(psi - psi0 * cmath.exp(1j * lam * t)) < 1e-12
        assert abs(abs(psi) - abs(psi0)) < 1e-12


def test_initial_time_returns_data():
    psi, T = evolve_no_shear_mode(1, 0.3, DispersionParams(1.0), 0.0, 0.2 + 0.1j, 0.5)
    assert abs(psi - (0.2 + 0.1j)) < 1e-15 and abs(T - 0.5) < 1e-15


@settings(max_examples=40, deadline=None)
@given(k=st.sampled_from([-3, -1, 1, 2, 5]), eta=st.floats(-20, 20), psi0=complexes, T0=complexes,
       t=st.floats(0, 1e3), weighted=st.booleans())
def test_mode_energy_conserved(k, eta, psi0, T0, t, weighted):
    p = DispersionParams(1.0, 0.5, "full_euler") if weighted else DispersionParams(1.0)
    e0 = mode_energy(k, eta, p, psi0, T0)
    psi, T = evolve_no_shear_mode(k, eta, p, t, psi0, T0)
    assert abs(mode_energy(k, eta, p, psi, T) - e0) <= 1e-12 * max(e0, 1e-300)


def test_global_energy_conserved():
    grid = GridSpec(16, 512, 40.0)
    pk = gaussian_packet(grid, 2, 2.0, 1.0, 0.5)
    fld = ingest_initial_data(grid, pk.psi0, pk.rho0, Model.NO_SHEAR, RegimeParams(R=0.0, beta=1.0, g=1.0))
    assert conservation_drift(fld, DispersionParams(1.0), np.linspace(0, 1e3, 21)) < 1e-10


def test_gk_integrate_polynomial_and_oscillatory():
    val, err = gk_integrate(lambda x: x**5, [0.0, 1.0])
    assert val == pytest.approx(1 / 6, rel=1e-14) and err < 1e-8
    val, _ = gk_integrate(lambda x: np.exp(1j * 50 * x), np.linspace(0, 1, 9))
    assert abs(val - (cmath.exp(50j) - 1) / 50j) < 1e-12


def test_small_time_limit():
    assert abs(oscillatory_integral(1, 1.0, 1e-6, 0.0, 1.0) - 2.0) < 1e-5


def test_integral_preconditions():
    with pytest.raises(InvalidParams):
        oscillatory_integral(1, 1.0, 10.0, 0.0, 0.5)
    with pytest.raises(InvalidParams):
        oscillatory_integral(1, 1.0, 0.0, 0.0, 4.0)


def test_stationary_points_solve_phase_equation():
    k, N, t, y = 1, 1.0, 100.0, 20.0
    for eta in stationary_points(k, N, t, y, -8.0, 8.0):
        lam_prime = -abs(k) * N * eta / (k * k + eta * eta) ** 1.5
        assert abs(lam_prime * t + y) < 1e-8


def test_caustic_ray_rate():
    t = np.geomspace(1e2, 1e4, 10)
    for k in (1, 2):
        c = 2.0 / (3 * math.sqrt(3) * k)
        vals = [abs(oscillatory_integral(k, 1.0, tt, -c * tt, 8.0)) for tt in t]
        assert abs(fit_decay(t, vals, (t[0], t[-1])).alpha + 1 / 3) < 0.03
        scaled = np.asarray(vals) * t ** (1 / 3)
        assert np.ptp(scaled[-4:]) < 0.05 * np.mean(scaled[-4:])


def test_off_ray_decay_is_faster():
    t = np.geomspace(1e2, 1e4, 10)
    for k in (1, 2):
        vals = [abs(oscillatory_integral(k, 1.0, tt, 1.5 * tt / k, 8.0)) for tt in t]
        assert fit_decay(t, vals, (t[0], t[-1])).alpha < -0.5


def test_envelope_ratio_finite():
    for t in (10.0, 100.0):
        sup, _ = sup_abs_integral(1, 1.0, t, 8.0)
        assert 0.5 < sup / lemma_envelope(1, 1.0, t, 8.0) < 2.5


def test_vdc_linear_phase_exact():
    M = 30.0
    x = np.linspace(0.0, 1.0, 4001)
    holds, lhs, rhs = vdc_bound_check(x, M * x, "first")
    assert holds
    assert lhs == pytest.approx(abs((cmath.exp(1j * M) - 1) / M), rel=1e-6)
    assert rhs == pytest.approx(2 / M, rel=1e-9)


@pytest.mark.parametrize("M", [10.0, 100.0])
def test_vdc_quadratic_phase(M):
    x = np.linspace(-1.0, 1.0, 4001)
    holds, _, rhs = vdc_bound_check(x, M * x * x, "second")
    assert holds
    assert rhs == pytest.approx(4 / math.sqrt(2 * M), rel=1e-6)


def test_vdc_rejects_mixed_convexity():
    x = np.linspace(-1.0, 1.0, 401)
    with pytest.raises(NotConvex):
        vdc_bound_check(x, np.sin(8 * x), "first")


@pytest.mark.parametrize("k, N", [(1.0, 1.0), (2.0, 1.5)])
def test_sharpness_geometry(k, N):
    geo = SharpnessGeometry(k, N)
    assert abs(geo.dg(geo.eta_star)) < 1e-10
    assert abs(geo.d2g(geo.eta_star)) < 1e-10
    assert geo.d3g(geo.eta_star) == pytest.approx(N / k**3 * 16 / 27 * math.sqrt(3), rel=1e-9)
    assert geo.g3_exact == pytest.approx(N / k**3 * 16 / 27 * math.sqrt(3), rel=1e-12)


def test_sharpness_two_routes_agree():
    for t in (1e2, 1e3):
        rep = sharpness_profile(times=(t,))
        assert abs(rep.values[0] / rep.u_route[0] - 1) < 1e-8


def test_sharpness_limit_by_1e4():
    rep = sharpness_profile(times=(1e4,))
    assert abs(rep.values[0] / SQRT3_GAMMA_THIRD - 1) < 0.05


def test_truncated_power_integral_tends_to_limit():
    # the tails beyond |xi| = A contribute O(A^(-2/3))
    assert abs(truncated_power_integral(-1e4, 1e4, 1.0) / SQRT3_GAMMA_THIRD - 1) < 0.01


def test_sharpness_window_checked():
    for delta in (0.0, -0.1, math.inf):
        with pytest.raises(BadWindow):
            sharpness_value(1.0, 1.0, delta, 100.0)
