"""Dormand-Prince oracle."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strato.boussinesq import ModeIndex, RegimeParams, evolve_mode, initial_velocity
from strato.errors import InvalidParams
from strato.fitting import fit_decay
from strato.ode import ModeCase, OdeKind, OdeSpec, compare_closed_form, integrate
from strato.recipes import matched_ratio


def test_zero_data_stays_zero():
    traj = integrate(OdeSpec(OdeKind.BOUSSINESQ_PHI, 1, 0.3, (0.0, 0.0), B2=0.5), np.linspace(0, 10, 5))
    assert np.all(traj == 0)


def test_single_point_grid():
    case = ModeCase("boussinesq", 1, 0.5, 0.5, 1.0, 0.2)
    # the closed form rebuilds psi0 from C1 g1 + C2 g2, so only roundoff remains
    assert compare_closed_form(case, np.array([0.0])) < 1e-13


def test_fifth_order_convergence():
    spec = OdeSpec(OdeKind.BOUSSINESQ_PHI, 1, 0.5, (1.0, 0.3j), B2=0.5)
    ref = integrate(spec, np.array([0.0, 4.0]), rtol=1e-13, atol=1e-15)[-1, 0]
    errs = [abs(integrate(spec, np.array([0.0, 4.0]), fixed_step=h)[-1, 0] - ref) for h in (0.1, 0.05)]
    assert abs(math.log2(errs[0] / errs[1]) - 5.0) < 0.5


def test_matches_closed_form_at_t10():
    m, p = ModeIndex(1, 0.0), RegimeParams.from_richardson(0.5)
    spec = OdeSpec(OdeKind.BOUSSINESQ_PHI, 1, 0.0, (1.0, initial_velocity(1, 0.5, 0.0, 1.0, 0.0)), B2=0.5)
    got = integrate(spec, np.array([0.0, 10.0]))[-1, 0]
    exact = evolve_mode(m, p, 10.0, 1.0, 0.0).phi
    assert abs(got - exact) < 1e-8 * abs(exact)


def test_tolerance_refinement_converges():
    spec = OdeSpec(OdeKind.BOUSSINESQ_PHI, 2, -1.0, (0.4 + 0.1j, 0.2j), B2=3 / 16)
    t = np.array([0.0, 25.0])
    ref = integrate(spec, t, rtol=1e-13, atol=1e-15)[-1, 0]
    loose = abs(integrate(spec, t, rtol=1e-7, atol=1e-9)[-1, 0] - ref)
    tight = abs(integrate(spec, t, rtol=1e-10, atol=1e-12)[-1, 0] - ref)
    assert tight < loose


def test_batched_modes_match_single_runs():
    k = np.array([1, 2, -1])
    eta = np.array([0.0, 1.5, -2.0])
    psi0 = np.array([1.0, 0.5j, 0.3 - 0.2j])
    dpsi = np.array([0.0, 0.1, 0.2j])
    t = np.linspace(0.0, 20.0, 11)
    batch = integrate(OdeSpec(OdeKind.BOUSSINESQ_PHI, k, eta, (psi0, dpsi), B2=0.5), t)
    for i in range(3):
        one = integrate(OdeSpec(OdeKind.BOUSSINESQ_PHI, int(k[i]), eta[i], (psi0[i], dpsi[i]), B2=0.5), t)
        assert np.allclose(batch[:, 0, i], one[:, 0], rtol=1e-8, atol=1e-12)


def test_long_time_envelope_supercritical():
    # data matched to a single log-periodic branch so |phi| is a clean power of t
    p = RegimeParams.from_richardson(0.5)
    r = matched_ratio("boussinesq", p, 1)
    spec = OdeSpec(OdeKind.BOUSSINESQ_PHI, 1, 0.0, (1.0, initial_velocity(1, 0.5, 0.0, 1.0, r)), B2=0.5)
    t = np.concatenate(([0.0], np.geomspace(100.0, 1000.0, 24)))
    phi = np.abs(integrate(spec, t)[1:, 0])
    assert abs(fit_decay(t[1:], phi, (100.0, 1000.0)).alpha + 1.5) < 0.05


def test_grid_validation():
    spec = OdeSpec(OdeKind.BOUSSINESQ_PHI, 1, 0.0, (1.0, 0.0), B2=0.5)
    with pytest.raises(InvalidParams):
        integrate(spec, np.array([1.0, 2.0]))
    with pytest.raises(InvalidParams):
        integrate(spec, np.array([0.0, 2.0, 1.0]))
    with pytest.raises(InvalidParams):
        integrate(spec, np.array([0.0, 1.0]), fixed_step=0.3)
    with pytest.raises(InvalidParams):
        OdeSpec(OdeKind.BOUSSINESQ_PHI, 0, 0.0, (1.0, 0.0), B2=0.5)
    with pytest.raises(InvalidParams):
        OdeSpec(OdeKind.EULER_CHI, 1, 0.0, (1.0, 0.0), B2=0.5, beta=0.0)


@settings(max_examples=15, deadline=None)
@given(k=st.sampled_from([1, 2, -3]), eta=st.floats(-3, 3), B2=st.sampled_from([3 / 16, 0.25, 0.5]))
def test_linearity(k, eta, B2):
    t = np.linspace(0.0, 10.0, 6)
    a = integrate(OdeSpec(OdeKind.BOUSSINESQ_PHI, k, eta, (1.0, 0.0), B2=B2), t)[:, 0]
    b = integrate(OdeSpec(OdeKind.BOUSSINESQ_PHI, k, eta, (0.0, 1.0), B2=B2), t)[:, 0]
    ab = integrate(OdeSpec(OdeKind.BOUSSINESQ_PHI, k, eta, (2.0, -3.0j), B2=B2), t)[:, 0]
    assert np.allclose(ab, 2 * a - 3j * b, rtol=1e-7, atol=1e-9)
