"""Invariant suites behind ``strato validate``.

Every suite returns a list of :class:`Check` records (name, measured value,
threshold, pass flag).  Random inputs come from a seeded generator so runs are
reproducible.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import hypergeometric as hg
from .hypergeometric import EvalDomain, HypParams

SUITES = ("hyp", "ode", "boussinesq", "euler", "dispersive")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    value: float
    threshold: float
    passed: bool

    def to_dict(self):
        return asdict(self)


def _check(suite, name, value, threshold, below=True):
    value = float(value)
    ok = value < threshold if below else value > threshold
    return Check(suite, name, value, float(threshold), bool(ok and math.isfinite(value)))


def _rel(a, b):
    return np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(np.asarray(b)), 1e-300)


# --------------------------------------------------------------------------
# hypergeometric identities


def contiguous_residual(rng, n=100):
    worst = 0.0
    for _ in range(n):
        a = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        b = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        c = complex(rng.uniform(0.3, 3.0), rng.uniform(-0.5, 0.5))
        r = rng.uniform(0.05, hg.R_SERIES)
        z = r * complex(math.cos(th := rng.uniform(0, 2 * math.pi)), math.sin(th))
        d = hg.contiguous_derivatives(HypParams(a, b, c), z, EvalDomain.CONVERGENCE_DISK)
        scale = max(abs(v) for v in d)
        worst = max(worst, max(abs(d[i] - d[j]) for i in range(3) for j in range(i)) / scale)
    return worst


def pfaff_residual():
    worst = 0.0
    z = np.linspace(-0.7, 0.4, 23)
    for nu in (0.25, 0.1, 0.5j, 0.3 + 0.2j):
        for p in (HypParams.boussinesq(nu, 1), HypParams.boussinesq(nu, 2)):
            direct = np.asarray(hg.f21_series(p, z))
            for form in hg.pfaff_values(p, z):
                worst = max(worst, float(np.max(_rel(form, direct))))
    return worst


def euler_transform_residual():
    worst = 0.0
    z = -np.geomspace(1e-3, 1e3, 61)
    for nu in (0.25, 0.1, 0.5j):
        for which in (1, 2):
            p = HypParams.boussinesq(nu, which)
            worst = max(worst, float(np.max(_rel(hg.euler_transform_value(p, z), hg.f21(p, z)))))
    return worst


def conjugate_symmetry_residual():
    z = -np.geomspace(1e-3, 1e3, 61)
    worst = 0.0
    for nu in (0.5j, 1.5j):
        for which in (1, 2):
            val = np.asarray(hg.f21(HypParams.boussinesq(nu, which), z))
            worst = max(worst, float(np.max(np.abs(val.imag) / np.maximum(np.abs(val), 1.0))))
    return worst


def wronskian_sweep():
    s = np.geomspace(1e-3, 1e3, 61)
    z = -(s**2)
    worst = 0.0
    for nu in (0.25, 0.1, 0.5j):
        worst = max(worst, hg.wronskian_residual(HypParams.boussinesq(nu, 1), z))
    return worst


def suite_hyp(rng):
    out = [
        _check("hyp", "contiguous relation residual", contiguous_residual(rng), 1e-9),
        _check("hyp", "Pfaff consistency", pfaff_residual(), 1e-10),
        _check("hyp", "Euler transform consistency", euler_transform_residual(), 1e-10),
        _check("hyp", "Gauss formula F(1/2,1/2;2;1) vs 4/pi",
               abs(hg.f21_at_one(HypParams(0.5, 0.5, 2.0)) - 4 / math.pi), 1e-12),
        _check("hyp", "conjugate-parameter imaginary part", conjugate_symmetry_residual(), 1e-12),
        _check("hyp", "Wronskian residual on z = -s^2", wronskian_sweep(), 1e-8),
        _check("hyp", "Wronskian residual, shifted family at z = 1/2",
               hg.wronskian_residual(HypParams.euler(0.25, 0.3, 3), 0.5 + 0j, EvalDomain.CONVERGENCE_DISK), 1e-9),
    ]
    return out


# --------------------------------------------------------------------------
# ODE oracle


def suite_ode(rng):
    from .boussinesq import ModeIndex, evolve_mode_homogeneous
    from .ode import OdeKind, OdeSpec, integrate

    out = []
    # B^2 = 0: the rational closed form is an independent reference
    t = np.linspace(0.0, 50.0, 101)
    k, eta, psi0, rho0 = 2, 1.3, 0.7 - 0.2j, 0.4 + 0.5j
    traj = integrate(OdeSpec(OdeKind.BOUSSINESQ_SYSTEM, k, eta, (psi0, rho0), g=1.0, beta=0.0), t)
    exact = evolve_mode_homogeneous(ModeIndex(k, eta), t, psi0, rho0).phi
    out.append(_check("ode", "homogeneous oracle vs rational solution", float(np.max(_rel(traj[:, 0], exact))), 1e-8))
    # fifth-order convergence of the fixed-step march
    spec = OdeSpec(OdeKind.BOUSSINESQ_PHI, 1, 0.5, (1.0, 0.3j), B2=0.5)
    ref = integrate(spec, np.array([0.0, 4.0]), rtol=1e-13, atol=1e-15)[-1, 0]
    errs = [abs(integrate(spec, np.array([0.0, 4.0]), fixed_step=h)[-1, 0] - ref) for h in (0.1, 0.05)]
    order = math.log2(errs[0] / errs[1])
    out.append(_check("ode", "fixed-step order deviation from 5", abs(order - 5.0), 0.5))
    # the two Boussinesq formulations agree
    B2 = 0.5
    sys_spec = OdeSpec(OdeKind.BOUSSINESQ_SYSTEM, 1, 0.4, (0.3, 0.2j), g=1.0, beta=B2)
    from .boussinesq import initial_velocity

    T0 = 0.2j / B2  # T = rho / beta with R = 1
    phi_spec = OdeSpec(OdeKind.BOUSSINESQ_PHI, 1, 0.4, (0.3, initial_velocity(1, B2, -0.4, 0.3, T0)), B2=B2)
    a = integrate(sys_spec, t)[:, 0]
    b = integrate(phi_spec, t)[:, 0]
    out.append(_check("ode", "vorticity-density system vs second-order form",
                      float(np.max(np.abs(a - b)) / np.max(np.abs(b))), 1e-8))
    return out


# --------------------------------------------------------------------------
# closed forms vs oracle


def random_modes(rng, n):
    k = rng.choice([-3, -2, -1, 1, 2, 3], size=n)
    eta = rng.uniform(-5.0, 5.0, size=n)
    psi0 = rng.normal(size=n) + 1j * rng.normal(size=n)
    T0 = rng.normal(size=n) + 1j * rng.normal(size=n)
    return k, eta, psi0, T0


def oracle_equivalence(rng, model, B2, beta=0.0, n=20, t_max=100.0):
    from .ode import ModeCase, compare_closed_form

    t = np.linspace(0.0, t_max, 201)
    worst = 0.0
    for k, eta, psi0, T0 in zip(*random_modes(rng, n)):
        case = ModeCase(model, int(k), float(eta), B2, complex(psi0), complex(T0), beta)
        worst = max(worst, compare_closed_form(case, t))
    return worst


def suite_boussinesq(rng):
    from .boussinesq import ModeIndex, RegimeParams, evolve_mode

    out = [_check("boussinesq", f"closed form vs oracle, B2 = {B2:g}", oracle_equivalence(rng, "boussinesq", B2), 1e-6)
           for B2 in (3 / 16, 0.25, 0.5)]
    # t = 0 reproduces the data
    p = RegimeParams.from_richardson(0.5)
    st = evolve_mode(ModeIndex(2, -1.5), p, 0.0, 0.3 + 0.1j, -0.2 + 0.4j)
    out.append(_check("boussinesq", "t = 0 identity", max(abs(st.phi - (0.3 + 0.1j)), abs(st.tau - (-0.2 + 0.4j))), 1e-12))
    out.append(_check("boussinesq", "homogeneous closed form vs oracle", oracle_equivalence(rng, "boussinesq", 0.0), 1e-6))
    return out


def beta_continuity(beta=1e-3, B2=0.5):
    """max relative gap between weighted full Euler and Boussinesq stream amplitudes for small beta."""
    from .boussinesq import ModeIndex, RegimeParams, evolve_mode
    from .euler import EulerModeParams, evolve_euler_mode

    t = np.linspace(0.0, 50.0, 51)
    worst = 0.0
    for k, eta in ((1, 0.0), (2, 1.5), (-1, 0.7)):
        e = evolve_euler_mode(EulerModeParams(k, eta, beta, B2), t, 1.0, 0.5j).chi
        b = evolve_mode(ModeIndex(k, eta), RegimeParams.from_richardson(B2), t, 1.0, 0.5j).phi
        worst = max(worst, float(np.max(np.abs(e - b)) / np.max(np.abs(b))))
    return worst


def suite_euler(rng):
    out = [_check("euler", f"closed form vs oracle, B2 = {B2:g}", oracle_equivalence(rng, "euler", B2, beta=0.5), 1e-6)
           for B2 in (3 / 16, 0.5)]
    out.append(_check("euler", "small-beta continuity with Boussinesq (beta = 1e-3)", beta_continuity(), 1e-3))
    return out


# --------------------------------------------------------------------------
# no shear


def suite_dispersive(rng, quick=False):
    from .dispersive import (SQRT3_GAMMA_THIRD, DispersionParams, evolve_no_shear_mode, lemma_envelope_sweep,
                             mode_energy_drift, sharpness_profile, vdc_bound_check)

    out = []
    p = DispersionParams(N=1.0)
    k, eta, psi0, T0 = random_modes(rng, 50)
    times = np.linspace(0.0, 1e3, 101)
    out.append(_check("dispersive", "per-mode energy drift to t = 1e3",
                      mode_energy_drift(k.astype(float), eta, p, psi0, T0, times), 1e-10))
    pe = DispersionParams(N=1.0, beta=0.5, model="full_euler")
    out.append(_check("dispersive", "weighted per-mode energy drift to t = 1e3",
                      mode_energy_drift(k.astype(float), eta, pe, psi0, T0, times), 1e-10))
    ps, _ = evolve_no_shear_mode(1, 0.3, p, 0.0, 0.2 + 0.1j, 0.5)
    out.append(_check("dispersive", "t = 0 identity", abs(ps - (0.2 + 0.1j)), 1e-15))
    x = np.linspace(-1.0, 1.0, 4001)
    holds = all(vdc_bound_check(x, M * x * x, "second")[0] for M in (10.0, 100.0))
    out.append(_check("dispersive", "second-derivative oscillatory bound (violations)", 0.0 if holds else 1.0, 0.5))
    sharp = sharpness_profile(times=(1e4,))
    out.append(_check("dispersive", "sharpness limit gap at t = 1e4",
                      abs(sharp.values[-1] / SQRT3_GAMMA_THIRD - 1.0), 0.05))
    out.append(_check("dispersive", "sharpness eta-route vs u-route", abs(sharp.values[-1] / sharp.u_route[-1] - 1.0), 1e-8))
    if not quick:
        env = lemma_envelope_sweep((10.0, 1e2, 1e3, 1e4), (1, 2, 4))
        out.append(_check("dispersive", "envelope constant spread across t", env.spread(), 0.2))
    return out


_RUNNERS = {
    "hyp": suite_hyp,
    "ode": suite_ode,
    "boussinesq": suite_boussinesq,
    "euler": suite_euler,
    "dispersive": suite_dispersive,
}


def validate(suite="all", seed=0):
    names = SUITES if suite == "all" else (suite,)
    checks = []
    for name in names:
        if name not in _RUNNERS:
            raise KeyError(f"unknown suite {name!r}")
        rng = np.random.default_rng([seed, SUITES.index(name)])
        checks.extend(_RUNNERS[name](rng))
    return checks
