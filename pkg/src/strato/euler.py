"""Single-mode closed-form evolution for the full linearized Euler system.

Works with the weighted stream function chi = exp(-beta y / 2) phi, whose
sheared-frame Fourier amplitude obeys

    d_tt[(1 + kappa^2 s^2) chi] - 2 i beta1 kappa chi_t + B^2 kappa^2 chi = 0

with m = sqrt(beta^2/4 + k^2), kappa = k/m, beta1 = beta/(2m).  The special
solutions g3, g4 are hypergeometric functions on the line Re z = 1/2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConnection, InvalidMode, InvalidParams
from .hypergeometric import TOL_DEGENERATE, EvalDomain, HypParams, f21, f21_derivative

_HALF = EvalDomain.HALF_LINE


@dataclass(frozen=True)
class EulerModeParams:
    k: int
    eta: float | np.ndarray
    beta: float
    B2: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k == 0:
            raise InvalidMode(f"full Euler modes need an integer k != 0, got {self.k}")
        object.__setattr__(self, "k", int(self.k))
        if not self.beta > 0:
            raise InvalidMode("beta must be positive; beta = 0 is the homogeneous Boussinesq branch")
        if not self.B2 > 0:
            raise InvalidParams("B2 must be positive")

    @property
    def m(self):
        return math.sqrt(0.25 * self.beta**2 + self.k**2)

    @property
    def kappa(self):
        return self.k / self.m

    @property
    def beta1(self):
        return self.beta / (2.0 * self.m)

    @property
    def nu(self):
        return cmath.sqrt(0.25 - self.B2)

    @property
    def s0(self):
        return -np.asarray(self.eta, dtype=float) / self.k

    @property
    def s_tilde0(self):
        return self.s0 - 0.5j * self.beta / self.k

    def s_tilde_sq(self, s):
        """|s_tilde|^2 = s^2 + beta^2 / (4 k^2)."""
        return s * s + (0.5 * self.beta / self.k) ** 2

    @property
    def critical(self):
        return abs(self.nu) < TOL_DEGENERATE or abs(2 * self.nu - 1) < TOL_DEGENERATE

    def hyp_params(self):
        return HypParams.euler(self.nu, self.beta1, 3), HypParams.euler(self.nu, self.beta1, 4)


@dataclass(frozen=True)
class WeightedModeState:
    chi: complex | np.ndarray
    mu: complex | np.ndarray
    wvx: complex | np.ndarray
    wvy: complex | np.ndarray

    @classmethod
    def assemble(cls, p: EulerModeParams, s, chi, mu):
        wvy = 1j * p.k * chi
        return cls(chi=chi, mu=mu, wvx=(1j * p.k * s - 0.5 * p.beta) * chi, wvy=wvy)


def euler_special_solutions(p: EulerModeParams, s):
    """(g3, g4, g3', g4') at s, primes d/ds, with v = (1 + i kappa s)/2."""
    p3, p4 = p.hyp_params()
    s_arr = np.asarray(s, dtype=float)
    v = 0.5 + 0.5j * p.kappa * s_arr
    dv = 0.5j * p.kappa
    F3 = np.asarray(f21(p3, v, _HALF))
    dF3 = np.asarray(f21_derivative(p3, v, _HALF))
    F4 = np.asarray(f21(p4, v, _HALF))
    dF4 = np.asarray(f21_derivative(p4, v, _HALF))
    b1 = p.beta1
    w = v ** (b1 - 1.0)
    g3 = F3
    g4 = w * F4
    dg3 = dv * dF3
    dg4 = dv * ((b1 - 1.0) * w / v * F4 + w * dF4)
    if np.ndim(s) == 0:
        return complex(g3), complex(g4), complex(dg3), complex(dg4)
    return g3, g4, dg3, dg4


def wronskian(p: EulerModeParams, s=None):
    """Closed-form g3 g4' - g3' g4 at s (default s0)."""
    s = p.s0 if s is None else np.asarray(s, dtype=float)
    ks = p.kappa * s
    b1 = p.beta1
    return 0.5j * p.kappa * (b1 - 1.0) * (0.5 + 0.5j * ks) ** (b1 - 2.0) * (0.5 - 0.5j * ks) ** (-2.0 - b1)


def weighted_initial_velocity(p: EulerModeParams, Psi0, Upsilon0):
    """chi_t(0) = (i B^2 Upsilon0 / k - 2 s~0 Psi0) / (1 + |s~0|^2)."""
    st0 = p.s_tilde0
    return (1j * p.B2 * Upsilon0 / p.k - 2.0 * st0 * Psi0) / (1.0 + p.s_tilde_sq(p.s0))


def weighted_density(p: EulerModeParams, t, chi, chi_t):
    """mu = -(i k / B^2) [(1 + |s~|^2) chi_t + 2 s~ chi]."""
    s = np.asarray(t, dtype=float) + p.s0
    st = s - 0.5j * p.beta / p.k
    return -1j * p.k / p.B2 * ((1.0 + p.s_tilde_sq(s)) * chi_t + 2.0 * st * chi)


def euler_mode_coefficients(p: EulerModeParams, Psi0, Upsilon0):
    """C3, C4 of chi = C3 g3(s) + C4 g4(s)."""
    if p.critical:
        raise DegenerateConnection("near-degenerate nu; use the ODE oracle")
    s0 = p.s0
    g3, g4, dg3, dg4 = euler_special_solutions(p, s0)
    q = 1.0 + p.s_tilde_sq(s0)
    st0 = p.s_tilde0
    inv = 1.0 / wronskian(p)
    Psi0 = np.asarray(Psi0, dtype=complex)
    Ups = np.asarray(Upsilon0, dtype=complex) / p.k
    C3 = inv * ((dg4 + 2 * st0 / q * g4) * Psi0 - 1j * p.B2 / q * g4 * Ups)
    C4 = inv * ((-dg3 - 2 * st0 / q * g3) * Psi0 + 1j * p.B2 / q * g3 * Ups)
    if np.ndim(C3) == 0:
        return complex(C3), complex(C4)
    return C3, C4


def evolve_euler_mode(p: EulerModeParams, t, Psi0, Upsilon0):
    """Weighted mode state at shear time t (scalar or array)."""
    if p.critical:
        return _evolve_via_oracle(p, t, Psi0, Upsilon0)
    try:
        C3, C4 = euler_mode_coefficients(p, Psi0, Upsilon0)
        s = np.asarray(t, dtype=float) + p.s0
        g3, g4, dg3, dg4 = euler_special_solutions(p, s)
    except DegenerateConnection:
        return _evolve_via_oracle(p, t, Psi0, Upsilon0)
    chi = C3 * g3 + C4 * g4
    chi_t = C3 * dg3 + C4 * dg4
    return WeightedModeState.assemble(p, s, chi, weighted_density(p, t, chi, chi_t))


def _evolve_via_oracle(p, t, Psi0, Upsilon0):
    from .ode import OdeKind, OdeSpec, integrate

    t_arr = np.asarray(t, dtype=float)
    if t_arr.ndim and (np.ndim(p.eta) or np.ndim(Psi0) or np.ndim(Upsilon0)):
        raise InvalidParams("oracle path takes either an array of times or an array of modes")
    spec = OdeSpec(OdeKind.EULER_CHI, p.k, p.eta, (Psi0, weighted_initial_velocity(p, Psi0, Upsilon0)),
                   B2=p.B2, beta=p.beta)
    flat = np.atleast_1d(t_arr)
    grid = np.unique(np.concatenate(([0.0], flat)))
    traj = integrate(spec, grid)
    idx = np.searchsorted(grid, flat)
    chi = traj[idx, 0]
    chi_t = traj[idx, 1]
    if t_arr.ndim == 0:
        chi, chi_t = chi[0], chi_t[0]
    s = t_arr + p.s0
    return WeightedModeState.assemble(p, s, chi, weighted_density(p, t_arr, chi, chi_t))


def asymptotic_fit_residual(p: EulerModeParams, s_window, which=3):
    """Max relative residual of g3 (or g4) against c+ s^(e+) + c- s^(e-) on s_window.

    The exponents are -3/2 +- nu for the full function; the two complex
    prefactors are fitted by least squares, so only the power laws are tested.
    """
    s = np.asarray(s_window, dtype=float)
    g3, g4, _, _ = euler_special_solutions(p, s)
    g = g3 if which == 3 else g4
    nu = p.nu
    z = -0.5j * p.kappa * s
    if which == 3:
        pref = (0.5 - 0.5j * p.kappa * s) ** (-1.0 - p.beta1)
        base = np.stack((z ** (-0.5 + p.beta1 + nu), z ** (-0.5 + p.beta1 - nu)), axis=1)
    else:
        pref = (0.5 + 0.5j * p.kappa * s) ** (-1.0 + p.beta1)
        base = np.stack((z ** (-0.5 - p.beta1 + nu), z ** (-0.5 - p.beta1 - nu)), axis=1)
    A = pref[:, None] * base
    coef, *_ = np.linalg.lstsq(A, g, rcond=None)
    return float(np.max(np.abs(A @ coef - g) / np.abs(g)))
