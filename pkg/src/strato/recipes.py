"""Initial-data recipes for field experiments.

``gaussian_packet`` is the plain family psi0 = a cos(k0 x) G(y), rho0 = b sin(k0 x) G(y).

``branch_matched_packet`` keeps the Gaussian envelope but picks the amplitude
and x-phase of the density so that, for the (k0, eta = 0) mode, the slower
correction to the leading large-time behaviour cancels:

* 0 < B^2 < 1/4: the subdominant branch s^(-3/2 - nu) is removed,
* B^2 > 1/4: one of the two log-periodic branches s^(-3/2 -+ i mu) is removed,
  so |mode| is a clean power instead of a power times a slow oscillation in log s,
* B^2 = 1/4: the non-logarithmic term of s^(-3/2) (log s + b) is removed.

A wide envelope concentrates the eta spectrum near 0, so the whole packet
inherits the cancellation.  The ratio is found by evolving the two unit data
sets to large s and projecting onto the asymptotic branches.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .boussinesq import ModeIndex, RegimeParams, critical_log_constants, evolve_mode, leading_coefficients
from .errors import ConfigError, InvalidParams
from .field import GridSpec, Model, read_binary, read_csv

MATCH_WINDOW = (1e3, 1e4)


@dataclass(frozen=True)
class PacketData:
    psi0: np.ndarray
    rho0: np.ndarray


def gaussian_packet(grid: GridSpec, k0=1, sigma=4.0, amp_psi=1.0, amp_rho=0.5, y0=0.0):
    X, Y = grid.mesh()
    G = np.exp(-((Y - y0) ** 2) / (2.0 * sigma**2))
    return PacketData(amp_psi * np.cos(k0 * X) * G, amp_rho * np.sin(k0 * X) * G)


def _critical(nu):
    return abs(nu) < 1e-12


def _branch_basis(nu, s, euler=None):
    """Columns (kept branch, removed branch) of the large-s behaviour."""
    s = np.asarray(s, dtype=float)
    if euler is None:
        pref = np.ones_like(s, dtype=complex)
        lead = s.astype(complex) ** -1.5
        z = s.astype(complex)
    else:
        kappa, beta1 = euler
        z = -0.5j * kappa * s
        pref = (0.5 - 0.5j * kappa * s) ** (-1.0 - beta1) * z ** (beta1 - 0.5)
        lead = pref
    if _critical(nu):
        return np.stack((lead * np.log(s), lead), axis=1)
    if euler is None:
        return np.stack((lead * z**nu, lead * z ** (-nu)), axis=1)
    return np.stack((pref * z**nu, pref * z ** (-nu)), axis=1)


def _unit_trajectories(model, params, k0, s):
    """Stream amplitude at shear times s for (psi0, T0) = (1, 0) and (0, 1) at eta = 0."""
    if model is Model.FULL_EULER:
        from .euler import EulerModeParams, evolve_euler_mode

        p = EulerModeParams(k0, 0.0, params.beta, params.B2)
        return evolve_euler_mode(p, s, 1.0, 0.0).chi, evolve_euler_mode(p, s, 0.0, 1.0).chi
    m = ModeIndex(k0, 0.0)
    return evolve_mode(m, params, s, 1.0, 0.0).phi, evolve_mode(m, params, s, 0.0, 1.0).phi


def matched_ratio(model, params: RegimeParams, k0=1, window=MATCH_WINDOW, npts=64):
    """T_hat / psi_hat at (k0, 0) that removes the slower correction, found numerically."""
    model = Model(model)
    if model is Model.NO_SHEAR or not 0 < params.B2 < math.inf:
        raise InvalidParams("branch matching needs a sheared model with 0 < B^2 < inf")
    s = np.geomspace(window[0], window[1], npts)
    euler = None
    if model is Model.FULL_EULER:
        from .euler import EulerModeParams

        ep = EulerModeParams(k0, 0.0, params.beta, params.B2)
        euler = (ep.kappa, ep.beta1)
    nu = complex(params.nu)
    basis = _branch_basis(nu, s, euler)
    coefs = []
    for traj in _unit_trajectories(model, params, k0, s):
        c, *_ = np.linalg.lstsq(basis, np.asarray(traj, dtype=complex), rcond=None)
        coefs.append(c)
    # removed-branch coefficient of (psi, T) = (1, r) is c_a[1] + r c_b[1]
    return complex(-coefs[0][1] / coefs[1][1])


def matched_ratio_closed_form(params: RegimeParams, k0=1):
    """The Boussinesq ratio from the asymptotic constants of g1, g2 (check on :func:`matched_ratio`)."""
    B2 = params.B2
    if abs(B2 - 0.25) < 1e-12:
        (A1, b1), (A2, b2) = critical_log_constants()
        C2 = -A1 * b1 / (A2 * b2)
    else:
        (_, a1m), (_, a2m) = leading_coefficients(params.nu)
        C2 = -a1m / a2m
    # at s0 = 0 the coefficients are C1 = psi0 and C2 = i B^2 T0 / k
    return complex(k0 * C2 / (1j * B2))


def branch_matched_packet(grid: GridSpec, model, params: RegimeParams, k0=1, sigma=4.0, amp_psi=1.0,
                          ratio=None):
    """psi0 = a cos(k0 x) G, T0 = a |r| cos(k0 x + arg r) G, returned with rho0 = beta T0 / R."""
    model = Model(model)
    r = matched_ratio(model, params, k0) if ratio is None else complex(ratio)
    X, Y = grid.mesh()
    G = np.exp(-(Y**2) / (2.0 * sigma**2))
    T0 = amp_psi * abs(r) * np.cos(k0 * X + cmath.phase(r)) * G
    return PacketData(amp_psi * np.cos(k0 * X) * G, T0 * params.beta / params.R)


def file_data(grid: GridSpec, psi_path, rho_path):
    out = []
    for path in (psi_path, rho_path):
        path = str(path)
        if path.endswith(".csv"):
            out.append(read_csv(path, grid))
        else:
            g2, _, arrays = read_binary(path)
            if (g2.Nx, g2.Ny, g2.Ly) != (grid.Nx, grid.Ny, grid.Ly):
                raise ConfigError(f"{path} was written on a different grid")
            out.append(arrays[0])
    return PacketData(*out)
