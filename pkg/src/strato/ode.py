"""Brute-force time integration of the per-mode ODEs.

A Dormand-Prince 5(4) pair with PI step-size control and the standard
fourth-order dense output.  States are complex arrays of shape (2, *batch) so a
whole set of modes (broadcast over ``k`` and ``eta``) shares one step sequence;
the error norm is the max over the batch, which is never looser than stepping
each mode on its own.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, StepFailure

RTOL = 1e-10
ATOL = 1e-12
FLOOR = 1e-14

# Dormand-Prince tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
_D = (
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799, -10690763975 / 1880347072,
    701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423,
)

_SAFE = 0.9
_FAC_MIN = 0.2   # largest allowed shrink is 1/_FAC_MAX, growth 1/_FAC_MIN
_FAC_MAX = 10.0
_BETA = 0.04     # PI (Lund) stabilisation exponent


class OdeKind(enum.Enum):
    BOUSSINESQ_PHI = "boussinesq_phi"
    BOUSSINESQ_SYSTEM = "boussinesq_system"
    EULER_CHI = "euler_chi"


@dataclass(frozen=True)
class OdeSpec:
    """One ODE kind with its parameters and initial data.

    BOUSSINESQ_PHI: init = (phi0, phi_t0); state (phi, phi_t); needs B2.
    BOUSSINESQ_SYSTEM: init = (psi0, rho0); state (phi, rho); needs g, beta.
        Vorticity f = k^2 (1 + s^2) phi with f_t = i k g rho, rho_t = i k beta phi.
    EULER_CHI: init = (chi0, chi_t0); state (chi, chi_t); needs B2, beta.
        Integrated as w = (1 + kappa^2 s^2) chi with
        w_tt = 2 i beta1 kappa chi_t - B2 kappa^2 chi.
    """

    kind: OdeKind
    k: int | np.ndarray
    eta: float | np.ndarray
    init: tuple
    B2: float = 0.0
    beta: float = 0.0
    g: float = 1.0

    def __post_init__(self):
        if np.any(np.asarray(self.k) == 0):
            raise InvalidParams("k = 0 has no shear dynamics")
        if self.kind is OdeKind.EULER_CHI and self.beta <= 0:
            raise InvalidParams("EULER_CHI needs beta > 0")


def _shape(spec):
    k = np.asarray(spec.k, dtype=float)
    eta = np.asarray(spec.eta, dtype=float)
    a, b = (np.asarray(v, dtype=complex) for v in spec.init)
    return np.broadcast_shapes(k.shape, eta.shape, a.shape, b.shape)


def _system(spec):
    """(rhs, y0, to_output) for the first-order form of ``spec``."""
    shape = _shape(spec)
    k = np.broadcast_to(np.asarray(spec.k, dtype=float), shape)
    s0 = -np.broadcast_to(np.asarray(spec.eta, dtype=float), shape) / k
    a, b = (np.broadcast_to(np.asarray(v, dtype=complex), shape) for v in spec.init)

    if spec.kind is OdeKind.BOUSSINESQ_PHI:
        c0 = 2.0 + spec.B2

        def rhs(t, y):
            s = t + s0
            return np.stack((y[1], -(4.0 * s * y[1] + c0 * y[0]) / (1.0 + s * s)))

        return rhs, np.stack((a, b)), lambda t, y: y

    if spec.kind is OdeKind.BOUSSINESQ_SYSTEM:
        kk = k * k
        ikg = 1j * k * spec.g
        ikb = 1j * k * spec.beta
        # state (f, rho)
        y0 = np.stack((kk * (1.0 + s0 * s0) * a, b))

        def rhs(t, y):
            s = t + s0
            phi = y[0] / (kk * (1.0 + s * s))
            return np.stack((ikg * y[1], ikb * phi))

        def out(t, y):
            s = t + s0
            return np.stack((y[0] / (kk * (1.0 + s * s)), y[1]))

        return rhs, y0, out

    m = np.sqrt(0.25 * spec.beta**2 + k * k)
    kap = k / m
    b1 = spec.beta / (2.0 * m)
    k2 = kap * kap
    cv = 2j * b1 * kap
    cb = spec.B2 * k2

    def unpack(t, y):
        s = t + s0
        q = 1.0 + k2 * s * s
        chi = y[0] / q
        chi_t = (y[1] - 2.0 * k2 * s * chi) / q
        return chi, chi_t

    def rhs(t, y):
        chi, chi_t = unpack(t, y)
        return np.stack((y[1], cv * chi_t - cb * chi))

    q0 = 1.0 + k2 * s0 * s0
    y0 = np.stack((q0 * a, 2.0 * k2 * s0 * a + q0 * b))
    return rhs, y0, lambda t, y: np.stack(unpack(t, y))


def _stages(rhs, t, y, h, k1):
    ks = [k1]
    for i in range(1, 7):
        acc = y.copy()
        for j, aij in enumerate(_A[i]):
            if aij:
                acc = acc + h * aij * ks[j]
        ks.append(rhs(t + _C[i] * h, acc))
    # FSAL: the 7th stage is evaluated at the new solution
    y_new = y + h * sum(w * kk for w, kk in zip(_A[6], ks[:6]) if w)
    return ks, y_new


def _dense(y, y_new, h, ks):
    dy = y_new - y
    bspl = h * ks[0] - dy
    r4 = dy - h * ks[6] - bspl
    r5 = h * sum(d * kk for d, kk in zip(_D, ks) if d)
    return y, dy, bspl, r4, r5


def _interp(coef, theta):
    y0, dy, bspl, r4, r5 = coef
    th1 = 1.0 - theta
    return y0 + theta * (dy + th1 * (bspl + theta * (r4 + th1 * r5)))


def _initial_step(rhs, t0, y0, f0, rtol, atol, span):
    sc = atol + rtol * np.abs(y0)
    d0 = np.max(np.abs(y0) / sc)
    d1 = np.max(np.abs(f0) / sc)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = rhs(t0 + h0, y0 + h0 * f0)
    d2 = np.max(np.abs(f1 - f0) / sc) / h0
    h1 = max(1e-6, h0 * 1e-3) if max(d1, d2) <= 1e-15 else (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def integrate(spec: OdeSpec, t_grid, rtol=RTOL, atol=ATOL, fixed_step=None, max_steps=10_000_000):
    """Solution at every time of ``t_grid`` (ascending, starting at 0).

    Returns a complex array of shape (len(t_grid), 2, *batch): (phi, phi_t),
    (phi, rho) or (chi, chi_t) depending on ``spec.kind``.  ``fixed_step``
    disables error control and marches with that step (the grid must then be
    a multiple of it).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0 or t_grid[0] != 0.0:
        raise InvalidParams("t_grid must be a 1-D array starting at 0")
    if np.any(np.diff(t_grid) <= 0):
        raise InvalidParams("t_grid must be strictly ascending")
    rhs, y, out = _system(spec)
    result = np.empty((t_grid.size,) + y.shape, dtype=complex)
    result[0] = out(0.0, y)
    t_end = float(t_grid[-1])
    if t_grid.size == 1:
        return result
    if not np.any(y):
        result[1:] = 0.0
        return result

    if fixed_step is not None:
        return _integrate_fixed(rhs, out, y, t_grid, float(fixed_step), result)

    t = 0.0
    f = rhs(t, y)
    h = _initial_step(rhs, t, y, f, rtol, atol, t_end)
    err_old = 1e-4
    nxt = 1
    steps = 0
    while nxt < t_grid.size:
        steps += 1
        if steps > max_steps:
            raise StepFailure(f"exceeded {max_steps} steps", t=t)
        h = min(h, t_end - t)
        if h <= 1e-14 * max(1.0, abs(t)):
            raise StepFailure(f"step size underflow at t = {t:.6g}", t=t)
        ks, y_new = _stages(rhs, t, y, h, f)
        err_vec = h * sum(e * kk for e, kk in zip(_E, ks) if e)
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / sc))
        if not math.isfinite(err):
            h *= 0.1
            continue
        fac11 = err ** (0.2 - 0.75 * _BETA)
        if err <= 1.0:
            fac = fac11 / err_old**_BETA
            fac = max(1.0 / _FAC_MAX, min(1.0 / _FAC_MIN, fac / _SAFE))
            t_new = t + h
            coef = None
            while nxt < t_grid.size and t_grid[nxt] <= t_new * (1 + 1e-15):
                if coef is None:
                    coef = _dense(y, y_new, h, ks)
                theta = (t_grid[nxt] - t) / h
                result[nxt] = out(t_grid[nxt], _interp(coef, min(theta, 1.0)))
                nxt += 1
            err_old = max(err, 1e-4)
            t, y, f = t_new, y_new, ks[6]
            h = h / fac
        else:
            h = h / min(1.0 / _FAC_MIN, fac11 / _SAFE)
    return result


def _integrate_fixed(rhs, out, y, t_grid, h, result):
    n_total = round(t_grid[-1] / h)
    marks = np.rint(t_grid / h).astype(int)
    if not np.allclose(marks * h, t_grid, rtol=0, atol=1e-9 * max(1.0, t_grid[-1])):
        raise InvalidParams("fixed_step must divide every grid time")
    t = 0.0
    f = rhs(t, y)
    nxt = 1
    for n in range(1, n_total + 1):
        ks, y = _stages(rhs, t, y, h, f)
        t = n * h
        f = ks[6]
        while nxt < t_grid.size and marks[nxt] == n:
            result[nxt] = out(t, y)
            nxt += 1
    return result


# --------------------------------------------------------------------------
# closed form vs oracle


@dataclass(frozen=True)
class ModeCase:
    """Inputs for :func:`compare_closed_form`.

    ``model`` is "boussinesq" or "euler"; for Euler, psi0 and T0 are the
    weighted data (Psi0, Upsilon0).
    """

    model: str
    k: int
    eta: float
    B2: float
    psi0: complex
    T0: complex
    beta: float = 0.0


def oracle_trajectory(case: ModeCase, t_grid, rtol=RTOL, atol=ATOL):
    """(amplitude, density) along t_grid from the integrator."""
    t_grid = np.asarray(t_grid, dtype=float)
    if case.model == "boussinesq":
        from .boussinesq import initial_velocity

        s0 = -case.eta / case.k
        if case.B2 == 0.0:
            spec = OdeSpec(OdeKind.BOUSSINESQ_SYSTEM, case.k, case.eta, (case.psi0, case.T0), g=1.0, beta=0.0)
            traj = integrate(spec, t_grid, rtol, atol)
            return traj[:, 0], traj[:, 1]
        spec = OdeSpec(OdeKind.BOUSSINESQ_PHI, case.k, case.eta,
                       (case.psi0, initial_velocity(case.k, case.B2, s0, case.psi0, case.T0)), B2=case.B2)
        traj = integrate(spec, t_grid, rtol, atol)
        phi, dphi = traj[:, 0], traj[:, 1]
        s = t_grid + s0
        return phi, -1j * case.k / case.B2 * ((1 + s * s) * dphi + 2 * s * phi)
    if case.model == "euler":
        from .euler import EulerModeParams, weighted_density, weighted_initial_velocity

        p = EulerModeParams(case.k, case.eta, case.beta, case.B2)
        spec = OdeSpec(OdeKind.EULER_CHI, case.k, case.eta,
                       (case.psi0, weighted_initial_velocity(p, case.psi0, case.T0)),
                       B2=case.B2, beta=case.beta)
        traj = integrate(spec, t_grid, rtol, atol)
        chi, dchi = traj[:, 0], traj[:, 1]
        return chi, weighted_density(p, t_grid, chi, dchi)
    raise InvalidParams(f"unknown model {case.model!r}")


def closed_form_trajectory(case: ModeCase, t_grid):
    t_grid = np.asarray(t_grid, dtype=float)
    if case.model == "boussinesq":
        from .boussinesq import ModeIndex, RegimeParams, evolve_mode

        p = RegimeParams.from_richardson(case.B2)
        m = ModeIndex(case.k, case.eta)
        st = evolve_mode(m, p, t_grid, case.psi0, case.T0)
        return np.asarray(st.phi) * np.ones(t_grid.shape), np.asarray(st.tau) * np.ones(t_grid.shape)
    if case.model == "euler":
        from .euler import EulerModeParams, evolve_euler_mode

        p = EulerModeParams(case.k, case.eta, case.beta, case.B2)
        st = evolve_euler_mode(p, t_grid, case.psi0, case.T0)
        return np.asarray(st.chi), np.asarray(st.mu)
    raise InvalidParams(f"unknown model {case.model!r}")


def compare_closed_form(case: ModeCase, t_grid, rtol=RTOL, atol=ATOL, floor=FLOOR, density=True):
    """max over t_grid of |closed - oracle| / max(|closed|, floor).

    The amplitude (phi or chi) uses the absolute ``floor``.  The density is
    derived from a derivative and can start at exactly zero, so its floor is
    scaled to 1e-8 of its largest value along the trajectory (so absolute
    differences below ~1e-14 of that scale never count as failures).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    (c_amp, c_den) = closed_form_trajectory(case, t_grid)
    (o_amp, o_den) = oracle_trajectory(case, t_grid, rtol, atol)
    c_amp = np.asarray(c_amp)
    worst = float(np.max(np.abs(c_amp - o_amp) / np.maximum(np.abs(c_amp), floor)))
    if density:
        c_den = np.asarray(c_den)
        den_floor = max(floor, 1e-8 * float(np.max(np.abs(c_den))))
        worst = max(worst, float(np.max(np.abs(c_den - o_den) / np.maximum(np.abs(c_den), den_floor))))
    return worst
