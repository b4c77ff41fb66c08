"""Single-mode closed-form evolution for the linearized Boussinesq system.

In the sheared frame each Fourier mode (k, eta) of the stream function obeys

    (1 + s^2) phi_tt + 4 s phi_t + (2 + B^2) phi = 0,     s = t - eta/k,

whose solutions are the hypergeometric functions g1, g2 below.  All times are
nondimensional shear times t' = R t.  Every routine broadcasts over ``eta``
(and the amplitude arrays) for a fixed integer ``k``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConnection, InvalidMode, InvalidParams
from .gammafn import EULER_GAMMA, digamma, gamma, rgamma
from .hypergeometric import TOL_DEGENERATE, EvalDomain, HypParams, f21, f21_derivative

_NEG = EvalDomain.NEGATIVE_REAL_AXIS


class Regime(enum.Enum):
    HOMOGENEOUS = "homogeneous"
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"
    NO_SHEAR = "no_shear"


def classify(B2):
    if math.isinf(B2):
        return Regime.NO_SHEAR
    if B2 == 0.0:
        return Regime.HOMOGENEOUS
    if B2 < 0.25:
        return Regime.SUBCRITICAL
    if B2 == 0.25:
        return Regime.CRITICAL
    return Regime.SUPERCRITICAL


@dataclass(frozen=True)
class RegimeParams:
    """Shear rate R, stratification rate beta and gravity g.

    B2 = beta g / R^2 and nu = sqrt(1/4 - B2) (complex) are derived.  Use
    :meth:`from_richardson` when only the Richardson number matters.
    """

    R: float = 1.0
    beta: float = 0.0
    g: float = 1.0

    def __post_init__(self):
        if self.beta < 0 or self.g < 0 or self.R < 0:
            raise InvalidParams("R, beta and g must be nonnegative")

    @classmethod
    def from_richardson(cls, B2, beta=None, R=1.0):
        if B2 < 0:
            raise InvalidParams("B2 must be nonnegative")
        if beta is None:
            return cls(R=R, beta=float(B2), g=1.0)
        if beta == 0.0:
            if B2 != 0.0:
                raise InvalidParams("beta = 0 forces B2 = 0")
            return cls(R=R, beta=0.0, g=1.0)
        return cls(R=R, beta=float(beta), g=float(B2) * R * R / beta)

    @property
    def B2(self):
        if self.R == 0.0:
            return math.inf
        return self.beta * self.g / (self.R * self.R)

    @property
    def nu(self):
        if self.R == 0.0:
            return complex(math.nan, math.nan)
        return cmath.sqrt(0.25 - self.B2)

    @property
    def N(self):
        """Brunt-Vaisala frequency sqrt(beta g)."""
        return math.sqrt(self.beta * self.g)

    @property
    def regime(self):
        return classify(self.B2)

    def shear_time(self, t_physical):
        """Nondimensional time t' = R t used by every solver."""
        return self.R * np.asarray(t_physical, dtype=float)


@dataclass(frozen=True)
class ModeIndex:
    k: int
    eta: float | np.ndarray = 0.0

    def __post_init__(self):
        if int(self.k) != self.k:
            raise InvalidMode(f"k = {self.k} is not an integer")
        object.__setattr__(self, "k", int(self.k))

    def require_nonzero(self):
        if self.k == 0:
            raise InvalidMode("k = 0 modes do not evolve")

    def shear(self, t):
        self.require_nonzero()
        s0 = -np.asarray(self.eta, dtype=float) / self.k
        return ShearVariables(s=t + s0, s0=s0)


@dataclass(frozen=True)
class ShearVariables:
    s: float | np.ndarray
    s0: float | np.ndarray


@dataclass(frozen=True)
class ModeState:
    phi: complex | np.ndarray
    tau: complex | np.ndarray
    vx: complex | np.ndarray
    vy: complex | np.ndarray

    @classmethod
    def assemble(cls, k, s, phi, tau):
        vy = 1j * k * phi
        return cls(phi=phi, tau=tau, vx=s * vy, vy=vy)


def _is_degenerate_nu(nu):
    nu = complex(nu)
    return nu != 0 and abs(nu) < TOL_DEGENERATE


def special_solutions(nu, s):
    """(g1, g2, g1', g2') at s; primes are d/ds.

    nu = 0 uses the exact logarithmic connection expansion.  A nonzero nu
    inside the degenerate band raises :class:`DegenerateConnection` for large
    |s| so the caller can fall back on the ODE oracle.
    """
    nu = complex(nu)
    s_arr = np.asarray(s, dtype=float)
    u = -s_arr * s_arr
    log_case = nu == 0
    p1 = HypParams.boussinesq(nu, 1)
    p2 = HypParams.boussinesq(nu, 2)
    F1 = np.asarray(f21(p1, u, _NEG, log_case))
    dF1 = np.asarray(f21_derivative(p1, u, _NEG, log_case))
    F2 = np.asarray(f21(p2, u, _NEG, log_case))
    dF2 = np.asarray(f21_derivative(p2, u, _NEG, log_case))
    g1 = F1
    g2 = s_arr * F2
    dg1 = -2.0 * s_arr * dF1
    dg2 = F2 - 2.0 * s_arr * s_arr * dF2
    if np.ndim(s) == 0:
        return complex(g1), complex(g2), complex(dg1), complex(dg2)
    return g1, g2, dg1, dg2


def initial_velocity(k, B2, s0, psi0, T0):
    """phi_t(0) = (i B^2 T0 / k - 2 s0 psi0) / (1 + s0^2)."""
    return (1j * B2 * T0 / k - 2.0 * s0 * psi0) / (1.0 + s0 * s0)


def mode_coefficients(m: ModeIndex, p: RegimeParams, psi0, T0):
    """C1, C2 of phi = C1 g1(s) + C2 g2(s) matching (psi0, T0) at t = 0."""
    m.require_nonzero()
    B2 = p.B2
    if not 0.0 < B2 < math.inf:
        raise InvalidParams(f"closed form needs 0 < B2 < inf, got {B2}")
    s0 = -np.asarray(m.eta, dtype=float) / m.k
    g1, g2, dg1, dg2 = special_solutions(p.nu, s0)
    q = 1.0 + s0 * s0
    inv_delta = q * q
    psi0 = np.asarray(psi0, dtype=complex)
    T0 = np.asarray(T0, dtype=complex)
    C1 = inv_delta * ((dg2 + 2 * s0 / q * g2) * psi0 - 1j * B2 / q * g2 * T0 / m.k)
    C2 = inv_delta * ((-dg1 - 2 * s0 / q * g1) * psi0 + 1j * B2 / q * g1 * T0 / m.k)
    return _unwrap_pair(C1, C2, m.eta, psi0, T0)


def _unwrap_pair(x, y, *likes):
    if all(np.ndim(v) == 0 for v in likes):
        return complex(x), complex(y)
    return x, y


def _density(k, B2, s, phi, dphi):
    return -1j * k / B2 * ((1.0 + s * s) * dphi + 2.0 * s * phi)


def evolve_mode(m: ModeIndex, p: RegimeParams, t, psi0, T0):
    """ModeState at shear time t.

    B2 = 0 is routed to :func:`evolve_mode_homogeneous`, with ``T0`` read as the
    relative density rho0.
    """
    m.require_nonzero()
    if p.B2 == 0.0:
        # T = R rho / beta is undefined at beta = 0; the second amplitude is rho0 here
        return evolve_mode_homogeneous(m, t, psi0, T0, g=p.g / p.R**2)
    if _is_degenerate_nu(p.nu):
        return _evolve_via_oracle(m, p, t, psi0, T0)
    C1, C2 = mode_coefficients(m, p, psi0, T0)
    sv = m.shear(t)
    try:
        g1, g2, dg1, dg2 = special_solutions(p.nu, sv.s)
    except DegenerateConnection:
        return _evolve_via_oracle(m, p, t, psi0, T0)
    phi = C1 * g1 + C2 * g2
    dphi = C1 * dg1 + C2 * dg2
    return ModeState.assemble(m.k, sv.s, phi, _density(m.k, p.B2, sv.s, phi, dphi))


def _evolve_via_oracle(m, p, t, psi0, T0):
    """Single mode (scalar eta and data) at a scalar time or an array of times."""
    from .ode import OdeKind, OdeSpec, integrate

    if np.ndim(m.eta) or np.ndim(psi0) or np.ndim(T0):
        raise InvalidParams("oracle fallback handles a single mode at a time")
    s0 = -m.eta / m.k
    spec = OdeSpec(OdeKind.BOUSSINESQ_PHI, k=m.k, eta=m.eta, B2=p.B2,
                   init=(complex(psi0), initial_velocity(m.k, p.B2, s0, psi0, T0)))
    t_arr = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t_arr)
    grid = np.unique(np.concatenate(([0.0], flat)))
    traj = integrate(spec, grid)[np.searchsorted(grid, flat)]
    phi, dphi = traj[:, 0], traj[:, 1]
    if t_arr.ndim == 0:
        phi, dphi = complex(phi[0]), complex(dphi[0])
    s = t_arr + s0
    return ModeState.assemble(m.k, s, phi, _density(m.k, p.B2, s, phi, dphi))


def evolve_mode_homogeneous(m: ModeIndex, t, psi0, rho0, g=1.0):
    """Exact B2 = 0 solution; g is gravity in units where R = 1.

    Vorticity f = k^2 (1 + s^2) phi grows linearly, f(t) = f(0) + i k g t rho0,
    and the density is frozen in the sheared frame.
    """
    m.require_nonzero()
    sv = m.shear(t)
    psi0 = np.asarray(psi0, dtype=complex)
    rho0 = np.asarray(rho0, dtype=complex)
    phi = ((1.0 + sv.s0 * sv.s0) * psi0 + 1j * t * g / m.k * rho0) / (1.0 + sv.s * sv.s)
    tau = rho0 * np.ones_like(phi)
    if np.ndim(phi) == 0:
        phi, tau = complex(phi), complex(tau)
    return ModeState.assemble(m.k, sv.s, phi, tau)


def japanese(x):
    """<x> = sqrt(1 + x^2)."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(1.0 + x * x)


def envelope(m: ModeIndex, p: RegimeParams, t, psi0, T0):
    """Right-hand side of the per-mode decay bound for |phi|."""
    sv = m.shear(t)
    rn = complex(p.nu).real
    js, js0 = japanese(sv.s), japanese(sv.s0)
    env = js ** (-1.5 + rn) * js0 ** (1.5 + rn) * (np.abs(psi0) + np.abs(T0) / (js0 * abs(m.k)))
    if p.regime is Regime.CRITICAL:
        env = env * japanese(np.log(js)) * japanese(np.log(js0))
    return env


def envelope_bound_ratio(m: ModeIndex, p: RegimeParams, t_grid, psi0, T0):
    """max over t_grid of |phi(t)| divided by the decay envelope."""
    if psi0 == 0 and T0 == 0:
        return 0.0
    t_grid = np.asarray(t_grid, dtype=float)
    worst = 0.0
    for t in t_grid:
        st = evolve_mode(m, p, t, psi0, T0)
        worst = max(worst, float(abs(st.phi) / envelope(m, p, t, psi0, T0)))
    return worst


# --------------------------------------------------------------------------
# large-|s| forms used as validators


def leading_coefficients(nu):
    """Coefficients of s^(-3/2 + nu) and s^(-3/2 - nu) in g1 and g2 at large s > 0."""
    nu = complex(nu)
    sp = math.sqrt(math.pi)
    a1p = sp * gamma(nu) * rgamma(-0.25 + nu / 2) * rgamma(0.75 + nu / 2)
    a1m = sp * gamma(-nu) * rgamma(-0.25 - nu / 2) * rgamma(0.75 - nu / 2)
    a2p = sp / 2 * gamma(nu) * rgamma(0.25 + nu / 2) * rgamma(1.25 + nu / 2)
    a2m = sp / 2 * gamma(-nu) * rgamma(0.25 - nu / 2) * rgamma(1.25 - nu / 2)
    return (a1p, a1m), (a2p, a2m)


def asymptotic_solutions(nu, s):
    """Leading large-|s| forms of (g1, g2, g1', g2') for nu != 0.

    g1 is even and g2 odd in s, so negative s is handled through |s|.
    """
    nu = complex(nu)
    if nu == 0:
        return critical_asymptotic_solutions(s)
    s_arr = np.asarray(s, dtype=float)
    sg = np.sign(s_arr)
    a = np.abs(s_arr).astype(complex)
    (a1p, a1m), (a2p, a2m) = leading_coefficients(nu)
    ep, em = -1.5 + nu, -1.5 - nu
    g1 = a1p * a**ep + a1m * a**em
    g2 = sg * (a2p * a**ep + a2m * a**em)
    dg1 = sg * (a1p * ep * a ** (ep - 1) + a1m * em * a ** (em - 1))
    dg2 = a2p * ep * a ** (ep - 1) + a2m * em * a ** (em - 1)
    return g1, g2, dg1, dg2


def critical_asymptotic_solutions(s):
    """Leading forms at nu = 0: s^(-3/2) (A log s + B) and derivatives."""
    s_arr = np.asarray(s, dtype=float)
    sg = np.sign(s_arr)
    a = np.abs(s_arr)
    L = np.log(a)
    (c1, b1), (c2, b2) = critical_log_constants()
    g1 = c1 * a**-1.5 * (L + b1)
    g2 = sg * c2 * a**-1.5 * (L + b2)
    # d/da [a^-3/2 (L + b)] = a^-5/2 (1 - 3/2 (L + b))
    dg1 = sg * c1 * a**-2.5 * (1 - 1.5 * (L + b1))
    dg2 = c2 * a**-2.5 * (1 - 1.5 * (L + b2))
    return g1, g2, dg1, dg2


def critical_log_constants():
    """(A1, b1), (A2, b2) with g_i ~ A_i s^(-3/2) (log s + b_i)."""
    sp = math.sqrt(math.pi)
    c1 = (2 * sp * rgamma(-0.25) * rgamma(0.75)).real
    c2 = (sp * rgamma(0.25) * rgamma(1.25)).real
    b1 = -(EULER_GAMMA + digamma(0.75).real + 2)
    b2 = -(EULER_GAMMA + digamma(0.25).real + 2)
    return (c1, b1), (c2, b2)

