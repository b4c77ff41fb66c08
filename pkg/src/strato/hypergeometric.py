"""Gauss hypergeometric function F(a, b; c; z) on the domains the mode solvers use.

Two evaluation domains matter: the negative real axis ``z = -s**2`` (Boussinesq
special solutions) and the vertical line ``Re z = 1/2`` (full Euler special
solutions).  Every routine accepts a scalar or an array of ``z`` with scalar
parameters and returns the same shape.

Routing for ``f21``:

* ``|z| <= R_SERIES``: the defining power series.
* negative axis, ``|z| <= 2``: Pfaff transform to ``w = z/(z-1)`` in ``[0, 2/3]``.
* ``|z| > 2`` (negative axis) or ``|z| >= 1/R_SERIES`` (half line): the 1/z
  connection formula; raises :class:`DegenerateConnection` when ``a - b`` is
  within ``TOL_DEGENERATE`` of an integer unless the exact ``a == b`` logarithmic
  expansion is requested with ``log_case=True``.
* half line seam ``R_SERIES < |z| < 1/R_SERIES``: Taylor re-expansion of the
  hypergeometric ODE about a chain of centres on the line.
"""
from __future__ import annotations

import cmath
import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConnection, Divergent, DomainError, InvalidParams, NonConvergence
from .gammafn import digamma, gamma, rgamma

R_SERIES = 0.7
TOL_SERIES = 1e-14
MAX_TERMS = 10000
TOL_DEGENERATE = 1e-3
PFAFF_MAX = 2.0
# condition estimate above which the series is re-summed in extended precision
COND_EXTENDED = 1e6
_CONSECUTIVE = 3

# test hook: relative perturbation applied to connection-formula gamma prefactors
_PREFACTOR_PERTURBATION = 0.0


def _is_nonpositive_integer(c):
    c = complex(c)
    return c.imag == 0.0 and c.real <= 0.0 and c.real == math.floor(c.real)


def _dist_to_integer(x):
    x = complex(x)
    return math.hypot(x.real - round(x.real), x.imag)


@dataclass(frozen=True)
class HypParams:
    """Parameters (a, b, c) of F(a, b; c; z)."""

    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if _is_nonpositive_integer(self.c):
            raise InvalidParams(f"c = {self.c.real:g} is a nonpositive integer")

    @classmethod
    def boussinesq(cls, nu, which=1):
        """Parameters of the first (``which=1``) or second Boussinesq special solution."""
        nu = complex(nu)
        if which == 1:
            return cls(0.75 - nu / 2, 0.75 + nu / 2, 0.5)
        if which == 2:
            return cls(1.25 - nu / 2, 1.25 + nu / 2, 1.5)
        raise InvalidParams("which must be 1 or 2")

    @classmethod
    def euler(cls, nu, beta1, which=3):
        """Parameters of g3 (``which=3``) or of the F factor of g4 (``which=4``)."""
        nu = complex(nu)
        if not 0.0 < beta1 < 1.0:
            raise InvalidParams(f"beta1 = {beta1} outside (0, 1)")
        if which == 3:
            return cls(1.5 - nu, 1.5 + nu, 2.0 - beta1)
        if which == 4:
            return cls(0.5 + beta1 - nu, 0.5 + beta1 + nu, beta1)
        raise InvalidParams("which must be 3 or 4")

    def shifted(self, da=0, db=0, dc=0):
        return HypParams(self.a + da, self.b + db, self.c + dc)

    def key(self):
        return (self.a, self.b, self.c)


class EvalDomain(enum.Enum):
    NEGATIVE_REAL_AXIS = "negative_real_axis"
    HALF_LINE = "half_line"
    UNIT_POINT = "unit_point"
    CONVERGENCE_DISK = "convergence_disk"

    def contains(self, z, tol=1e-12):
        z = np.asarray(z, dtype=complex)
        if self is EvalDomain.NEGATIVE_REAL_AXIS:
            return bool(np.all((z.imag == 0.0) & (z.real <= 0.0)))
        if self is EvalDomain.HALF_LINE:
            return bool(np.all(np.abs(z.real - 0.5) <= tol))
        if self is EvalDomain.UNIT_POINT:
            return bool(np.all(z == 1.0))
        return bool(np.all(np.abs(z) < 1.0))


# --------------------------------------------------------------------------
# power series


def _series_mp(a, b, c, z, tol, max_terms, dps=40):
    import mpmath

    with mpmath.workdps(dps):
        a, b, c, z = (mpmath.mpc(v) for v in (a, b, c, z))
        term = mpmath.mpc(1)
        total = mpmath.mpc(1)
        small = 0
        for n in range(max_terms):
            term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
            total += term
            if abs(term) < tol * abs(total):
                small += 1
                if small >= _CONSECUTIVE:
                    return complex(total)
            else:
                small = 0
    raise NonConvergence(f"extended-precision series did not converge in {max_terms} terms")


def _series(a, b, c, z, tol=TOL_SERIES, max_terms=MAX_TERMS):
    """Vectorised power series; returns (values, condition estimate)."""
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    total = np.ones_like(flat)
    term = np.ones_like(flat)
    mag = np.ones(flat.shape)
    small = np.zeros(flat.shape, dtype=int)
    active = np.ones(flat.shape, dtype=bool)
    n = 0
    while active.any():
        if n >= max_terms:
            raise NonConvergence(
                f"F({a:g}, {b:g}; {c:g}; z) series exceeded {max_terms} terms at |z| = {np.abs(flat[active]).max():.4g}"
            )
        idx = np.nonzero(active)[0]
        term[idx] *= (a + n) * (b + n) / ((c + n) * (n + 1)) * flat[idx]
        total[idx] += term[idx]
        mag[idx] += np.abs(term[idx])
        ok = np.abs(term[idx]) < tol * np.abs(total[idx])
        small[idx] = np.where(ok, small[idx] + 1, 0)
        # a term that is exactly zero terminates the series (a or b a nonpositive integer)
        done = (small[idx] >= _CONSECUTIVE) | (term[idx] == 0)
        active[idx[done]] = False
        n += 1
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(np.abs(total) > 0, mag / np.abs(total), np.inf)
    bad = np.nonzero(cond > COND_EXTENDED)[0]
    for i in bad:
        total[i] = _series_mp(a, b, c, flat[i], tol, max_terms)
    return total.reshape(z.shape), cond.reshape(z.shape)


def f21_series(p: HypParams, z, tol=TOL_SERIES, max_terms=MAX_TERMS, r_series=R_SERIES):
    """Truncated power series of F(a, b; c; z) for ``|z| <= r_series``."""
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) > r_series + 1e-15):
        raise DomainError(f"|z| = {np.abs(zz).max():.4g} exceeds the series radius {r_series}")
    val, _ = _series(p.a, p.b, p.c, zz, tol, max_terms)
    return _unwrap(val, z)


def _unwrap(val, like):
    if np.ndim(like) == 0:
        return complex(np.asarray(val).reshape(()))
    return val


# --------------------------------------------------------------------------
# transformations


def _pfaff(a, b, c, z, which="b"):
    """Pfaff transform onto w = z/(z-1).

    ``which="b"``: (1-z)^(-b) F(c-a, b; c; w)
    ``which="a"``: (1-z)^(-a) F(a, c-b; c; w)
    """
    z = np.asarray(z, dtype=complex)
    w = z / (z - 1.0)
    if which == "b":
        val, _ = _series(c - a, b, c, w)
        return (1.0 - z) ** (-b) * val
    val, _ = _series(a, c - b, c, w)
    return (1.0 - z) ** (-a) * val


def _check_degenerate(a, b):
    d = _dist_to_integer(a - b)
    if d < TOL_DEGENERATE:
        raise DegenerateConnection(
            f"a - b = {a - b:.6g} is within {TOL_DEGENERATE:g} of an integer; "
            "use the logarithmic expansion or the ODE oracle"
        )


def _connection(a, b, c, z):
    """1/z connection formula, valid for |arg(-z)| < pi and |1/z| < 1."""
    _check_degenerate(a, b)
    z = np.asarray(z, dtype=complex)
    u = 1.0 / z
    gc = gamma(c)
    pref_a = gc * gamma(b - a) * rgamma(b) * rgamma(c - a)
    pref_b = gc * gamma(a - b) * rgamma(a) * rgamma(c - b)
    pref_a *= 1.0 + _PREFACTOR_PERTURBATION
    f_a, _ = _series(a, a - c + 1.0, a - b + 1.0, u)
    f_b, _ = _series(b, b - c + 1.0, b - a + 1.0, u)
    mz = -z
    return pref_a * mz ** (-a) * f_a + pref_b * mz ** (-b) * f_b


def _log_case(a, c, z, tol=TOL_SERIES, max_terms=MAX_TERMS):
    """F(a, a; c; z) for |z| > 1 off [0, inf): the m = 0 logarithmic connection.

    F = Gamma(c)/(Gamma(a)Gamma(c-a)) (-z)^(-a) sum_k (a)_k (1-c+a)_k / (k!)^2 z^(-k)
        * [ln(-z) + 2 psi(k+1) - psi(a+k) - psi(c-a-k)]
    """
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    u = 1.0 / flat
    log_mz = np.log(-flat)
    e = c - a
    if _is_nonpositive_integer(e) or _is_nonpositive_integer(a):
        raise InvalidParams("log-case expansion needs a and c - a off the poles")
    pref = gamma(c) * rgamma(a) * rgamma(e)
    coef = 1.0 + 0j
    psi1 = digamma(1.0)
    psia = digamma(a)
    psie = digamma(e)
    total = np.zeros_like(flat)
    small = np.zeros(flat.shape, dtype=int)
    power = np.ones_like(flat)
    for k in range(max_terms):
        term = coef * power * (log_mz + 2.0 * psi1 - psia - psie)
        total += term
        ok = np.abs(term) < tol * np.abs(total)
        small = np.where(ok, small + 1, 0)
        if np.all(small >= _CONSECUTIVE):
            break
        # advance k -> k+1
        coef *= (a + k) * (1.0 - c + a + k) / ((k + 1.0) ** 2)
        power = power * u
        psi1 += 1.0 / (k + 1.0)
        psia += 1.0 / (a + k)
        psie -= 1.0 / (e - k - 1.0)
    else:
        raise NonConvergence("log-case expansion did not converge")
    return (pref * (-flat) ** (-a) * total).reshape(z.shape)


# --------------------------------------------------------------------------
# Taylor continuation along Re z = 1/2


def _taylor_eval(a, b, c, z0, f0, df0, h, tol=TOL_SERIES, max_terms=2000):
    """Value and derivative at z0 + h from the ODE Taylor recurrence about z0.

    z(1-z) f'' + [c - (a+b+1) z] f' - ab f = 0 with z = z0 + x gives
    c_{n+2} = -[(p1 n + q0)(n+1) c_{n+1} + (p2 n(n-1) + q1 n + r) c_n] / (p0 (n+2)(n+1)).
    """
    h = np.asarray(h, dtype=complex)
    p0 = z0 * (1.0 - z0)
    p1 = 1.0 - 2.0 * z0
    p2 = -1.0
    q0 = c - (a + b + 1.0) * z0
    q1 = -(a + b + 1.0)
    r = -a * b
    cn, cn1 = complex(f0), complex(df0)
    val = cn + cn1 * h
    der = np.full(h.shape, cn1, dtype=complex)
    hp = h.copy()  # h^(n+1) for n = 0
    small = np.zeros(h.shape, dtype=int)
    for n in range(max_terms):
        cn2 = -((p1 * n + q0) * (n + 1) * cn1 + (p2 * n * (n - 1) + q1 * n + r) * cn) / (p0 * (n + 2) * (n + 1))
        der_term = (n + 2) * cn2 * hp
        hp = hp * h
        val_term = cn2 * hp
        val += val_term
        der += der_term
        ok = (np.abs(val_term) < tol * np.abs(val)) & (np.abs(der_term) < tol * np.abs(der))
        small = np.where(ok | (h == 0), small + 1, 0)
        if np.all(small >= _CONSECUTIVE):
            return val, der
        cn, cn1 = cn1, cn2
    raise NonConvergence("Taylor continuation did not converge")


_CENTER_STEP = 0.25
_CENTER_MAX = 1.5


@functools.lru_cache(maxsize=256)
def _half_line_centres(a, b, c):
    """(y_j, F, F') at centres 1/2 + i y_j, y_j in {0, +-0.25, ..., +-1.5}."""
    z0 = 0.5 + 0j
    f0, _ = _series(a, b, c, np.array([z0]))
    df0, _ = _series(a + 1, b + 1, c + 1, np.array([z0]))
    f0 = complex(f0[0])
    df0 = complex(df0[0]) * a * b / c
    table = {0.0: (f0, df0)}
    nsteps = int(round(_CENTER_MAX / _CENTER_STEP))
    for sign in (1.0, -1.0):
        f, df = f0, df0
        for j in range(nsteps):
            y = sign * j * _CENTER_STEP
            v, d = _taylor_eval(a, b, c, 0.5 + 1j * y, f, df, np.array([1j * sign * _CENTER_STEP]))
            f, df = complex(v[0]), complex(d[0])
            table[sign * (j + 1) * _CENTER_STEP] = (f, df)
    ys = np.array(sorted(table))
    vals = np.array([table[y][0] for y in ys])
    ders = np.array([table[y][1] for y in ys])
    return ys, vals, ders


def _half_line_taylor(a, b, c, z):
    z = np.asarray(z, dtype=complex)
    ys, vals, ders = _half_line_centres(a, b, c)
    y = z.imag
    j = np.clip(np.rint(y / _CENTER_STEP).astype(int) + len(ys) // 2, 0, len(ys) - 1)
    out = np.empty_like(z)
    for jj in np.unique(j):
        sel = j == jj
        zc = 0.5 + 1j * ys[jj]
        v, _ = _taylor_eval(a, b, c, zc, vals[jj], ders[jj], z[sel] - zc)
        out[sel] = v
    return out


# --------------------------------------------------------------------------
# public evaluators


def _validate_domain(z, domain):
    if not isinstance(domain, EvalDomain):
        domain = EvalDomain(domain)
    if not domain.contains(z):
        raise DomainError(f"z not in {domain.value}")
    return domain


def _f21_array(a, b, c, z, domain, log_case):
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    az = np.abs(z)
    if domain is EvalDomain.UNIT_POINT:
        out[...] = f21_at_one(HypParams(a, b, c))
        return out
    if domain is EvalDomain.CONVERGENCE_DISK:
        out[...], _ = _series(a, b, c, z)
        return out
    near = az <= R_SERIES
    if near.any():
        out[near], _ = _series(a, b, c, z[near])
    if domain is EvalDomain.NEGATIVE_REAL_AXIS:
        mid = (~near) & (az <= PFAFF_MAX)
        far = az > PFAFF_MAX
        if mid.any():
            out[mid] = _pfaff(a, b, c, z[mid])
    else:
        mid = (~near) & (az < 1.0 / R_SERIES)
        far = az >= 1.0 / R_SERIES
        if mid.any():
            out[mid] = _half_line_taylor(a, b, c, z[mid])
    if far.any():
        if log_case and a == b:
            out[far] = _log_case(a, c, z[far])
        else:
            out[far] = _connection(a, b, c, z[far])
    return out


def f21(p: HypParams, z, domain=EvalDomain.NEGATIVE_REAL_AXIS, log_case=False):
    """F(a, b; c; z) for z in ``domain``.

    ``log_case=True`` permits the exact a == b logarithmic expansion in place of
    the 1/z connection formula (the Boussinesq critical regime).
    """
    domain = _validate_domain(z, domain)
    val = _f21_array(p.a, p.b, p.c, z, domain, log_case)
    return _unwrap(val, z)


def f21_derivative(p: HypParams, z, domain=EvalDomain.NEGATIVE_REAL_AXIS, log_case=False):
    """dF/dz = (ab/c) F(a+1, b+1; c+1; z)."""
    domain = _validate_domain(z, domain)
    if domain is EvalDomain.UNIT_POINT:
        raise DomainError("derivative at z = 1 is not supported")
    val = p.a * p.b / p.c * _f21_array(p.a + 1, p.b + 1, p.c + 1, z, domain, log_case)
    return _unwrap(val, z)


def contiguous_derivatives(p: HypParams, z, domain=EvalDomain.NEGATIVE_REAL_AXIS, log_case=False):
    """The three contiguous-relation expressions for dF/dz.

    (ab/c) F(a+1,b+1;c+1;z),
    (c-1)/z [F(a,b;c-1;z) - F(a,b;c;z)],
    [(c-a)(c-b) F(a,b;c+1;z) + c(a+b-c) F(a,b;c;z)] / (c(1-z)).
    """
    domain = _validate_domain(z, domain)
    a, b, c = p.a, p.b, p.c
    zz = np.asarray(z, dtype=complex)
    f = _f21_array(a, b, c, zz, domain, log_case)
    d1 = a * b / c * _f21_array(a + 1, b + 1, c + 1, zz, domain, log_case)
    if _is_nonpositive_integer(c - 1):
        d2 = np.full_like(zz, np.nan)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            d2 = (c - 1) / zz * (_f21_array(a, b, c - 1, zz, domain, log_case) - f)
    d3 = ((c - a) * (c - b) * _f21_array(a, b, c + 1, zz, domain, log_case) + c * (a + b - c) * f) / (c * (1 - zz))
    return _unwrap(d1, z), _unwrap(d2, z), _unwrap(d3, z)


def f21_at_one(p: HypParams):
    """Gauss formula Gamma(c)Gamma(c-a-b) / (Gamma(c-a)Gamma(c-b))."""
    a, b, c = p.a, p.b, p.c
    if (c - a - b).real <= 0.0:
        raise Divergent(f"F(a,b;c;1) diverges: Re(c - a - b) = {(c - a - b).real:g} <= 0")
    if a == 0 or b == 0:
        return 1.0 + 0j
    return gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b)


def wronskian_pair(p: HypParams, z, domain=EvalDomain.NEGATIVE_REAL_AXIS):
    """f1, f1', f2, f2' for f1 = F(a,b;c;z), f2 = z^(1-c) F(1+a-c, 1+b-c; 2-c; z)."""
    a, b, c = p.a, p.b, p.c
    if abs(c - round(c.real)) == 0:
        raise InvalidParams("the Wronskian pair needs a noninteger c")
    q = HypParams(1 + a - c, 1 + b - c, 2 - c)
    zz = np.asarray(z, dtype=complex)
    f1 = np.asarray(f21(p, zz, domain))
    df1 = np.asarray(f21_derivative(p, zz, domain))
    g = np.asarray(f21(q, zz, domain))
    dg = np.asarray(f21_derivative(q, zz, domain))
    zp = zz ** (1 - c)
    f2 = zp * g
    df2 = (1 - c) * zp / zz * g + zp * dg
    return f1, df1, f2, df2


def wronskian_exact(p: HypParams, z):
    zz = np.asarray(z, dtype=complex)
    return (1 - p.c) * zz ** (-p.c) * (1 - zz) ** (p.c - 1 - p.a - p.b)


def wronskian_residual(p: HypParams, z, domain=None):
    """Max relative deviation of f1 f2' - f1' f2 from (1-c) z^-c (1-z)^(c-1-a-b)."""
    zz = np.asarray(z, dtype=complex)
    if domain is None:
        domain = EvalDomain.NEGATIVE_REAL_AXIS if EvalDomain.NEGATIVE_REAL_AXIS.contains(zz) else EvalDomain.HALF_LINE
    f1, df1, f2, df2 = wronskian_pair(p, zz, domain)
    w = f1 * df2 - df1 * f2
    exact = wronskian_exact(p, zz)
    return float(np.max(np.abs(w - exact) / np.abs(exact)))


def pfaff_values(p: HypParams, z):
    """Both Pfaff forms at z (any z with |z/(z-1)| <= R_SERIES); used by the identity suite."""
    zz = np.asarray(z, dtype=complex)
    return _unwrap(_pfaff(p.a, p.b, p.c, zz, "b"), z), _unwrap(_pfaff(p.a, p.b, p.c, zz, "a"), z)


def euler_transform_value(p: HypParams, z, domain=EvalDomain.NEGATIVE_REAL_AXIS):
    """(1-z)^(c-a-b) F(c-a, c-b; c; z)."""
    zz = np.asarray(z, dtype=complex)
    q = HypParams(p.c - p.a, p.c - p.b, p.c)
    val = (1 - zz) ** (p.c - p.a - p.b) * np.asarray(f21(q, zz, domain))
    return _unwrap(val, z)


def set_prefactor_perturbation(eps):
    """Test hook: scale the first connection prefactor by (1 + eps)."""
    global _PREFACTOR_PERTURBATION
    _PREFACTOR_PERTURBATION = float(eps)
