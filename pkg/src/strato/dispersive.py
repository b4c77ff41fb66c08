"""No-shear (B^2 = infinity) internal gravity waves.

Each mode oscillates with lambda(k, eta) = |k| N / sqrt(k^2 + eta^2) (or with
beta^2/4 added under the root for the weighted full Euler variables).  Decay in
L^inf_y comes from the oscillatory integral of exp(i (lambda t + eta y)), whose
third-order stationary point on the ray y = c t gives the t^(-1/3) rate.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadWindow, InvalidMode, InvalidParams, NotConvex, QuadratureFailure
from .gammafn import gamma

# Gauss-Kronrod 7-15 nodes on [-1, 1] (nonnegative half) and weights
_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate((-_XK[:-1], _XK[::-1]))
_WEIGHTS_K = np.concatenate((_WK[:-1], _WK[::-1]))
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate((_WG[:-1], _WG[::-1]))

SQRT3_GAMMA_THIRD = math.sqrt(3.0) * gamma(1.0 / 3.0).real


@dataclass(frozen=True)
class DispersionParams:
    N: float
    beta: float = 0.0
    model: str = "boussinesq"

    def __post_init__(self):
        if self.model not in ("boussinesq", "full_euler"):
            raise InvalidParams(f"unknown model {self.model!r}")
        if self.N <= 0:
            raise InvalidParams("N must be positive")

    def shift(self):
        return 0.25 * self.beta**2 if self.model == "full_euler" else 0.0


def dispersion(k, eta, p: DispersionParams):
    """Positive frequency lambda(k, eta)."""
    k = np.asarray(k, dtype=float)
    if np.any(k == 0):
        raise InvalidMode("k = 0 modes are stationary")
    eta = np.asarray(eta, dtype=float)
    lam = np.abs(k) * p.N / np.sqrt(k * k + eta * eta + p.shift())
    return float(lam) if lam.ndim == 0 else lam


def evolve_no_shear_mode(k, eta, p: DispersionParams, t, psi0_hat, T0_hat):
    """(psi_hat, T_hat) at time t with C_{1,2} = (psi0 +- (lambda/k) T0) / 2."""
    lam = dispersion(k, eta, p)
    C1 = 0.5 * (psi0_hat + lam / k * T0_hat)
    C2 = 0.5 * (psi0_hat - lam / k * T0_hat)
    ep = np.exp(1j * lam * t)
    em = np.conj(ep) if np.isrealobj(lam * t) else np.exp(-1j * lam * t)
    return C1 * ep + C2 * em, k / lam * (C1 * ep - C2 * em)


def mode_energy(k, eta, p: DispersionParams, psi_hat, T_hat):
    """N^2 |T|^2 + (k^2 + eta^2 [+ beta^2/4]) |psi|^2."""
    k = np.asarray(k, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return p.N**2 * np.abs(T_hat) ** 2 + (k * k + eta * eta + p.shift()) * np.abs(psi_hat) ** 2


def field_energy(fld, p: DispersionParams, t):
    """beta g ||T||^2 + ||grad psi||^2 (plus beta^2/4 ||Psi||^2 when weighted) at time t.

    Evaluated spectrally on the grid of a :class:`~strato.field.SpectralField`;
    k = 0 rows are stationary and included.
    """
    grid = fld.grid
    k = grid.k.astype(float)[:, None]
    eta = grid.eta[None, :]
    psi = np.array(fld.psi_hat, dtype=complex)
    T = np.array(fld.T_hat, dtype=complex)
    nz = k[:, 0] != 0
    kk = np.broadcast_to(k, psi.shape)[nz]
    ee = np.broadcast_to(eta, psi.shape)[nz]
    psi[nz], T[nz] = evolve_no_shear_mode(kk, ee, p, t, psi[nz], T[nz])
    dens = p.N**2 * np.abs(T) ** 2 + (k * k + eta * eta + p.shift()) * np.abs(psi) ** 2
    return float(np.sum(dens) * grid.deta)


def conservation_drift(fld, p: DispersionParams, times):
    """max_t |E(t) - E(0)| / E(0) for the global invariant."""
    e0 = field_energy(fld, p, 0.0)
    if e0 == 0:
        return 0.0
    return max(abs(field_energy(fld, p, t) - e0) / e0 for t in times)


def mode_energy_drift(k, eta, p: DispersionParams, psi0, T0, times):
    e0 = mode_energy(k, eta, p, psi0, T0)
    drift = 0.0
    for t in times:
        ps, Ts = evolve_no_shear_mode(k, eta, p, t, psi0, T0)
        drift = max(drift, float(np.max(np.abs(mode_energy(k, eta, p, ps, Ts) - e0) / np.maximum(e0, 1e-300))))
    return drift


# --------------------------------------------------------------------------
# panel-adaptive Gauss-Kronrod


def _gk_panels(func, a, b):
    """K15 values and |K15 - G7| errors on every panel [a_i, b_i]."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = func(x)
    k15 = half * (fx @ _WEIGHTS_K)
    g7 = half * (fx @ _WEIGHTS_G)
    return k15, np.abs(k15 - g7)


def gk_integrate(func, breaks, tol=1e-8, max_rounds=40, max_panels=4_000_000):
    """Integral of a vectorised complex ``func`` over the union of panels in ``breaks``.

    Panels whose Kronrod-Gauss difference exceeds their share of ``tol`` are
    bisected until the summed error estimate is below ``tol``.
    """
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1], breaks[1:]
    total = 0.0 + 0.0j
    err_done = 0.0
    length = float(breaks[-1] - breaks[0])
    for _ in range(max_rounds):
        val, err = _gk_panels(func, a, b)
        budget = tol * (b - a) / length
        ok = err <= budget
        total += val[ok].sum()
        err_done += err[ok].sum()
        if ok.all():
            return total, err_done
        a, b = a[~ok], b[~ok]
        if 2 * a.size > max_panels:
            break
        m = 0.5 * (a + b)
        a, b = np.concatenate((a, m)), np.concatenate((m, b))
    val, err = _gk_panels(func, a, b)
    if err_done + err.sum() <= tol:
        # some panels kept more than their share, but the total meets the target
        return total + val.sum(), err_done + err.sum()
    worst = int(np.argmax(err))
    raise QuadratureFailure(f"quadrature error {err.sum():.3g} above {tol:.3g}", panel=(a[worst], b[worst]))


def _phase_breaks(dphase, lo, hi, fixed, max_phase=math.pi / 4, samples=20001):
    """Break points so that the phase moves by at most ``max_phase`` per panel."""
    grid = np.linspace(lo, hi, samples)
    rate = np.abs(dphase(grid))
    # cumulative phase variation, trapezoid on a fine grid
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(grid))))
    n_pan = max(1, int(math.ceil(cum[-1] / max_phase)))
    levels = np.linspace(0.0, cum[-1], n_pan + 1)
    pts = np.interp(levels, cum, grid)
    pts = np.concatenate((pts, [x for x in fixed if lo < x < hi], [lo, hi]))
    # keep every panel no wider than 1/16 of the range so smooth regions are sampled too
    pts = np.concatenate((pts, np.linspace(lo, hi, 17)))
    return np.unique(pts)


def _lambda_parts(k, N):
    kk = float(k * k)
    ak = abs(k)

    def lam(eta):
        return ak * N / np.sqrt(kk + eta * eta)

    def dlam(eta):
        return -ak * N * eta / (kk + eta * eta) ** 1.5

    return lam, dlam


def stationary_points(k, N, t, y, lo, hi):
    """Roots of lambda'(eta) t + y on [lo, hi] (at most three)."""
    from scipy.optimize import brentq

    _, dlam = _lambda_parts(k, N)
    h1 = lambda e: dlam(e) * t + y  # noqa: E731
    e_inf = abs(k) / math.sqrt(2.0)
    cuts = [lo] + [x for x in (-e_inf, 0.0, e_inf) if lo < x < hi] + [hi]
    # lambda' is monotone between its extrema at -+k/sqrt2 and 0 is a zero of lambda'
    roots = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        fa, fb = h1(a), h1(b)
        if fa == 0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(brentq(h1, a, b, xtol=1e-14, rtol=1e-14))
    return roots


def oscillatory_integral(k, N, t, y, n, tol=1e-8):
    """\\int_{-n}^{n} exp(i (lambda(k, eta) t + eta y)) d eta."""
    if t == 0:
        raise InvalidParams("t must be nonzero")
    if n <= abs(k) / math.sqrt(2.0):
        raise InvalidParams(f"n = {n} must exceed |k|/sqrt(2) = {abs(k) / math.sqrt(2.0):.4g}")
    lam, dlam = _lambda_parts(k, N)

    def func(eta):
        return np.exp(1j * (lam(eta) * t + eta * y))

    fixed = [-abs(k) / math.sqrt(2.0), abs(k) / math.sqrt(2.0)] + stationary_points(k, N, t, y, -n, n)
    breaks = _phase_breaks(lambda e: dlam(e) * t + y, -n, n, fixed)
    val, _ = gk_integrate(func, breaks, tol)
    return val


def lemma_envelope(k, N, t, n):
    """|k|^(3/2) |N t|^(-1/3) + |N t|^(-1/2) |k|^(-1/2) n^(3/2)."""
    nt = abs(N * t)
    return abs(k) ** 1.5 * nt ** (-1.0 / 3.0) + nt ** -0.5 * abs(k) ** -0.5 * n**1.5


def sup_abs_integral(k, N, t, n, tol=1e-8, pad=4):
    """(sup_y |I(y)|, argmax y) for the oscillatory integral.

    A trapezoid FFT over a fine eta grid scans all y; the best candidates are
    then polished with the adaptive quadrature and a bounded scalar search.
    """
    from scipy.optimize import minimize_scalar

    lam, dlam = _lambda_parts(k, N)
    max_rate = abs(t) * float(np.max(np.abs(dlam(np.array([abs(k) / math.sqrt(2.0)]))))) + 1.0
    y_reach = max_rate + 10.0  # |y| beyond ~|t| max|lambda'| is non-stationary
    d_eta = min(0.25 / max_rate, 2 * n / 4096)
    m = int(2 ** math.ceil(math.log2(pad * max(2 * n / d_eta, 2 * y_reach * 2 * n / (2 * math.pi)))))
    d_eta = 2 * n / math.floor(2 * n / d_eta)
    npts = int(round(2 * n / d_eta)) + 1
    eta = -n + d_eta * np.arange(npts)
    w = np.full(npts, d_eta)
    w[0] = w[-1] = 0.5 * d_eta
    vals = np.zeros(m, dtype=complex)
    vals[:npts] = w * np.exp(1j * lam(eta) * t)
    # I(y_j) = sum_l w_l e^{i lam t} e^{i eta_l y_j}, y_j = 2 pi j / (m d_eta)
    spec = np.fft.ifft(vals) * m
    y = 2 * math.pi * np.fft.fftfreq(m, d_eta)
    spec = spec * np.exp(-1j * n * y)  # eta starts at -n
    sel = np.abs(y) <= y_reach
    mag = np.abs(spec[sel])
    ys = y[sel]
    order = np.argsort(mag)[::-1][:6]
    dy = 2 * math.pi / (m * d_eta)
    best = (0.0, 0.0)
    for j in order:
        y0 = ys[j]
        res = minimize_scalar(lambda yy: -abs(oscillatory_integral(k, N, t, yy, n, tol)),
                              bounds=(y0 - 2 * dy, y0 + 2 * dy), method="bounded",
                              options={"xatol": 1e-6 * max(1.0, abs(y0))})
        val = -res.fun
        if val > best[0]:
            best = (val, float(res.x))
    return best


@dataclass
class EnvelopeReport:
    n: float
    ratios: dict = field(default_factory=dict)  # (t, k) -> sup|I| / envelope

    def constant_by_time(self):
        times = sorted({t for t, _ in self.ratios})
        return {t: max(r for (tt, _), r in self.ratios.items() if tt == t) for t in times}

    def spread(self):
        """Max relative deviation of the per-time constants from their mean."""
        c = np.array(list(self.constant_by_time().values()))
        return float(np.max(np.abs(c / c.mean() - 1.0)))


def lemma_envelope_sweep(times, ks, N=1.0, n=8.0, tol=1e-8):
    rep = EnvelopeReport(n=n)
    for t in times:
        for k in ks:
            sup, _ = sup_abs_integral(k, N, t, n, tol)
            rep.ratios[(t, k)] = sup / lemma_envelope(k, N, t, n)
    return rep


# --------------------------------------------------------------------------
# Van der Corput


def vdc_bound_check(x, h, which="second", conv_tol=1e-9):
    """Check |\\int e^{i h}| against the first- or second-derivative bound.

    ``x`` are increasing sample points and ``h`` the sampled phase (or a
    callable evaluated on ``x``).  The integral uses cubic-spline quadrature of
    the samples; derivatives come from the spline.
    Returns (holds, lhs, rhs).
    """
    from scipy.interpolate import CubicSpline

    x = np.asarray(x, dtype=float)
    hv = h(x) if callable(h) else np.asarray(h, dtype=float)
    d2 = np.diff(hv, 2)
    # second differences of a linear phase are pure roundoff, so measure them against |h|
    thresh = max(conv_tol * np.max(np.abs(d2)), 1e-12 * np.max(np.abs(hv)), 1e-300)
    if np.any(d2 > thresh) and np.any(d2 < -thresh):
        raise NotConvex("phase has second differences of both signs")
    cs = CubicSpline(x, hv)
    ca, sa = CubicSpline(x, np.cos(hv)), CubicSpline(x, np.sin(hv))
    lhs = abs(complex(ca.integrate(x[0], x[-1]), sa.integrate(x[0], x[-1])))
    fine = np.linspace(x[0], x[-1], 8 * x.size)
    if which == "first":
        mn = float(np.min(np.abs(cs(fine, 1))))
        rhs = math.inf if mn == 0 else 2.0 / mn
    elif which == "second":
        mn = float(np.min(np.abs(cs(fine, 2))))
        rhs = math.inf if mn == 0 else 4.0 / math.sqrt(mn)
    else:
        raise InvalidParams("which must be 'first' or 'second'")
    return lhs <= rhs, lhs, rhs


# --------------------------------------------------------------------------
# sharpness of t^(-1/3)


@functools.lru_cache(maxsize=16)
def _g_taylor(k, N, order=14):
    """Taylor coefficients of g(eta) = lambda(eta) + c eta about eta* (index j = h^j coefficient)."""
    import mpmath

    with mpmath.workdps(40):
        kk = mpmath.mpf(k)
        NN = mpmath.mpf(N)
        es = kk / mpmath.sqrt(2)
        c = 2 * NN / (3 * mpmath.sqrt(3) * kk)
        coeffs = mpmath.taylor(lambda e: abs(kk) * NN / mpmath.sqrt(kk * kk + e * e) + c * e, es, order)
        return tuple(float(v) for v in coeffs)


@dataclass(frozen=True)
class SharpnessGeometry:
    k: float
    N: float

    @property
    def eta_star(self):
        return self.k / math.sqrt(2.0)

    @property
    def c(self):
        return 2.0 * self.N / (3.0 * math.sqrt(3.0) * self.k)

    @property
    def u_star(self):
        return 4.0 * math.sqrt(2.0) * self.N / (3.0 * math.sqrt(3.0))

    @property
    def g3_exact(self):
        return self.N / self.k**3 * 16.0 / 27.0 * math.sqrt(3.0)

    def g(self, eta):
        eta = np.asarray(eta, dtype=float)
        return abs(self.k) * self.N / np.sqrt(self.k**2 + eta * eta) + self.c * eta

    def dg(self, eta):
        eta = np.asarray(eta, dtype=float)
        return self.c - abs(self.k) * self.N * eta / (self.k**2 + eta * eta) ** 1.5

    def d2g(self, eta):
        eta = np.asarray(eta, dtype=float)
        k2 = self.k**2
        return abs(self.k) * self.N * (2 * eta * eta - k2) / (k2 + eta * eta) ** 2.5

    def d3g(self, eta):
        eta = np.asarray(eta, dtype=float)
        k2 = self.k**2
        return abs(self.k) * self.N * 3 * eta * (3 * k2 - 2 * eta * eta) / (k2 + eta * eta) ** 3.5

    _SERIES_RADIUS = 0.05

    def g_minus_u_and_dg(self, eta):
        """(g - u*, g') without cancellation near eta*."""
        eta = np.asarray(eta, dtype=float)
        h = eta - self.eta_star
        near = np.abs(h) <= self._SERIES_RADIUS * abs(self.k)
        coef = _g_taylor(self.k, self.N)
        gm = np.empty_like(eta)
        d1 = np.empty_like(eta)
        hn = h[near]
        gm[near] = sum(coef[j] * hn**j for j in range(3, len(coef)))
        d1[near] = sum(j * coef[j] * hn ** (j - 1) for j in range(3, len(coef)))
        far = ~near
        A = math.sqrt(self.k**2 + self.eta_star**2)
        B = np.sqrt(self.k**2 + eta[far] ** 2)
        hf = h[far]
        gm[far] = hf * (self.c - abs(self.k) * self.N * (2 * self.eta_star + hf) / (A * B * (A + B)))
        d1[far] = self.dg(eta[far])
        return gm, d1

    def profile(self, eta):
        """f = g' / |g - u*|^(2/3) on its support."""
        gm, d1 = self.g_minus_u_and_dg(eta)
        with np.errstate(divide="ignore", invalid="ignore"):
            f = d1 / np.abs(gm) ** (2.0 / 3.0)
        h = np.asarray(eta, dtype=float) - self.eta_star
        # limit at eta*: (g'''/2) h^2 / (g''' |h|^3 / 6)^(2/3)
        f = np.where(h == 0, 0.5 * self.g3_exact / (self.g3_exact / 6.0) ** (2.0 / 3.0), f)
        return f


@dataclass
class SharpnessReport:
    k: float
    N: float
    delta: float
    times: list
    values: list           # t^(1/3) |2 pi psi_hat(t; k, c t)| from the eta quadrature
    u_route: list          # same quantity from the u-variable integral
    limit: float = SQRT3_GAMMA_THIRD

    def relative_gaps(self):
        return [abs(v / self.limit - 1.0) for v in self.values]


def _check_window(geo: SharpnessGeometry, delta):
    if not (math.isfinite(delta) and delta > 0):
        raise BadWindow(f"window half-width must be positive and finite, got {delta}")
    lo, hi = geo.eta_star - delta, geo.eta_star + delta
    e = np.linspace(lo, hi, 4001)
    e = e[np.abs(e - geo.eta_star) > 1e-9 * abs(geo.k)]
    _, d1 = geo.g_minus_u_and_dg(e)
    if np.any(d1 <= 0):
        raise BadWindow(f"g' is not positive on the window of half-width {delta}")
    return lo, hi


def sharpness_value(k, N, delta, t, tol=1e-10):
    """t^(1/3) |2 pi psi_hat(t; k, c t)| by quadrature in eta."""
    geo = SharpnessGeometry(k, N)
    lo, hi = _check_window(geo, delta)
    y = geo.c * t
    lam, dlam = _lambda_parts(k, N)

    def func(eta):
        return geo.profile(eta) * np.exp(1j * ((lam(eta) - lam(geo.eta_star)) * t + (eta - geo.eta_star) * y))

    breaks = _phase_breaks(lambda e: dlam(e) * t + y, lo, hi, [geo.eta_star])
    val, _ = gk_integrate(func, breaks, tol)
    return t ** (1.0 / 3.0) * abs(val)


def truncated_power_integral(a_minus, a_plus, t, tol=1e-12):
    """|\\int_{a- t}^{a+ t} |xi|^(-2/3) e^{i xi} d xi| by the substitution xi = +-w^3."""
    def piece(A):
        # \int_0^A xi^(-2/3) e^{+-i xi} = 3 \int_0^{A^(1/3)} e^{+-i w^3} dw
        top = A ** (1.0 / 3.0)
        rate = lambda w: 3 * w * w  # noqa: E731
        br = _phase_breaks(rate, 0.0, top, [])
        vp, _ = gk_integrate(lambda w: 3 * np.exp(1j * w**3), br, tol)
        return vp

    right = piece(a_plus * t)
    left = np.conj(piece(-a_minus * t))
    return abs(left + right)


def sharpness_profile(k=1.0, N=1.0, delta=0.2, times=(1e2, 1e3, 1e4), tol=1e-10):
    geo = SharpnessGeometry(k, N)
    lo, hi = _check_window(geo, delta)
    gm_lo, _ = geo.g_minus_u_and_dg(np.array([lo]))
    gm_hi, _ = geo.g_minus_u_and_dg(np.array([hi]))
    vals, uvals = [], []
    for t in times:
        vals.append(sharpness_value(k, N, delta, t, tol))
        uvals.append(truncated_power_integral(float(gm_lo[0]), float(gm_hi[0]), t))
    return SharpnessReport(k, N, delta, list(times), vals, uvals)
