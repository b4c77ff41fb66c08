"""Two-dimensional fields built from the per-mode solutions.

Conventions (x has period 2 pi, y is the whole line truncated to [-Ly, Ly)):

    f_hat(k, eta) = (1 / 2 pi) \\int\\int exp(-i k x - i eta y) f dx dy,

so that  \\int\\int |f|^2 = sum_k \\int |f_hat|^2 d eta.  The mixed representation
uses f_hat(k, y) = (2 pi)^(-1/2) \\int exp(-i k x) f dx.

Spectral arrays have shape (Nx, Ny) indexed by ``fftfreq`` order in both k and
eta; physical arrays have shape (Nx, Ny) indexed by (x_i, y_j).  Evolution
happens in the sheared frame z = x - t y, where every mode is independent; the
lab frame is recovered by the phase exp(-i k t y) in the mixed representation.
"""
from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .boussinesq import ModeIndex, RegimeParams, evolve_mode, evolve_mode_homogeneous
from .errors import InvalidParams, TruncationError, UnsupportedCombination

TOL_TRUNC = 1e-12
COMPONENTS = ("stream", "density", "vx", "vy")


class Model(enum.Enum):
    BOUSSINESQ = "boussinesq"
    FULL_EULER = "full_euler"
    NO_SHEAR = "no_shear"


def _is_pow2(n):
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class GridSpec:
    Nx: int
    Ny: int
    Ly: float

    def __post_init__(self):
        if not (_is_pow2(self.Nx) and _is_pow2(self.Ny)):
            raise InvalidParams("Nx and Ny must be powers of two")
        if self.Ly <= 0:
            raise InvalidParams("Ly must be positive")

    @property
    def dy(self):
        return 2.0 * self.Ly / self.Ny

    @property
    def dx(self):
        return 2.0 * math.pi / self.Nx

    @property
    def y(self):
        return -self.Ly + self.dy * np.arange(self.Ny)

    @property
    def x(self):
        return self.dx * np.arange(self.Nx)

    @property
    def k(self):
        return np.rint(np.fft.fftfreq(self.Nx) * self.Nx).astype(int)

    @property
    def eta(self):
        return 2.0 * math.pi * np.fft.fftfreq(self.Ny, self.dy)

    @property
    def deta(self):
        return 2.0 * math.pi / (self.Ny * self.dy)

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")


# --------------------------------------------------------------------------
# transforms


def forward(grid: GridSpec, f):
    """Physical (Nx, Ny) samples -> spectral amplitudes with the 1/(2 pi) convention."""
    f = np.asarray(f)
    phase = np.exp(1j * grid.eta * grid.Ly)  # exp(-i eta y0) with y0 = -Ly
    return grid.dy / grid.Nx * np.fft.fft2(f) * phase[None, :]


def to_mixed(grid: GridSpec, fhat):
    """Spectral -> (k, y) amplitudes f_k(y) with f = sum_k exp(i k x) f_k(y)."""
    phase = np.exp(-1j * grid.eta * grid.Ly)
    return np.fft.ifft(fhat * phase[None, :], axis=1) / grid.dy


def from_mixed(grid: GridSpec, fk):
    return grid.Nx * np.fft.ifft(fk, axis=0)


def inverse(grid: GridSpec, fhat, real=True):
    f = from_mixed(grid, to_mixed(grid, fhat))
    return f.real if real else f


def _nyquist_mask(grid):
    mask = np.ones((grid.Nx, grid.Ny), dtype=bool)
    mask[grid.Nx // 2, :] = False
    mask[:, grid.Ny // 2] = False
    return mask


# --------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class SpectralField:
    """Initial data in spectral form.

    ``psi_hat`` is the stream function and ``T_hat`` the scaled density: T for
    the sheared Boussinesq model, the weighted Psi, Upsilon for the full Euler
    model (``weight_applied``), and rho/A itself when beta = 0.
    """

    grid: GridSpec
    model: Model
    psi_hat: np.ndarray
    T_hat: np.ndarray
    weight_applied: bool = False
    beta: float = 0.0

    def __post_init__(self):
        if self.model is Model.FULL_EULER and not self.weight_applied:
            raise InvalidParams("full Euler data must carry the exp(-beta y / 2) weight")

    def project_nonzero(self):
        return replace(self, psi_hat=project_nonzero(self.psi_hat), T_hat=project_nonzero(self.T_hat))


def project_nonzero(fhat):
    """P_{!=0}: drop the k = 0 row of a spectral or mixed array."""
    out = np.array(fhat, copy=True)
    out[0, ...] = 0.0
    return out


def _check_truncation(grid, samples, name, tol):
    edge = max(np.max(np.abs(samples[:, 0])), np.max(np.abs(samples[:, -1])))
    scale = max(np.max(np.abs(samples)), 1e-300)
    if edge > tol * scale and edge > tol:
        raise TruncationError(f"{name} is {edge:.3g} at |y| = Ly; enlarge Ly")


def ingest_initial_data(grid: GridSpec, psi0_samples, rho0_samples, model, params: RegimeParams | None = None,
                        tol_trunc=TOL_TRUNC):
    """Transform sampled initial data; rho0 is the relative density (rho/A or rho/rho0).

    The scaled density stored is T0 = R rho0 / beta under shear, rho0 / beta
    without shear, and rho0 itself when beta = 0.  The full Euler model
    multiplies both fields by exp(-beta y / 2) first.
    """
    model = Model(model)
    params = params or RegimeParams()
    psi0 = np.asarray(psi0_samples, dtype=float)
    rho0 = np.asarray(rho0_samples, dtype=float)
    if psi0.shape != (grid.Nx, grid.Ny) or rho0.shape != (grid.Nx, grid.Ny):
        raise InvalidParams(f"samples must have shape {(grid.Nx, grid.Ny)}")
    beta = params.beta
    weighted = model is Model.FULL_EULER
    if weighted:
        if beta <= 0:
            raise InvalidParams("the full Euler model needs beta > 0")
        w = np.exp(-0.5 * beta * grid.y)[None, :]
        psi0, rho0 = psi0 * w, rho0 * w
    _check_truncation(grid, psi0, "psi0", tol_trunc)
    _check_truncation(grid, rho0, "rho0", tol_trunc)
    if beta == 0.0:
        T0 = rho0
    elif model is Model.NO_SHEAR or params.R == 0.0:
        T0 = rho0 / beta
    else:
        T0 = params.R * rho0 / beta
    return SpectralField(grid, model, forward(grid, psi0), forward(grid, T0), weighted, beta)


# --------------------------------------------------------------------------
# evolution


@dataclass
class FieldSnapshot:
    """Sheared-frame spectral amplitudes of every component at time t.

    For the full Euler model the components are the weighted ones
    (chi, mu and exp(-beta y / 2) v).
    """

    t: float
    grid: GridSpec
    model: Model
    spectral: dict = field(default_factory=dict)
    shear: bool = True

    def mixed(self, name, frame="lab"):
        fk = to_mixed(self.grid, self.spectral[name])
        if frame == "lab" and self.shear:
            fk = fk * np.exp(-1j * np.outer(self.grid.k, self.grid.y) * self.t)
        elif frame not in ("lab", "sheared"):
            raise InvalidParams(f"unknown frame {frame!r}")
        return fk

    def physical(self, name=None, frame="lab"):
        """Real physical arrays; all components when ``name`` is None."""
        if name is None:
            return {c: self.physical(c, frame) for c in self.spectral}
        return from_mixed(self.grid, self.mixed(name, frame)).real


def _evolve_column(fld, params, k, t, psi, T):
    eta = fld.grid.eta
    if fld.model is Model.NO_SHEAR:
        from .dispersive import DispersionParams, evolve_no_shear_mode

        dp = DispersionParams(N=params.N, beta=fld.beta if fld.weight_applied else 0.0,
                              model="full_euler" if fld.weight_applied else "boussinesq")
        ps, Ts = evolve_no_shear_mode(k, eta, dp, t, psi, T)
        if fld.weight_applied:
            vx = (-1j * eta - 0.5 * fld.beta) * ps
        else:
            vx = -1j * eta * ps
        return ps, Ts, vx, 1j * k * ps
    if fld.model is Model.FULL_EULER:
        from .euler import EulerModeParams, evolve_euler_mode

        st = evolve_euler_mode(EulerModeParams(k, eta, fld.beta, params.B2), t, psi, T)
        return st.chi, st.mu, st.wvx, st.wvy
    m = ModeIndex(k, eta)
    if params.B2 == 0.0:
        st = evolve_mode_homogeneous(m, t, psi, T, g=params.g / params.R**2)
    else:
        st = evolve_mode(m, params, t, psi, T)
    return st.phi, st.tau, st.vx, st.vy


def evolve_field(fld: SpectralField, params: RegimeParams, t, skip_tol=1e-14):
    """Snapshot at shear time t.

    k = 0 rows are time-invariant in every model.  Rows whose data is below
    ``skip_tol`` times the global maximum are treated as empty; the Nyquist row
    and column are dropped.
    """
    grid = fld.grid
    shape = (grid.Nx, grid.Ny)
    out = {c: np.zeros(shape, dtype=complex) for c in COMPONENTS}
    mask = _nyquist_mask(grid)
    psi_all = fld.psi_hat * mask
    T_all = fld.T_hat * mask
    scale = max(np.max(np.abs(psi_all)), np.max(np.abs(T_all)))
    eta = grid.eta
    # k = 0
    out["stream"][0] = psi_all[0]
    out["density"][0] = T_all[0]
    wshift = 0.5 * fld.beta if fld.weight_applied else 0.0
    out["vx"][0] = (-1j * eta - wshift) * psi_all[0]
    for row, k in enumerate(grid.k):
        if k == 0 or row == grid.Nx // 2:
            continue
        psi, T = psi_all[row], T_all[row]
        if scale == 0 or max(np.max(np.abs(psi)), np.max(np.abs(T))) <= skip_tol * scale:
            continue
        res = _evolve_column(fld, params, int(k), float(t), psi, T)
        for c, v in zip(COMPONENTS, res):
            out[c][row] = v
    for c in COMPONENTS:
        out[c] *= mask
    return FieldSnapshot(float(t), grid, fld.model, out, shear=fld.model is not Model.NO_SHEAR)


# --------------------------------------------------------------------------
# norms


class NormKind(enum.Enum):
    L2 = "L2"
    L2X_LINFY = "L2x_LInfY"
    SOBOLEV_HXHY = "SobolevHxHy"
    SOBOLEV_HXWY = "SobolevHxWy"


@dataclass(frozen=True)
class Spectral:
    """Tag for a spectral (k, eta) array on ``grid``."""

    grid: GridSpec
    data: np.ndarray


@dataclass(frozen=True)
class Physical:
    """Tag for a physical (x, y) array on ``grid``."""

    grid: GridSpec
    data: np.ndarray


def norm(f, kind="L2", projection="full", weight=None, sx=0.0, sy=0.0, p=2.0):
    """Norm of a :class:`Spectral` or :class:`Physical` array.

    L2: (sum |f|^2 dx dy)^(1/2) = (sum_k \\int |f_hat|^2 d eta)^(1/2).
    L2x_LInfY: (sum_k sup_y |f_hat(k, y)|^2)^(1/2), mixed 1/sqrt(2 pi) convention.
    SobolevHxHy: weights (1 + k^2)^sx (1 + eta^2)^sy on |f_hat|^2.
    SobolevHxWy: (sum_k (1 + k^2)^sx ||f_hat(k, .)||_{W^{sy,p}}^2)^(1/2); integer sy
    uses sum_j<=sy ||d^j g||_p^p, fractional sy the Bessel potential <D>^sy.
    ``weight`` (physical input only) multiplies by exp(-weight y / 2).
    """
    kind = NormKind(kind)
    if projection not in ("full", "P_neq0"):
        raise InvalidParams(f"unknown projection {projection!r}")
    grid = f.grid
    if isinstance(f, Physical):
        data = np.asarray(f.data, dtype=complex)
        if weight:
            data = data * np.exp(-0.5 * weight * grid.y)[None, :]
        if kind in (NormKind.SOBOLEV_HXHY, NormKind.SOBOLEV_HXWY):
            raise UnsupportedCombination("Sobolev norms need a spectral array; transform with forward() first")
        fhat = forward(grid, data)
        if kind is NormKind.L2 and projection == "full":
            return float(np.sqrt(np.sum(np.abs(data) ** 2) * grid.dx * grid.dy))
    elif isinstance(f, Spectral):
        if weight:
            raise UnsupportedCombination("weights apply to physical samples; weight the data before transforming")
        fhat = np.asarray(f.data, dtype=complex)
    else:
        raise UnsupportedCombination("norm takes a Spectral or Physical array")
    if projection == "P_neq0":
        fhat = project_nonzero(fhat)
    k = grid.k.astype(float)[:, None]
    eta = grid.eta[None, :]
    if kind is NormKind.L2:
        return float(np.sqrt(np.sum(np.abs(fhat) ** 2) * grid.deta))
    if kind is NormKind.SOBOLEV_HXHY:
        w = (1 + k * k) ** sx * (1 + eta * eta) ** sy
        return float(np.sqrt(np.sum(w * np.abs(fhat) ** 2) * grid.deta))
    mixed = math.sqrt(2.0 * math.pi) * to_mixed(grid, fhat)
    if kind is NormKind.L2X_LINFY:
        return float(np.sqrt(np.sum(np.max(np.abs(mixed), axis=1) ** 2)))
    # SobolevHxWy
    rows = np.empty(grid.Nx)
    if float(sy).is_integer():
        acc = np.zeros(grid.Nx)
        for j in range(int(sy) + 1):
            dj = math.sqrt(2.0 * math.pi) * to_mixed(grid, (1j * eta) ** j * fhat)
            acc += np.sum(np.abs(dj) ** p, axis=1) * grid.dy
        rows = acc ** (1.0 / p)
    else:
        bes = math.sqrt(2.0 * math.pi) * to_mixed(grid, (1 + eta * eta) ** (sy / 2) * fhat)
        rows = (np.sum(np.abs(bes) ** p, axis=1) * grid.dy) ** (1.0 / p)
    return float(np.sqrt(np.sum((1 + k[:, 0] ** 2) ** sx * rows**2)))


def snapshot_norm(snap: FieldSnapshot, component, kind="L2", projection="full", frame="sheared", **kw):
    """Norm of one snapshot component; L2-type norms are frame independent."""
    kind = NormKind(kind)
    fhat = snap.spectral[component]
    if kind is NormKind.L2X_LINFY:
        fk = snap.mixed(component, frame)
        if projection == "P_neq0":
            fk = project_nonzero(fk)
        return float(np.sqrt(np.sum(2.0 * math.pi * np.max(np.abs(fk), axis=1) ** 2)))
    if frame == "lab" and kind is NormKind.L2:
        data = from_mixed(snap.grid, snap.mixed(component, "lab"))
        if projection == "P_neq0":
            data = data - data.mean(axis=0, keepdims=True)
        return float(np.sqrt(np.sum(np.abs(data) ** 2) * snap.grid.dx * snap.grid.dy))
    return norm(Spectral(snap.grid, fhat), kind, projection, **kw)


# --------------------------------------------------------------------------
# IO

_MAGIC = b"STRF"
_TAGS = {Model.BOUSSINESQ: 0, Model.FULL_EULER: 1, Model.NO_SHEAR: 2}


def write_csv(path, grid: GridSpec, f):
    """y-major CSV: one row per y sample, one column per x sample."""
    np.savetxt(path, np.asarray(f, dtype=float).T, delimiter=",", fmt="%.17g")


def read_csv(path, grid: GridSpec):
    data = np.loadtxt(path, delimiter=",", ndmin=2).T
    if data.shape != (grid.Nx, grid.Ny):
        raise InvalidParams(f"CSV holds {data.shape}, grid expects {(grid.Nx, grid.Ny)}")
    return data


def write_binary(path, grid: GridSpec, model, arrays):
    """Header (magic, Nx, Ny, Ly, model tag, count) then row-major float64 LE arrays."""
    model = Model(model)
    arrays = [np.ascontiguousarray(a, dtype="<f8") for a in arrays]
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIdII", grid.Nx, grid.Ny, grid.Ly, _TAGS[model], len(arrays)))
        for a in arrays:
            if a.shape != (grid.Nx, grid.Ny):
                raise InvalidParams("array shape does not match the grid")
            fh.write(a.tobytes())


def read_binary(path):
    """(grid, model, [arrays]) from :func:`write_binary` output."""
    raw = Path(path).read_bytes()
    if raw[:4] != _MAGIC:
        raise InvalidParams("not a field file")
    Nx, Ny, Ly, tag, count = struct.unpack_from("<IIdII", raw, 4)
    off = 4 + struct.calcsize("<IIdII")
    grid = GridSpec(Nx, Ny, Ly)
    model = {v: m for m, v in _TAGS.items()}[tag]
    n = Nx * Ny
    arrays = [np.frombuffer(raw, dtype="<f8", count=n, offset=off + 8 * n * i).reshape(Nx, Ny).copy()
              for i in range(count)]
    return grid, model, arrays
