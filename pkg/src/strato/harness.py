"""Configuration-driven experiments: evolve, record norms, fit decay, write reports.

Configs are INI files read with :mod:`configparser`; see ``scripts/configs/`` in the
repository for commented examples.  Sections:

``[experiment]``  model = boussinesq | full_euler | no_shear
``[regime]``      B2, R, beta, g (any consistent subset)
``[grid]``        Nx, Ny, Ly
``[data]``        recipe = gaussian | branch_matched | file, plus recipe keys
``[schedule]``    t_min, t_max, count (log-spaced) or an explicit ``times`` list
``[norms]``       record = component:kind, ...; projection; frame
``[fit]``         window = lo, hi; log_correction = auto | true | false
``[output]``      dir; snapshot = true | false
``[sweep]``       B2 = comma-separated values (used by ``strato sweep``)
"""
from __future__ import annotations

import configparser
import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .boussinesq import RegimeParams
from .dispersive import DispersionParams, conservation_drift
from .errors import ConfigError, ExperimentError, StratoError
from .field import COMPONENTS, GridSpec, Model, NormKind, evolve_field, ingest_initial_data, snapshot_norm, write_binary
from .fitting import fit_decay
from .recipes import branch_matched_packet, file_data, gaussian_packet

CRITICAL_B2 = 0.25


@dataclass(frozen=True)
class NormSpec:
    component: str
    kind: str = "L2"

    @property
    def name(self):
        return f"{self.component}_{self.kind}"

    @classmethod
    def parse(cls, text):
        comp, _, kind = text.strip().partition(":")
        comp = comp.strip()
        kind = kind.strip() or "L2"
        if comp not in COMPONENTS:
            raise ConfigError(f"unknown component {comp!r}; expected one of {COMPONENTS}")
        try:
            NormKind(kind)
        except ValueError as exc:
            raise ConfigError(f"unknown norm kind {kind!r}") from exc
        return cls(comp, kind)


@dataclass(frozen=True)
class DataRecipe:
    name: str = "gaussian"
    k0: int = 1
    sigma: float = 4.0
    amp_psi: float = 1.0
    amp_rho: float = 0.5
    psi_path: str = ""
    rho_path: str = ""


@dataclass(frozen=True)
class ExperimentConfig:
    model: Model
    regime: RegimeParams
    grid: GridSpec
    data: DataRecipe
    times: tuple
    norms: tuple = ()
    projection: str = "P_neq0"
    frame: str = "lab"
    fit_window: tuple | None = None
    log_correction: str = "auto"
    out_dir: str = "out"
    snapshot: bool = False
    sweep_B2: tuple = ()
    seed: int = 0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size == 0 or np.any(np.diff(t) <= 0) or t[0] < 0:
            raise ConfigError("schedule must be a nonempty ascending list of nonnegative times")
        if self.fit_window is not None:
            lo, hi = self.fit_window
            if not (lo < hi and lo >= t[0] * (1 - 1e-12) and hi <= t[-1] * (1 + 1e-12)):
                raise ConfigError(f"fit window {self.fit_window} must lie inside the schedule [{t[0]}, {t[-1]}]")
        if self.projection not in ("full", "P_neq0"):
            raise ConfigError(f"unknown projection {self.projection!r}")
        if self.frame not in ("lab", "sheared"):
            raise ConfigError(f"unknown frame {self.frame!r}")
        if self.log_correction not in ("auto", "true", "false"):
            raise ConfigError("log_correction must be auto, true or false")

    @property
    def window(self):
        if self.fit_window is not None:
            return tuple(self.fit_window)
        return (self.times[-1] / 10.0, self.times[-1])

    def use_log(self):
        if self.log_correction == "auto":
            return self.model is not Model.NO_SHEAR and abs(self.regime.B2 - CRITICAL_B2) < 1e-12
        return self.log_correction == "true"

    def with_B2(self, B2):
        return replace(self, regime=resolve_regime(self.model, {"B2": B2, "R": self.regime.R,
                                                                "beta": self.regime.beta}, strict=False))

    def echo(self):
        """Plain dict of the resolved configuration."""
        return {
            "model": self.model.value,
            "regime": {"B2": _num(self.regime.B2), "R": self.regime.R, "beta": self.regime.beta, "g": self.regime.g},
            "grid": asdict(self.grid),
            "data": asdict(self.data),
            "times": [float(t) for t in self.times],
            "norms": [n.name for n in self.norms],
            "projection": self.projection,
            "frame": self.frame,
            "fit": {"window": list(self.window), "log_correction": self.use_log()},
            "seed": self.seed,
        }


def _num(x):
    return "inf" if x == math.inf else x


def _floats(text):
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def resolve_regime(model, values, strict=True):
    """RegimeParams from any consistent subset of B2, R, beta, g."""
    R = float(values.get("R", 1.0))
    beta = values.get("beta")
    g = values.get("g")
    B2 = values.get("B2")
    beta = None if beta is None else float(beta)
    g = None if g is None else float(g)
    if model is Model.NO_SHEAR:
        if beta is None or g is None:
            raise ConfigError("the no-shear model needs beta and g")
        return RegimeParams(R=0.0, beta=beta, g=g)
    if B2 is None:
        if beta is None or g is None:
            raise ConfigError("give B2, or both beta and g")
        return RegimeParams(R=R, beta=beta, g=g)
    B2 = float(B2)
    if B2 == 0.0:
        return RegimeParams(R=R, beta=0.0, g=1.0 if g is None else g)
    if model is Model.FULL_EULER and beta is None:
        raise ConfigError("the full Euler model needs beta")
    if beta is not None and g is not None and strict:
        implied = beta * g / R**2
        if abs(implied - B2) > 1e-12 * max(1.0, B2):
            raise ConfigError(f"B2 = {B2} but beta g / R^2 = {implied}")
        return RegimeParams(R=R, beta=beta, g=g)
    if beta is None or beta == 0.0:
        return RegimeParams.from_richardson(B2, R=R)
    return RegimeParams.from_richardson(B2, beta=beta, R=R)


def load_config(path, seed=None, out_dir=None):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys such as B2, R and Ny are case-sensitive
    if not cp.read(path):
        raise ConfigError(f"cannot read config {path}")
    return config_from_parser(cp, seed=seed, out_dir=out_dir, base=Path(path).parent)


def config_from_parser(cp, seed=None, out_dir=None, base=Path(".")):
    try:
        model = Model(cp.get("experiment", "model", fallback="boussinesq"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    regime = resolve_regime(model, dict(cp.items("regime")) if cp.has_section("regime") else {})
    gs = cp["grid"] if cp.has_section("grid") else {}
    grid = GridSpec(int(gs.get("Nx", 32)), int(gs.get("Ny", 512)), float(gs.get("Ly", 40.0)))
    ds = cp["data"] if cp.has_section("data") else {}
    data = DataRecipe(
        name=ds.get("recipe", "gaussian"),
        k0=int(ds.get("k0", 1)),
        sigma=float(ds.get("sigma", 4.0)),
        amp_psi=float(ds.get("amp_psi", 1.0)),
        amp_rho=float(ds.get("amp_rho", 0.5)),
        psi_path=str(base / ds["psi_path"]) if ds.get("psi_path") else "",
        rho_path=str(base / ds["rho_path"]) if ds.get("rho_path") else "",
    )
    if data.name not in ("gaussian", "branch_matched", "file"):
        raise ConfigError(f"unknown recipe {data.name!r}")
    ss = cp["schedule"] if cp.has_section("schedule") else {}
    if ss.get("times"):
        times = tuple(_floats(ss["times"]))
    else:
        t_min, t_max = float(ss.get("t_min", 20.0)), float(ss.get("t_max", 200.0))
        count = int(ss.get("count", 16))
        if not 0 < t_min < t_max:
            raise ConfigError("schedule needs 0 < t_min < t_max")
        times = tuple(float(t) for t in np.geomspace(t_min, t_max, count))
    ns = cp["norms"] if cp.has_section("norms") else {}
    norms = tuple(NormSpec.parse(s) for s in ns.get("record", "").split(",") if s.strip())
    fs = cp["fit"] if cp.has_section("fit") else {}
    window = tuple(_floats(fs["window"])) if fs.get("window") else None
    if window is not None and len(window) != 2:
        raise ConfigError("fit window takes two numbers")
    os_ = cp["output"] if cp.has_section("output") else {}
    sweep = tuple(_floats(cp.get("sweep", "B2", fallback="")))
    return ExperimentConfig(
        model=model, regime=regime, grid=grid, data=data, times=times, norms=norms,
        projection=ns.get("projection", "P_neq0"), frame=ns.get("frame", "lab"),
        fit_window=window, log_correction=fs.get("log_correction", "auto").lower(),
        out_dir=out_dir or os_.get("dir", "out"),
        snapshot=str(os_.get("snapshot", "false")).lower() == "true",
        sweep_B2=sweep, seed=int(seed if seed is not None else cp.get("experiment", "seed", fallback=0)),
    )


# --------------------------------------------------------------------------


@dataclass
class Report:
    config: dict
    model_effective: str
    series: dict = field(default_factory=dict)
    fits: list = field(default_factory=list)
    fit_errors: list = field(default_factory=list)
    conservation: list = field(default_factory=list)
    validation: list = field(default_factory=list)

    def to_json(self):
        body = {k: v for k, v in asdict(self).items() if k != "series"}
        body["series"] = sorted(self.series)
        return json.dumps(body, indent=2, sort_keys=True)

    def fit(self, norm):
        for f in self.fits:
            if f["norm"] == norm:
                return f
        raise KeyError(norm)


def _stage(name):
    def deco(fn):
        def wrapped(*a, **kw):
            try:
                return fn(*a, **kw)
            except ExperimentError:
                raise
            except (StratoError, ValueError, ArithmeticError, OSError) as exc:
                raise ExperimentError(name, exc) from exc
        return wrapped
    return deco


def effective_model(cfg: ExperimentConfig):
    """beta = 0 full Euler data is the homogeneous Boussinesq problem."""
    if cfg.model is Model.FULL_EULER and cfg.regime.beta == 0.0:
        return Model.BOUSSINESQ
    return cfg.model


@_stage("data")
def build_data(cfg: ExperimentConfig):
    model = effective_model(cfg)
    d = cfg.data
    if d.name == "file":
        pk = file_data(cfg.grid, d.psi_path, d.rho_path)
    elif d.name == "branch_matched" and model is not Model.NO_SHEAR and 0 < cfg.regime.B2 < math.inf:
        pk = branch_matched_packet(cfg.grid, model, cfg.regime, d.k0, d.sigma, d.amp_psi)
    else:
        # branch matching has nothing to match at B2 = 0 or without shear
        pk = gaussian_packet(cfg.grid, d.k0, d.sigma, d.amp_psi, d.amp_rho)
    return ingest_initial_data(cfg.grid, pk.psi0, pk.rho0, model, cfg.regime)


@_stage("evolve")
def record_series(cfg: ExperimentConfig, fld, threads=1):
    def one(t):
        snap = evolve_field(fld, cfg.regime, t)
        return [snapshot_norm(snap, n.component, n.kind, cfg.projection, cfg.frame) for n in cfg.norms]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, cfg.times))
    else:
        rows = [one(t) for t in cfg.times]
    return {n.name: [r[i] for r in rows] for i, n in enumerate(cfg.norms)}


def _write_series(out, name, times, values):
    with open(out / f"series_{name}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value"])
        for t, v in zip(times, values):
            w.writerow([repr(float(t)), repr(float(v))])


def run_experiment(cfg: ExperimentConfig, threads=1, write=True):
    model = effective_model(cfg)
    report = Report(config=cfg.echo(), model_effective=model.value)
    out = Path(cfg.out_dir)
    if write:
        out.mkdir(parents=True, exist_ok=True)
    if cfg.norms or cfg.snapshot or model is Model.NO_SHEAR:
        fld = build_data(cfg)
    if cfg.norms:
        series = record_series(cfg, fld, threads)
        use_log = cfg.use_log()
        for name, vals in series.items():
            report.series[name] = vals
            if write:
                _write_series(out, name, cfg.times, vals)
            try:
                f = fit_decay(cfg.times, vals, cfg.window, use_log)
            except StratoError as exc:
                report.fit_errors.append({"norm": name, "error": f"{type(exc).__name__}: {exc}"})
                continue
            report.fits.append({"norm": name, **f.to_dict()})
    if model is Model.NO_SHEAR:
        weighted = fld.weight_applied
        dp = DispersionParams(cfg.regime.N, cfg.regime.beta if weighted else 0.0,
                              "full_euler" if weighted else "boussinesq")
        drift = _stage("conservation")(conservation_drift)(fld, dp, cfg.times)
        report.conservation.append({"name": "energy", "max_rel_drift": drift})
    if cfg.snapshot and write:
        snap = _stage("snapshot")(evolve_field)(fld, cfg.regime, cfg.times[-1])
        phys = snap.physical()
        write_binary(out / "snapshot_final.bin", cfg.grid, model, [phys[c] for c in COMPONENTS])
    if write:
        (out / "report.json").write_text(report.to_json() + "\n")
    return report


def run_sweep(cfg: ExperimentConfig, threads=1, write=True):
    """One experiment per B2 in ``cfg.sweep_B2``, each in its own subdirectory."""
    if not cfg.sweep_B2:
        raise ConfigError("the [sweep] section needs a B2 list")
    reports = {}
    for B2 in cfg.sweep_B2:
        sub = cfg.with_B2(B2)
        sub = replace(sub, out_dir=str(Path(cfg.out_dir) / f"B2_{B2:g}"))
        reports[B2] = run_experiment(sub, threads, write)
    if write:
        summary = {f"{B2:g}": r.fits for B2, r in reports.items()}
        Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
        (Path(cfg.out_dir) / "sweep.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return reports


# --------------------------------------------------------------------------
# no-shear study


@dataclass(frozen=True)
class DispersiveConfig:
    N: float = 1.0
    ks: tuple = (1, 2, 4)
    envelope_times: tuple = (10.0, 1e2, 1e3, 1e4)
    n: float = 8.0
    ray_times: tuple = tuple(float(t) for t in np.geomspace(1e2, 1e4, 12))
    sharp_k: float = 1.0
    sharp_delta: float = 0.2
    sharp_times: tuple = (1e2, 1e3, 1e4)
    norm_grid: GridSpec = GridSpec(8, 2**15, 6000.0)
    norm_sigma: float = 1.0
    norm_times: tuple = tuple(float(t) for t in np.geomspace(1e2, 1e4, 16))
    out_dir: str = "out"

    @classmethod
    def from_parser(cls, cp, out_dir=None):
        if not cp.has_section("dispersive"):
            return cls(out_dir=out_dir or "out")
        s = cp["dispersive"]
        kw = {}
        if "N" in s:
            kw["N"] = float(s["N"])
        if "ks" in s:
            kw["ks"] = tuple(int(v) for v in _floats(s["ks"]))
        if "n" in s:
            kw["n"] = float(s["n"])
        if "delta" in s:
            kw["sharp_delta"] = float(s["delta"])
        for key in ("envelope_times", "ray_times", "sharp_times", "norm_times"):
            if key in s:
                kw[key] = tuple(_floats(s[key]))
        if "Ny" in s or "Ly" in s:
            kw["norm_grid"] = GridSpec(8, int(s.get("Ny", 2**15)), float(s.get("Ly", 6000.0)))
        kw["out_dir"] = out_dir or cp.get("output", "dir", fallback="out")
        return cls(**kw)


def run_dispersive(dc: DispersiveConfig, write=True):
    from .dispersive import lemma_envelope_sweep, oscillatory_integral, sharpness_profile

    out = Path(dc.out_dir)
    summary = {"fits": [], "conservation": []}
    rows = []
    for k in dc.ks:
        c = 2.0 * dc.N / (3.0 * math.sqrt(3.0) * k)
        vals = [abs(oscillatory_integral(k, dc.N, t, -c * t, dc.n)) for t in dc.ray_times]
        rows.extend((t, k, v) for t, v in zip(dc.ray_times, vals))
        f = fit_decay(dc.ray_times, vals, (dc.ray_times[0], dc.ray_times[-1]))
        summary["fits"].append({"norm": f"ray_integral_k{k}", **f.to_dict()})
    env = lemma_envelope_sweep(dc.envelope_times, dc.ks, dc.N, dc.n)
    summary["envelope"] = {
        "n": dc.n,
        "ratios": [{"t": t, "k": k, "ratio": r} for (t, k), r in sorted(env.ratios.items())],
        "constant_by_time": {repr(t): c for t, c in env.constant_by_time().items()},
        "spread": env.spread(),
    }
    sharp = sharpness_profile(dc.sharp_k, dc.N, dc.sharp_delta, dc.sharp_times)
    summary["sharpness"] = {
        "limit": sharp.limit,
        "times": list(sharp.times),
        "values": [float(v) for v in sharp.values],
        "u_route": [float(v) for v in sharp.u_route],
        "ratio_to_limit": [float(v / sharp.limit) for v in sharp.values],
    }
    # L2_x Linf_y decay of a Gaussian packet
    g = dc.norm_grid
    regime = RegimeParams(R=0.0, beta=dc.N**2, g=1.0)
    pk = gaussian_packet(g, 1, dc.norm_sigma, 1.0, 0.5)
    fld = ingest_initial_data(g, pk.psi0, pk.rho0, Model.NO_SHEAR, regime)
    norms = [snapshot_norm(evolve_field(fld, regime, t), "vx", "L2x_LInfY", "P_neq0") for t in dc.norm_times]
    f = fit_decay(dc.norm_times, norms, (dc.norm_times[0], dc.norm_times[-1]))
    summary["fits"].append({"norm": "vx_L2x_LInfY", **f.to_dict()})
    summary["conservation"].append({"name": "energy", "max_rel_drift": conservation_drift(
        fld, DispersionParams(dc.N), np.linspace(0.0, 1e3, 11))})
    if write:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "series_ray_integral.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "k", "value"])
            for t, k, v in rows:
                w.writerow([repr(float(t)), k, repr(float(v))])
        _write_series(out, "vx_L2x_LInfY", dc.norm_times, norms)
        (out / "report.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary
