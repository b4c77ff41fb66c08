"""Decay fitting, data recipes and config-driven experiments."""
from __future__ import annotations

import configparser
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strato.boussinesq import RegimeParams
from strato.errors import ConfigError, ExperimentError, InsufficientData, NonPositiveValues
from strato.field import GridSpec, Model
from strato.fitting import fit_decay, japanese
from strato.harness import (NormSpec, config_from_parser, effective_model, load_config, resolve_regime, run_experiment,
                            run_sweep)
from strato.recipes import branch_matched_packet, matched_ratio, matched_ratio_closed_form


def _parser(**sections):
    base = {
        "experiment": {"model": "boussinesq"},
        "regime": {"B2": "0.1875"},
        "grid": {"Nx": "32", "Ny": "512", "Ly": "40.0"},
        "data": {"recipe": "branch_matched", "sigma": "4.0"},
        "schedule": {"t_min": "20", "t_max": "200", "count": "16"},
        "norms": {"record": "vx:L2"},
        "fit": {"window": "20, 200"},
    }
    for name, body in sections.items():
        if body is None:
            base.pop(name, None)
        else:
            base[name] = body
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp.read_dict(base)
    return cp


# --------------------------------------------------------------------------
# fitting


def test_fit_recovers_exact_power():
    t = np.geomspace(20, 200, 16)
    f = fit_decay(t, japanese(t) ** -1.5)
    assert abs(f.alpha + 1.5) < 1e-6 and f.r2 > 0.999999
    assert f.window == (20.0, 200.0) and f.gamma is None


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(-3.0, 0.5), gamma=st.floats(-2.0, 2.0), c=st.floats(0.01, 100.0))
def test_fit_recovers_power_and_log(alpha, gamma, c):
    t = np.geomspace(10, 1e4, 24)
    v = c * japanese(t) ** alpha * japanese(np.log(japanese(t))) ** gamma
    f = fit_decay(t, v, (10, 1e4), with_log_correction=True)
    assert abs(f.alpha - alpha) < 1e-8 and abs(f.gamma - gamma) < 1e-7


def test_fit_errors():
    t = np.geomspace(1, 100, 7)
    with pytest.raises(InsufficientData):
        fit_decay(t, t**-1.0, (1, 100))
    t = np.geomspace(1, 100, 10)
    v = t**-1.0
    v[3] = 0.0
    with pytest.raises(NonPositiveValues):
        fit_decay(t, v, (1, 100))


def test_fit_default_window_is_last_decade():
    t = np.geomspace(1, 1000, 31)
    v = np.where(t < 100, t**-3.0, japanese(t) ** -0.5)
    assert abs(fit_decay(t, v).alpha + 0.5) < 1e-9


# --------------------------------------------------------------------------
# recipes


@pytest.mark.parametrize("B2", [3 / 16, 0.25, 0.5])
def test_matched_ratio_two_routes(B2):
    p = RegimeParams.from_richardson(B2)
    numeric = matched_ratio("boussinesq", p, 1)
    closed = matched_ratio_closed_form(p, 1)
    assert abs(numeric - closed) < 1e-3 * abs(closed)


def test_branch_matched_packet_is_gaussian():
    grid = GridSpec(16, 256, 30.0)
    p = RegimeParams.from_richardson(0.5)
    pk = branch_matched_packet(grid, "boussinesq", p, 1, 4.0, ratio=2.0 - 1.0j)
    X, Y = grid.mesh()
    G = np.exp(-(Y**2) / 32)
    assert np.allclose(pk.psi0, np.cos(X) * G)
    r = 2.0 - 1.0j
    assert np.allclose(pk.rho0, abs(r) * np.cos(X + np.angle(r)) * G * p.beta / p.R)


# --------------------------------------------------------------------------
# configs


def test_norm_spec_parsing():
    assert NormSpec.parse("vx:L2x_LInfY") == NormSpec("vx", "L2x_LInfY")
    assert NormSpec.parse(" density ").kind == "L2"
    with pytest.raises(ConfigError):
        NormSpec.parse("pressure:L2")
    with pytest.raises(ConfigError):
        NormSpec.parse("vx:H7")


def test_regime_consistency_checked():
    with pytest.raises(ConfigError):
        resolve_regime(Model.BOUSSINESQ, {"B2": "0.5", "beta": "1.0", "g": "1.0"})
    p = resolve_regime(Model.BOUSSINESQ, {"B2": "0.5", "beta": "0.5", "g": "1.0"})
    assert p.B2 == pytest.approx(0.5)
    with pytest.raises(ConfigError):
        resolve_regime(Model.BOUSSINESQ, {})
    with pytest.raises(ConfigError):
        resolve_regime(Model.NO_SHEAR, {"beta": "1.0"})
    with pytest.raises(ConfigError):
        resolve_regime(Model.FULL_EULER, {"B2": "0.5"})


@pytest.mark.parametrize("sections", [
    {"schedule": {"times": "1, 3, 2, 4, 5, 6, 7, 8"}},
    {"fit": {"window": "10, 500"}},
    {"fit": {"window": "10"}},
    {"data": {"recipe": "unicorn"}},
    {"experiment": {"model": "navier_stokes"}},
    {"norms": {"record": "vx:L2", "frame": "rotating"}},
    {"fit": {"log_correction": "maybe"}},
])
def test_bad_configs_rejected(sections):
    with pytest.raises(ConfigError):
        config_from_parser(_parser(**sections))


def test_config_file_with_inline_comments(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[experiment]\nmodel = boussinesq  # sheared\n[regime]\nB2 = 0.5\n[norms]\nrecord = vx:L2\n")
    cfg = load_config(path)
    assert cfg.regime.B2 == pytest.approx(0.5) and cfg.norms == (NormSpec("vx", "L2"),)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")


def test_full_euler_without_stratification_is_homogeneous():
    cfg = config_from_parser(_parser(experiment={"model": "full_euler"}, regime={"B2": "0"}))
    assert effective_model(cfg) is Model.BOUSSINESQ


# --------------------------------------------------------------------------
# experiments


def test_empty_norm_list_gives_metadata_only(tmp_path):
    cfg = config_from_parser(_parser(norms={"record": ""}, output={"dir": str(tmp_path)}))
    rep = run_experiment(cfg)
    body = json.loads((tmp_path / "report.json").read_text())
    assert body["fits"] == [] and body["series"] == [] and body["config"]["model"] == "boussinesq"
    assert not list(tmp_path.glob("series_*.csv"))
    assert rep.series == {}


def test_subcritical_run(tmp_path):
    cfg = config_from_parser(_parser(output={"dir": str(tmp_path)}))
    rep = run_experiment(cfg)
    assert abs(rep.fit("vx_L2")["alpha"] + 0.25) < 0.05
    rows = (tmp_path / "series_vx_L2.csv").read_text().splitlines()
    assert rows[0] == "t,value" and len(rows) == 17
    body = json.loads((tmp_path / "report.json").read_text())
    assert set(body["fits"][0]) >= {"norm", "alpha", "gamma", "stderr", "r2", "window"}


def test_critical_run_uses_log_regressor():
    cfg = config_from_parser(_parser(regime={"B2": "0.25"}))
    rep = run_experiment(cfg, write=False)
    f = rep.fit("vx_L2")
    assert abs(f["alpha"] + 0.5) < 0.05 and abs(f["gamma"] - 1.0) < 0.3


def test_sweep_over_regimes(tmp_path):
    cfg = config_from_parser(_parser(sweep={"B2": "0, 0.1875, 0.25, 0.5"}, output={"dir": str(tmp_path)},
                                     data={"recipe": "branch_matched", "sigma": "4.0", "amp_rho": "0.0"}))
    reports = run_sweep(cfg)
    alphas = {B2: r.fit("vx_L2")["alpha"] for B2, r in reports.items()}
    assert abs(alphas[0.0] + 1.0) < 0.05  # rho0 = 0 at B2 = 0
    assert abs(alphas[0.1875] + 0.25) < 0.05
    assert abs(alphas[0.25] + 0.5) < 0.05
    assert abs(alphas[0.5] + 0.5) < 0.05
    assert (tmp_path / "sweep.json").exists() and (tmp_path / "B2_0.25" / "report.json").exists()


def test_no_shear_run_reports_conservation_and_dispersive_rate():
    cp = _parser(experiment={"model": "no_shear"}, regime={"beta": "1.0", "g": "1.0"},
                 grid={"Nx": "8", "Ny": "32768", "Ly": "6000.0"},
                 data={"recipe": "gaussian", "sigma": "1.0"},
                 schedule={"t_min": "100", "t_max": "10000", "count": "12"},
                 norms={"record": "vx:L2x_LInfY"}, fit={"window": "100, 10000"})
    rep = run_experiment(config_from_parser(cp), write=False)
    assert rep.conservation[0]["max_rel_drift"] < 1e-10
    assert abs(rep.fit("vx_L2x_LInfY")["alpha"] + 1 / 3) < 0.05


def test_numerical_errors_are_tagged_with_stage(tmp_path):
    cfg = config_from_parser(_parser(grid={"Nx": "8", "Ny": "64", "Ly": "5.0"}, output={"dir": str(tmp_path)}))
    with pytest.raises(ExperimentError) as info:
        run_experiment(cfg)
    assert info.value.stage == "data"


def test_reports_are_deterministic(tmp_path):
    texts = []
    for run in ("a", "b"):
        cfg = config_from_parser(_parser(output={"dir": str(tmp_path / run)}), seed=7)
        run_experiment(cfg, threads=2 if run == "b" else 1)
        texts.append((tmp_path / run / "report.json").read_bytes())
    assert texts[0] == texts[1]
