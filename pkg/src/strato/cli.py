"""Command-line entry point: ``strato mode|field|sweep|dispersive|validate|fit``."""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, StratoError


def _common(p):
    p.add_argument("--config", help="INI experiment config")
    p.add_argument("--out", help="output directory (overrides [output] dir)")
    p.add_argument("--seed", type=int, default=None, help="seed for randomised suites (default 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for time slices")


def _parser():
    ap = argparse.ArgumentParser(prog="strato", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mode", help="evolve one Fourier mode and compare with the ODE oracle")
    _common(p)
    p.add_argument("--model", choices=("boussinesq", "euler"), default="boussinesq")
    p.add_argument("--B2", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.5, help="full Euler only")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--psi0", type=complex, default=1.0)
    p.add_argument("--T0", type=complex, default=0.0)
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--count", type=int, default=101)

    for name, text in (("field", "run one field experiment"), ("sweep", "run the experiment for each B2 in [sweep]")):
        p = sub.add_parser(name, help=text)
        _common(p)

    p = sub.add_parser("dispersive", help="no-shear study: ray integrals, envelope, sharpness, Linf decay")
    _common(p)

    p = sub.add_parser("validate", help="run invariant suites")
    _common(p)
    p.add_argument("suite", nargs="?", default="all",
                   choices=("hyp", "ode", "boussinesq", "euler", "dispersive", "all"))
    p.add_argument("--perturb-prefactor", type=float, default=0.0, help=argparse.SUPPRESS)

    p = sub.add_parser("fit", help="fit a power law to a t,value CSV series")
    p.add_argument("input", help="CSV with columns t,value")
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--log", action="store_true", help="add the log<log<t>> regressor")
    return ap


def _cmd_mode(args):
    from .ode import ModeCase, closed_form_trajectory, oracle_trajectory

    model = "euler" if args.model == "euler" else "boussinesq"
    case = ModeCase(model, args.k, args.eta, args.B2, args.psi0, args.T0, args.beta if model == "euler" else 0.0)
    t = np.linspace(0.0, args.t_max, args.count)
    amp, den = closed_form_trajectory(case, t)
    o_amp, o_den = oracle_trajectory(case, t)
    err = float(np.max(np.abs(amp - o_amp) / np.maximum(np.abs(amp), 1e-14)))
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "series_mode.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "amplitude", "density", "oracle_amplitude", "oracle_density"])
        for row in zip(t, np.abs(amp), np.abs(den), np.abs(o_amp), np.abs(o_den)):
            w.writerow([repr(float(v)) for v in row])
    report = {"mode": {"model": model, "k": args.k, "eta": args.eta, "B2": args.B2, "beta": case.beta,
                       "psi0": [args.psi0.real, args.psi0.imag], "T0": [args.T0.real, args.T0.imag]},
              "oracle_max_rel_error": err}
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"max relative gap to the ODE oracle: {err:.3e}")
    return 0


def _load(args):
    from .harness import load_config

    if not args.config:
        raise ConfigError("--config is required")
    return load_config(args.config, seed=args.seed, out_dir=args.out)


def _print_fits(fits):
    for f in fits:
        gam = "" if f.get("gamma") is None else f"  gamma = {f['gamma']:+.4f}"
        print(f"  {f['norm']:<24} alpha = {f['alpha']:+.4f}{gam}  r2 = {f['r2']:.6f}")


def _cmd_field(args):
    from .harness import run_experiment

    cfg = _load(args)
    rep = run_experiment(cfg, threads=args.threads)
    print(f"wrote {cfg.out_dir}/report.json")
    _print_fits(rep.fits)
    for c in rep.conservation:
        print(f"  conservation {c['name']}: max relative drift {c['max_rel_drift']:.3e}")
    return 0


def _cmd_sweep(args):
    from .harness import run_sweep

    cfg = _load(args)
    for B2, rep in run_sweep(cfg, threads=args.threads).items():
        print(f"B2 = {B2:g}")
        _print_fits(rep.fits)
    return 0


def _cmd_dispersive(args):
    from .harness import DispersiveConfig, run_dispersive

    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys such as B2, R and Ny are case-sensitive
    if args.config and not cp.read(args.config):
        raise ConfigError(f"cannot read config {args.config}")
    dc = DispersiveConfig.from_parser(cp, out_dir=args.out)
    s = run_dispersive(dc)
    _print_fits(s["fits"])
    print(f"  envelope constant spread: {s['envelope']['spread']:.3f}")
    print(f"  sharpness ratio to limit: {', '.join(f'{r:.4f}' for r in s['sharpness']['ratio_to_limit'])}")
    return 0


def _cmd_validate(args):
    from . import hypergeometric
    from .validation import validate

    if args.perturb_prefactor:
        hypergeometric.set_prefactor_perturbation(args.perturb_prefactor)
    try:
        checks = validate(args.suite, seed=args.seed or 0)
    finally:
        hypergeometric.set_prefactor_perturbation(0.0)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.suite:<11} {c.name:<{width}}  {c.value:.3e} (limit {c.threshold:.1e})")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        suites = sorted({c.suite for c in checks})
        body = {"validation": [{"suite": s, "pass": all(c.passed for c in checks if c.suite == s)} for s in suites],
                "checks": [c.to_dict() for c in checks]}
        (out / "report.json").write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
    return 1 if failed else 0


def _cmd_fit(args):
    from .fitting import fit_decay

    try:
        with open(args.input, newline="") as fh:
            rows = list(csv.DictReader(fh))
        t = [float(r["t"]) for r in rows]
        v = [float(r["value"]) for r in rows]
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot read a t,value series from {args.input}: {exc}") from exc
    f = fit_decay(t, v, tuple(args.window) if args.window else None, args.log)
    print(json.dumps(f.to_dict(), indent=2, sort_keys=True))
    return 0


_COMMANDS = {
    "mode": _cmd_mode,
    "field": _cmd_field,
    "sweep": _cmd_sweep,
    "dispersive": _cmd_dispersive,
    "validate": _cmd_validate,
    "fit": _cmd_fit,
}


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except StratoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
