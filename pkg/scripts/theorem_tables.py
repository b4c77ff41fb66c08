#!/usr/bin/env python3
"""Reproduce the decay-exponent tables for the sheared Boussinesq and full Euler models.

Runs every regime on the reference grid (Nx = 32, Ny = 512, t in [20, 200]) and
prints fitted exponents next to the theorem targets.

    python3 scripts/theorem_tables.py --out runs/tables
"""
import argparse
import configparser
import json
import re
from pathlib import Path

from strato.harness import config_from_parser, run_experiment

# (label, B2, recipe, amp_rho, {norm: target alpha}); the critical row also fits a log exponent
ROWS = [
    ("B2 = 3/16", 3 / 16, "branch_matched", 0.5, {"vx_L2": -0.25, "vy_L2": -1.25, "density_L2": -0.25}),
    ("B2 = 1/4", 0.25, "branch_matched", 0.5, {"vx_L2": -0.5, "vy_L2": -1.5, "density_L2": None}),
    ("B2 = 1/2", 0.5, "branch_matched", 0.5, {"vx_L2": -0.5, "vy_L2": -1.5, "density_L2": -0.5}),
    ("B2 = 0, rho0 = 0", 0.0, "gaussian", 0.0, {"vx_L2": -1.0, "vy_L2": -2.0}),
    ("B2 = 0, rho0 != 0", 0.0, "gaussian", 0.5, {"vx_L2": 0.0, "vy_L2": -1.0}),
]


def make_config(model, B2, recipe, amp_rho, beta, out, Ny):
    cp = configparser.ConfigParser()
    cp.optionxform = str
    regime = {"B2": repr(B2)}
    if beta and B2 > 0:
        regime["beta"] = repr(beta)
    cp.read_dict({
        "experiment": {"model": model},
        "regime": regime,
        "grid": {"Nx": "32", "Ny": str(Ny), "Ly": "40.0"},
        "data": {"recipe": recipe, "sigma": "4.0", "amp_rho": repr(amp_rho)},
        "schedule": {"t_min": "20", "t_max": "200", "count": "16"},
        "norms": {"record": "vx:L2, vy:L2, density:L2", "projection": "P_neq0"},
        "fit": {"window": "20, 200", "log_correction": "auto"},
        "output": {"dir": str(out)},
    })
    return config_from_parser(cp)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="runs/tables")
    ap.add_argument("--beta", type=float, default=0.5, help="stratification scale for the full Euler table")
    ap.add_argument("--Ny", type=int, default=512)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    summary = {}
    for model, beta in (("boussinesq", 0.0), ("full_euler", args.beta)):
        print(f"\n{model} (beta = {beta:g})" if beta else f"\n{model}")
        print(f"{'regime':<20} {'norm':<12} {'target':>7} {'alpha':>8} {'gamma':>7} {'r2':>9}")
        for label, B2, recipe, amp_rho, targets in ROWS:
            out = Path(args.out) / model / re.sub(r"\W+", "_", label.replace("!=", "ne")).strip("_")
            rep = run_experiment(make_config(model, B2, recipe, amp_rho, beta, out, args.Ny), threads=args.threads)
            for name, target in targets.items():
                f = rep.fit(name)
                tgt = "" if target is None else f"{target:+.2f}"
                gam = "" if f["gamma"] is None else f"{f['gamma']:+.3f}"
                print(f"{label:<20} {name:<12} {tgt:>7} {f['alpha']:+8.3f} {gam:>7} {f['r2']:9.6f}")
                summary.setdefault(model, []).append({"regime": label, "target": target, **f})
    Path(args.out).mkdir(parents=True, exist_ok=True)
    (Path(args.out) / "tables.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
