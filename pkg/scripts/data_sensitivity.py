#!/usr/bin/env python3
"""How the fitted exponents depend on the initial data (observational, nothing asserted).

Compares three Gaussian packets on the reference grid:

* ``plain``     psi0 = cos x G(y), rho0 = 0.5 sin x G(y) with sigma = 4,
* ``matched``   the density amplitude and x-phase chosen to cancel the slower
                correction of the (1, 0) mode (the acceptance data),
* ``rough``     the matched packet multiplied by a y-profile with a kink
                (|y| + 1)^(-q) G, probing the regularity the decay bounds assume.

    python3 scripts/data_sensitivity.py --model boussinesq
"""
import argparse

import numpy as np

from strato.boussinesq import RegimeParams
from strato.field import GridSpec, Model, evolve_field, ingest_initial_data, snapshot_norm
from strato.fitting import fit_decay
from strato.recipes import branch_matched_packet, gaussian_packet


def fits(grid, model, params, psi0, rho0, times, use_log):
    fld = ingest_initial_data(grid, psi0, rho0, model, params)
    series = {c: [] for c in ("vx", "vy", "density")}
    for t in times:
        snap = evolve_field(fld, params, t)
        for c in series:
            series[c].append(snapshot_norm(snap, c, "L2", "P_neq0"))
    return {c: fit_decay(times, v, (times[0], times[-1]), use_log) for c, v in series.items()}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--model", choices=("boussinesq", "full_euler"), default="boussinesq")
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--q", type=float, default=0.5, help="kink exponent of the rough profile")
    args = ap.parse_args()

    model = Model(args.model)
    grid = GridSpec(32, 512, 40.0)
    times = np.geomspace(20.0, 200.0, 16)
    X, Y = grid.mesh()
    kink = (np.abs(Y) + 1.0) ** -args.q
    print(f"{'B2':>7} {'data':<8} {'vx':>8} {'vy':>8} {'density':>8}")
    for B2 in (3 / 16, 0.25, 0.5):
        beta = args.beta if model is Model.FULL_EULER else None
        params = RegimeParams.from_richardson(B2, beta=beta)
        plain = gaussian_packet(grid, 1, 4.0, 1.0, 0.5)
        matched = branch_matched_packet(grid, model, params, 1, 4.0)
        cases = {"plain": (plain.psi0, plain.rho0), "matched": (matched.psi0, matched.rho0),
                 "rough": (matched.psi0 * kink, matched.rho0 * kink)}
        for name, (psi0, rho0) in cases.items():
            f = fits(grid, model, params, psi0, rho0, times, abs(B2 - 0.25) < 1e-12)
            print(f"{B2:7.4f} {name:<8} {f['vx'].alpha:+8.3f} {f['vy'].alpha:+8.3f} {f['density'].alpha:+8.3f}")


if __name__ == "__main__":
    main()
