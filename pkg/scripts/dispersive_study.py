#!/usr/bin/env python3
"""No-shear study: envelope constants, caustic-ray rates, sharpness and the L2_x Linf_y decay.

    python3 scripts/dispersive_study.py --config scripts/configs/dispersive.ini --out runs/dispersive
"""
import argparse
import configparser

from strato.harness import DispersiveConfig, run_dispersive


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--config", default="scripts/configs/dispersive.ini")
    ap.add_argument("--out", default="runs/dispersive")
    args = ap.parse_args()

    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    cp.read(args.config)
    s = run_dispersive(DispersiveConfig.from_parser(cp, out_dir=args.out))

    print("envelope constant sup|I| / envelope, max over k, per time")
    for t, c in s["envelope"]["constant_by_time"].items():
        print(f"  t = {float(t):>8g}   C = {c:.3f}")
    print(f"  relative spread about the mean: {s['envelope']['spread']:.3f}")
    print("\nfitted decay exponents")
    for f in s["fits"]:
        print(f"  {f['norm']:<16} alpha = {f['alpha']:+.4f}  r2 = {f['r2']:.6f}")
    print(f"\nsharpness: limit sqrt(3) Gamma(1/3) = {s['sharpness']['limit']:.6f}")
    for t, v, u in zip(s["sharpness"]["times"], s["sharpness"]["values"], s["sharpness"]["u_route"]):
        print(f"  t = {t:>8g}   eta route {v:.6f}   u route {u:.6f}   ratio {v / s['sharpness']['limit']:.4f}")
    for c in s["conservation"]:
        print(f"\nenergy drift to t = 1e3: {c['max_rel_drift']:.2e}")


if __name__ == "__main__":
    main()
