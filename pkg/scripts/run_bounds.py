"""Scan every pointwise estimate family and report the constant under refinement."""

import argparse

from thermoplate.roots import ModelParams
from thermoplate.verifier import BOUND_FAMILIES, EXTRA_FAMILIES, check_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=64)
    args = ap.parse_args()
    for family in BOUND_FAMILIES + EXTRA_FAMILIES:
        c = check_bound(family, ModelParams(args.sigma, 1), args.points)
        extra = f"  rate={c.rate:.5g} gap={c.spectral_gap:.5g}" if c.rate is not None else ""
        flag = "stable" if c.stable else "GROWS"
        print(f"{family:>13}  C={c.fitted_C:.4g}  refined={c.refined_C:.4g}  growth={c.growth:+.3f}  {flag}  worst(t,r)={c.worst_point}{extra}")


if __name__ == "__main__":
    main()
