"""Fit the growth/decay rate of ||u(t)|| in each dimension and check the lower bound."""

import argparse

import numpy as np

from thermoplate.multipliers import GaussianDatum
from thermoplate.quadrature import decay_exponent_D
from thermoplate.roots import ModelParams
from thermoplate.verifier import ExperimentConfig, check_theorem1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--dims", default="1,2,3,4,5,6")
    ap.add_argument("--width", type=float, default=1.0)
    args = ap.parse_args()
    times = tuple(np.geomspace(1e2, 1e4, 9))
    for n in (int(v) for v in args.dims.split(",")):
        cfg = ExperimentConfig(ModelParams(args.sigma, n), u1=GaussianDatum(1.0, args.width), times=times)
        res = check_theorem1(cfg)
        target = decay_exponent_D(n)
        label = "sqrt(ln t)" if target is None else f"{target:+.3f}"
        print(
            f"n={n}  {res.upper.model:>9}  fit={res.upper.exponent:+.4f}  target={label}  "
            f"r2={res.upper.r_squared:.5f}  lower_min={res.lower_ratio_min:.3g}  lower_slope={res.lower_slope:+.3f}"
        )


if __name__ == "__main__":
    main()
