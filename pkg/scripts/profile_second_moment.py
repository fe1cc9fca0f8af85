"""Where the profile residual comes from at n >= 3.

For Gaussian u1 the transform is P (1 - w^2 r^2 / 2 + ...).  The profile
keeps the mass P and the first moment; the second-order term leaves a
residual of size ||r^2 J0|| ~ t^{-n/8}, so ||u - phi|| / B_n(t) can only
fall like t^{-1/4} (a factor sqrt(10) over two decades).  Adding that one
term back makes the ratio fall at the faster rate of the remaining terms.
"""

import argparse

from thermoplate.multipliers import GaussianDatum, J0_hat, phi_hat
from thermoplate.quadrature import decay_B, l2_norm_radial
from thermoplate.roots import ModelParams
from thermoplate.verifier import ExperimentConfig, solution_symbol


def ratios(cfg, corrected):
    exact = solution_symbol(cfg)
    m = cfg.moments
    w2 = cfg.u1.width**2
    sigma, n = cfg.params.sigma, cfg.params.n

    def residual(t, r):
        out = exact(t, r) - phi_hat(t, r, sigma, m)
        if corrected:
            out = out + 0.5 * w2 * r * r * J0_hat(t, r, sigma) * m.P_u1
        return out

    return [l2_norm_radial(residual, n, t, cfg.quad, cfg.r_max(t)).value / decay_B(n, t) for t in cfg.times]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--width", type=float, default=1.0)
    args = ap.parse_args()
    g = GaussianDatum(1.0, args.width)
    for n in (1, 3, 5):
        cfg = ExperimentConfig(ModelParams(1.0, n), u0=g, u1=g, theta0=g, times=(1e2, 1e3, 1e4))
        for corrected in (False, True):
            r = ratios(cfg, corrected)
            tag = "phi + second moment" if corrected else "phi"
            print(f"n={n}  {tag:>20}  " + "  ".join(f"{v:.4e}" for v in r) + f"  decrease {r[0] / r[-1]:.2f}x")


if __name__ == "__main__":
    main()
