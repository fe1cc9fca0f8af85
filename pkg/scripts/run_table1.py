"""Reproduce the model comparison table (exponents of the squared norm)."""

import argparse

from thermoplate.cli import write_output
from thermoplate.verifier import table1_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", default="1,2,3,4,5")
    ap.add_argument("--out", default="table1.csv")
    args = ap.parse_args()
    dims = [int(v) for v in args.dims.split(",")]
    rows = table1_experiment(dims, (0.0, 1.0))
    write_output(rows, "csv", args.out)
    for row in rows:
        print(f"{row['model']:>10}  n={row['n']}  {row['fit_model']:>7}  exponent={row['exponent']:+.4f}  log_slope={row['log_slope']:.4g}")


if __name__ == "__main__":
    main()
