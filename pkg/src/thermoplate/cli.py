"""Command-line front end.

Each subcommand builds its configuration from flags (optionally seeded by a
flat ``key = value`` file), runs one experiment and writes CSV or JSON
records.  Exit codes: 0 success, 1 invalid configuration, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .errors import BadFit, BranchJump, DegenerateRoots, StepFailure, ThermoplateError, ToleranceNotMet, UnboundedRatio
from .multipliers import DataSymbol, GaussianDatum, ode_oracle_system, ode_oracle_third, roots_on, u_hat
from .quadrature import QuadratureSpec, decay_exponent_D, l2_norm_radial, power_kernel_norm
from .roots import ModelParams, track_branches
from .verifier import (
    BOUND_FAMILIES,
    ExperimentConfig,
    check_bound,
    check_theorem1,
    check_theorem2,
    fit_power_law,
    fit_sqrt_log,
    profile_decrease,
    table1_experiment,
)

NUMERICAL_ERRORS = (BadFit, BranchJump, DegenerateRoots, StepFailure, ToleranceNotMet, UnboundedRatio, FloatingPointError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# --- flag parsing helpers ----------------------------------------------------


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _datum(text):
    """``amplitude[,width[,shift]]``."""
    v = _floats(text)
    if not 1 <= len(v) <= 3:
        raise argparse.ArgumentTypeError(f"expected amplitude[,width[,shift]], got {text!r}")
    shift = (v[2],) if len(v) == 3 and v[2] != 0 else ()
    try:
        return GaussianDatum(v[0], v[1] if len(v) > 1 else 1.0, shift)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-", help="output file ('-' for stdout)")
    p.add_argument("--config", help="flat key = value file; flags override it")


def _add_times(p, tmin=1e2, tmax=1e4, points=9):
    p.add_argument("--tmin", type=float, default=tmin)
    p.add_argument("--tmax", type=float, default=tmax)
    p.add_argument("--tpoints", type=int, default=points)


def _add_data(p, u0="0", u1="1,1", theta0="0"):
    p.add_argument("--u0", type=_datum, default=_datum(u0), help="amplitude[,width[,shift]]")
    p.add_argument("--u1", type=_datum, default=_datum(u1), help="amplitude[,width[,shift]]")
    p.add_argument("--theta0", type=_datum, default=_datum(theta0), help="amplitude[,width[,shift]]")


def _add_quad(p):
    p.add_argument("--rel-tol", type=float, default=1e-9)


def build_parser():
    parser = _Parser(prog="thermoplate", description="Fourier-space analysis of the thermoelastic plate with Newton cooling.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("roots", help="characteristic roots along a frequency grid")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--rmin", type=float, default=1e-3)
    p.add_argument("--rmax", type=float, default=1e3)
    p.add_argument("--points", type=int, default=200)
    _add_output(p)

    p = sub.add_parser("kernels", help="norm sweeps of r^k exp(-c r^4 t) and the critical sine kernel")
    p.add_argument("--dims", type=_ints, default=[1, 2, 3, 4, 5, 6])
    p.add_argument("--ks", type=_ints, default=[0, 1, 2])
    p.add_argument("--c", type=float, default=0.5)
    _add_times(p, 1e3, 1e4, 9)
    _add_quad(p)
    _add_output(p)

    p = sub.add_parser("simulate", help="u_hat trajectories against both ODE oracles")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--r", type=_floats, default=[1e-3, 1e-2, 0.1, 0.3, 1.0, 10.0, 100.0])
    p.add_argument("--t", type=_floats, default=[0.0, 1.0, 10.0, 100.0, 1000.0])
    p.add_argument("--tol", type=float, default=1e-13)
    _add_data(p, u0="1", u1="1", theta0="1")
    _add_output(p)

    p = sub.add_parser("rates", help="growth/decay rate fits of ||u(t)||")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--dims", type=_ints, default=[1, 2, 3, 4, 5, 6])
    _add_times(p)
    _add_data(p)
    _add_quad(p)
    _add_output(p)

    p = sub.add_parser("profile", help="||u - phi|| / B_n(t) over time")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--dims", type=_ints, default=[1, 3, 5])
    p.add_argument("--profile", choices=("full", "no-moment", "sim"), default="full")
    p.add_argument("--moment-sign", type=int, choices=(-1, 1), default=-1)
    p.add_argument("--literal-coefficients", action="store_true")
    _add_times(p)
    _add_data(p, u0="1", u1="1,1", theta0="1")
    _add_quad(p)
    _add_output(p)

    p = sub.add_parser("table1", help="fitted exponents of ||.||^2 for each model")
    p.add_argument("--dims", type=_ints, default=[1, 2, 3, 4, 5])
    p.add_argument("--sigmas", type=_floats, default=[0.0, 1.0])
    p.add_argument("--no-pure-plate", action="store_true")
    _add_times(p)
    p.add_argument("--u1", type=_datum, default=_datum("1,1"))
    _add_quad(p)
    _add_output(p)

    p = sub.add_parser("bounds", help="pointwise estimate-family scans")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--families", default=",".join(BOUND_FAMILIES))
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--literal-coefficients", action="store_true")
    _add_output(p)
    return parser


# --- config file -------------------------------------------------------------


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            if not key:
                raise ValueError(f"{path}:{lineno}: empty key")
            out[key.replace("_", "-")] = value
    return out


def _config_tokens(values):
    tokens = []
    for key, value in values.items():
        if key in ("config", "command"):
            continue
        low = value.lower()
        if low in ("true", "yes", "on"):
            tokens.append(f"--{key}")
        elif low in ("false", "no", "off"):
            continue
        else:
            tokens.append(f"--{key}={value}")
    return tokens


def _config_path(argv):
    for k, tok in enumerate(argv):
        if tok == "--config" and k + 1 < len(argv):
            return argv[k + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse_args(argv):
    """Parse ``argv``; values from ``--config`` are spliced in ahead of the flags."""
    parser = build_parser()
    path = _config_path(argv)
    if path and argv and not argv[0].startswith("-"):
        try:
            values = read_config(path)
        except OSError as exc:
            raise ValueError(f"config: cannot read {path}: {exc.strerror}") from None
        # later occurrences win in argparse, so command-line flags override the file
        argv = [argv[0], *_config_tokens(values), *argv[1:]]
    return parser.parse_args(argv)


# --- validation --------------------------------------------------------------


def _positive(name, v):
    if not (math.isfinite(v) and v > 0):
        raise ValueError(f"{name}: must be a positive finite number, got {v}")


def _times(args):
    _positive("tmin", args.tmin)
    _positive("tmax", args.tmax)
    if not 1 < args.tmin < args.tmax:
        raise ValueError(f"tmin/tmax: need 1 < tmin < tmax, got {args.tmin}, {args.tmax}")
    if args.tpoints < 2:
        raise ValueError(f"tpoints: need at least 2, got {args.tpoints}")
    return tuple(np.geomspace(args.tmin, args.tmax, args.tpoints))


def _quad(args):
    try:
        return QuadratureSpec(rel_tol=args.rel_tol)
    except ValueError as exc:
        raise ValueError(f"rel-tol: {exc}") from None


def _dims(values, name="dims"):
    if not values or any(not 1 <= n <= 8 for n in values):
        raise ValueError(f"{name}: dimensions must lie in 1..8, got {values}")
    return values


def _sigma(v):
    if not (math.isfinite(v) and v >= 0):
        raise ValueError(f"sigma: must be a finite nonnegative number, got {v}")
    return v


# --- subcommands -------------------------------------------------------------


def cmd_roots(args):
    _sigma(args.sigma)
    _positive("rmin", args.rmin)
    _positive("rmax", args.rmax)
    if args.rmin >= args.rmax or args.points < 2:
        raise ValueError("rmin/rmax/points: need rmin < rmax and points >= 2")
    grid = np.geomspace(args.rmin, args.rmax, args.points)
    return [{"r": b.r, "lambda1": b.lambda1, "lambdaR": b.lambdaR, "lambdaI": b.lambdaI} for b in track_branches(grid, args.sigma)]


def cmd_kernels(args):
    dims = _dims(args.dims)
    _positive("c", args.c)
    times = np.asarray(_times(args))
    quad = _quad(args)
    rows = []
    for k in args.ks:
        if k < 0:
            raise ValueError(f"ks: powers must be nonnegative, got {k}")
        for n in dims:
            num = [l2_norm_radial(lambda t, r: r**k * np.exp(-args.c * r**4 * t), n, t, quad).value for t in times]
            exact = [power_kernel_norm(k, n, args.c, t) for t in times]
            fit = fit_power_law(times, num, strict=False)
            dev = max(abs(a / b - 1) for a, b in zip(num, exact))
            rows.append({"kernel": "power", "k": k, "n": n, "exponent": fit.exponent, "expected": -k / 4 - n / 8, "r_squared": fit.r_squared, "drift": fit.drift, "closed_form_dev": dev})
    if 4 in dims:
        def sine(t, r):
            r2 = r * r
            return np.sinc(r2 * t / np.pi) * t * np.exp(-args.c * r2 * r2 * t)

        num = [l2_norm_radial(sine, 4, t, quad).value for t in times]
        fit = fit_sqrt_log(times, num, strict=False)
        rows.append({"kernel": "sine", "k": -2, "n": 4, "exponent": fit.exponent, "expected": float("nan"), "r_squared": fit.r_squared, "drift": fit.drift, "closed_form_dev": float("nan")})
    return rows


def cmd_simulate(args):
    sigma = _sigma(args.sigma)
    params = ModelParams(sigma, args.n)
    if any(not (math.isfinite(r) and r >= 0) for r in args.r):
        raise ValueError("r: frequencies must be finite and nonnegative")
    if any(not (math.isfinite(t) and t >= 0) for t in args.t):
        raise ValueError("t: times must be finite and nonnegative")
    rows = []
    for r in args.r:
        if r == 0 and sigma == 0:
            raise ValueError("r: r = 0 with sigma = 0 is a triple root")
        d = DataSymbol(*(complex(g.transform_radial(r, params.n)) for g in (args.u0, args.u1, args.theta0)))
        roots = roots_on(np.asarray(r), sigma)
        for t in args.t:
            exact = complex(u_hat(t, np.asarray(r), roots, d))
            sys_u = ode_oracle_system(t, r, sigma, d, args.tol)[0]
            third = ode_oracle_third(t, r, sigma, d, args.tol)
            scale = max(abs(sys_u), abs(third), 1e-280)
            rows.append(
                {
                    "t": t,
                    "r": r,
                    "u_re": exact.real,
                    "u_im": exact.imag,
                    "system_re": sys_u.real,
                    "system_im": sys_u.imag,
                    "third_re": third.real,
                    "third_im": third.imag,
                    "rel_dev": max(abs(exact - sys_u), abs(exact - third)) / scale,
                }
            )
    return rows


def cmd_rates(args):
    sigma = _sigma(args.sigma)
    rows = []
    for n in _dims(args.dims):
        cfg = ExperimentConfig(ModelParams(sigma, n), args.u0, args.u1, args.theta0, _times(args), _quad(args))
        res = check_theorem1(cfg)
        expected = decay_exponent_D(n)
        rows.append(
            {
                "n": n,
                "fit_model": res.upper.model,
                "exponent": res.upper.exponent,
                "expected": float("nan") if expected is None else expected,
                "r_squared": res.upper.r_squared,
                "drift": res.upper.drift,
                "alt_r_squared": res.alternative.r_squared,
                "lower_ratio_min": float("nan") if res.lower_ratio_min is None else res.lower_ratio_min,
                "lower_trend": float("nan") if res.lower_trend is None else res.lower_trend,
                "lower_slope": float("nan") if res.lower_slope is None else res.lower_slope,
            }
        )
    return rows


def cmd_profile(args):
    sigma = _sigma(args.sigma)
    if sigma <= 0:
        raise ValueError("sigma: the profile needs sigma > 0")
    rows = []
    for n in _dims(args.dims):
        cfg = ExperimentConfig(ModelParams(sigma, n), args.u0, args.u1, args.theta0, _times(args), _quad(args))
        seq = check_theorem2(cfg, args.profile, args.moment_sign, args.literal_coefficients)
        factor = profile_decrease(seq)
        rows += [{"n": n, "t": t, "ratio": v, "decrease": factor} for t, v in seq]
    return rows


def cmd_table1(args):
    sigmas = [_sigma(s) for s in args.sigmas]
    rows = table1_experiment(_dims(args.dims), sigmas, _times(args), args.u1, _quad(args), not args.no_pure_plate)
    keys = ("model", "n", "fit_model", "exponent", "r_squared")
    return [{k: row[k] for k in keys} for row in rows]


def cmd_bounds(args):
    sigma = _sigma(args.sigma)
    if sigma <= 0:
        raise ValueError("sigma: the bound families need sigma > 0")
    if args.points < 4:
        raise ValueError(f"points: need at least 4, got {args.points}")
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    known = set(BOUND_FAMILIES) | {"est-04-phase"}
    for f in families:
        if f not in known:
            raise ValueError(f"families: unknown family {f!r}")
    rows = []
    for f in families:
        c = check_bound(f, ModelParams(sigma, 1), args.points, literal_coefficients=args.literal_coefficients)
        rows.append(
            {
                "family": c.family,
                "fitted_C": c.fitted_C,
                "refined_C": c.refined_C,
                "growth": c.growth,
                "stable": c.stable,
                "worst_t": c.worst_point[0],
                "worst_r": c.worst_point[1],
                "rate": float("nan") if c.rate is None else c.rate,
                "spectral_gap": float("nan") if c.spectral_gap is None else c.spectral_gap,
                "grid": c.grid,
            }
        )
    return rows


COMMANDS = {
    "roots": cmd_roots,
    "kernels": cmd_kernels,
    "simulate": cmd_simulate,
    "rates": cmd_rates,
    "profile": cmd_profile,
    "table1": cmd_table1,
    "bounds": cmd_bounds,
}


# --- output ------------------------------------------------------------------


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def to_csv(rows):
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(rows[0]))
    for row in rows:
        writer.writerow([_cell(v) for v in row.values()])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def to_json(rows):
    return json.dumps([{k: _json_value(v) for k, v in row.items()} for row in rows], indent=1) + "\n"


def write_output(rows, fmt, out):
    text = to_csv(rows) if fmt == "csv" else to_json(rows)
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def run(argv=None):
    """Run one subcommand; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        rows = COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"thermoplate: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ThermoplateError) as exc:
        print(f"thermoplate: invalid configuration: {exc}", file=sys.stderr)
        return 1
    try:
        write_output(rows, args.format, args.out)
    except OSError as exc:
        print(f"thermoplate: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())
