"""Command-line front end: ``rzchart <command> [options]``.

Exit status is 0 on success, 2 for invalid input or configuration and 3 when
a computation leaves its numerical domain (non-stationary model, quantile
without a real root, singular estimation problem).
"""
from __future__ import annotations

import argparse
import math
import re
import sys
import warnings

import numpy as np

from . import __version__
from .chart import ShiftSpec, arl, classify, design_chart, design_from_cv, earl, resolve_alpha
from .errors import ConfigError, DataError, DomainError, EstimationError, RZChartError
from .estimation import estimate_var1
from .io import load_config, read_series_csv, read_subgroups_csv, render_subgroups, render_table
from .scenarios import food_model, furnace_model
from .simulate import SimConfig, SubgroupSampler, rng_metadata, shifted_model, simulate_run_lengths
from .tables import PRESETS, get_preset, run_grid
from .var1 import Var1Model

DEFAULT_ALPHA = 0.005
SCENARIOS = {"food": food_model, "furnace": furnace_model}
DIRECT_KEYS = ("gamma_x", "gamma_y", "rho0")
MODEL_KEYS = ("mu", "sigma_eps", "scenario")
# alternatives that cannot be combined: when the command line uses one side,
# config-file values for every side are dropped
EXCLUSIVE = (
    (("alpha",), ("arl0",)),
    (DIRECT_KEYS + ("z0",), MODEL_KEYS),
    (("scenario",), ("phi", "mu", "sigma_eps")),
)
NOT_ECHOED = {"func", "command"}


def _add_design_args(p: argparse.ArgumentParser, need_n: bool = True) -> None:
    g = p.add_argument_group("risk")
    g.add_argument("--alpha", type=float, help=f"false-alarm probability (default {DEFAULT_ALPHA} if no --arl0)")
    g.add_argument("--arl0", type=float, help="in-control ARL; alternative to --alpha")
    d = p.add_argument_group("direct parameterisation")
    d.add_argument("--gamma-x", type=float, help="coefficient of variation of X")
    d.add_argument("--gamma-y", type=float, help="coefficient of variation of Y")
    d.add_argument("--rho0", type=float, help="in-control correlation of X and Y")
    d.add_argument("--z0", type=float, help="in-control ratio mu_X/mu_Y (default 1)")
    m = p.add_argument_group("model parameterisation")
    m.add_argument("--mu", type=float, nargs=2, metavar=("MU_X", "MU_Y"))
    m.add_argument("--sigma-eps", type=float, nargs=4, metavar="S", help="innovation covariance, row-major")
    m.add_argument("--scenario", choices=sorted(SCENARIOS), help="built-in process model")
    p.add_argument("--phi", type=float, nargs="+", metavar="PHI",
                   help="transition matrix: 2 values (diagonal) or 4 values (row-major)")
    if need_n:
        p.add_argument("--n", type=int, help="subgroup size")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="also write the CSV output to this path")
    p.add_argument("--config", help="INI file; flags override its values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rzchart", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="probability control limits")
    _add_design_args(p)
    _add_output(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("arl", help="ARL for one shift")
    _add_design_args(p)
    p.add_argument("--tau", type=float, help="shift of the mean ratio, z1 = tau * z0")
    p.add_argument("--rho1", type=float, help="out-of-control correlation (default rho0)")
    _add_output(p)
    p.set_defaults(func=cmd_arl)

    p = sub.add_parser("earl", help="expected ARL over an interval of shift sizes")
    _add_design_args(p)
    p.add_argument("--omega", help="shift interval such as '[0.9,1)' or '(1,1.1]'")
    p.add_argument("--rho1", type=float, help="out-of-control correlation (default rho0)")
    p.add_argument("--method", choices=("grid", "quadrature"), help="averaging method (default grid)")
    p.add_argument("--step", type=float, help="grid spacing for --method grid (default 0.01)")
    p.add_argument("--order", type=int, help="Gauss-Legendre order for --method quadrature (default 64)")
    _add_output(p)
    p.set_defaults(func=cmd_earl)

    p = sub.add_parser("table", help="sweep a preset grid")
    p.add_argument("--preset", choices=sorted(PRESETS), help="grid to sweep")
    p.add_argument("--phi-diag", type=float, help="replace the grid's Phi by diag(v, v)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--arl0", type=float)
    p.add_argument("--method", choices=("grid", "quadrature"), help="EARL averaging method")
    _add_output(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("estimate", help="least-squares VAR(1) fit to a t,x,y CSV")
    p.add_argument("data", nargs="?", help="Phase I series CSV")
    p.add_argument("--min-length", type=int, help="minimum series length (default 10)")
    p.add_argument("--lags", type=int, help="residual cross-correlation lags (default 5)")
    _add_output(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="Monte Carlo run lengths, optionally subgroup data")
    _add_design_args(p)
    p.add_argument("--tau", type=float, help="shift of the mean ratio (default 1)")
    p.add_argument("--rho1", type=float, help="out-of-control correlation (default rho0)")
    p.add_argument("--seed", type=int, help="master seed (default 1)")
    p.add_argument("--replications", type=int, help="number of run lengths (default 10000)")
    p.add_argument("--max-run-length", type=int, help="censoring cap (default 1000000)")
    p.add_argument("--workers", type=int, help="worker processes (default 1); results do not depend on it")
    p.add_argument("--data-out", help="write simulated subgroups (sample,obs_index,x,y) to this path")
    p.add_argument("--samples", type=int, help="number of subgroups for --data-out (default 30)")
    p.add_argument("--shift-after", type=int, help="in-control subgroups before the shift in --data-out")
    _add_output(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("monitor", help="classify subgroups from a sample,obs_index,x,y CSV")
    p.add_argument("data", nargs="?", help="subgroup CSV")
    _add_design_args(p, need_n=False)
    _add_output(p)
    p.set_defaults(func=cmd_monitor)
    return parser


# ----------------------------------------------------------------- config

def _subparser(parser, command):
    for action in parser._subparsers._group_actions:
        return action.choices[command]
    raise ConfigError(f"unknown command {command}")


def _config_argv(sub: argparse.ArgumentParser, items: dict, given: set) -> list[str]:
    actions = {a.dest: a for a in sub._actions if a.option_strings}
    blocked = set(given)
    for sides in EXCLUSIVE:
        if any(given & set(side) for side in sides):
            blocked |= {k for side in sides for k in side}
    argv = []
    for key, value in items.items():
        if key == "data" and "data" in {a.dest for a in sub._actions}:
            if "data" not in given:
                argv.append(value)
            continue
        if key not in actions:
            raise ConfigError(f"config key {key!r} is not an option of this command")
        if key in blocked or key == "config":
            continue
        argv += [actions[key].option_strings[-1], *value.split()]
    return argv


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        sub = _subparser(parser, args.command)
        given = {k for k, v in vars(args).items() if v is not None and k not in NOT_ECHOED}
        extra = _config_argv(sub, load_config(args.config, args.command), given)
        args = parser.parse_args([args.command, *extra, *argv[1:]])
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise ConfigError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _alpha(args) -> float:
    if args.alpha is not None and args.arl0 is not None:
        raise ConfigError("give only one of --alpha and --arl0")
    if args.alpha is None and args.arl0 is None:
        args.alpha = DEFAULT_ALPHA
    try:
        args.resolved_alpha = resolve_alpha(args.alpha, args.arl0)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    return args.resolved_alpha


def _phi(args):
    if args.phi is None:
        return None
    if len(args.phi) == 2:
        return np.diag(args.phi)
    if len(args.phi) == 4:
        return np.array(args.phi).reshape(2, 2)
    raise ConfigError("--phi takes 2 (diagonal) or 4 (row-major) values")


def _model(args):
    """``("direct", ...)`` or ``("model", Var1Model)`` from the parameter flags."""
    direct = [k for k in DIRECT_KEYS + ("z0",) if getattr(args, k, None) is not None]
    model = [k for k in MODEL_KEYS if getattr(args, k, None) is not None]
    if direct and model:
        raise ConfigError(f"options {direct} (direct) and {model} (model) cannot be combined")
    if args.scenario is not None:
        if args.phi is not None or args.mu is not None or args.sigma_eps is not None:
            raise ConfigError("--scenario already fixes --mu, --phi and --sigma-eps")
        return "model", SCENARIOS[args.scenario]()
    if model:
        _require(args, "mu", "sigma_eps", "phi")
        return "model", Var1Model(np.array(args.mu), _phi(args), np.array(args.sigma_eps).reshape(2, 2))
    if direct:
        _require(args, "gamma_x", "gamma_y", "rho0", "phi")
        for name in ("gamma_x", "gamma_y"):
            if not getattr(args, name) > 0:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")
        if args.z0 is None:
            args.z0 = 1.0
        return "direct", _phi(args)
    raise ConfigError("give either --gamma-x/--gamma-y/--rho0/--phi or --mu/--phi/--sigma-eps (or --scenario)")


def _check_range(args, name, lo, hi):
    v = getattr(args, name, None)
    if v is not None and not lo < v < hi:
        raise ConfigError(f"--{name.replace('_', '-')} must lie in ({lo:g}, {hi:g}), got {v}")


def _scenario_n(args):
    if args.n is None and args.scenario is not None:
        args.n = 5
    _require(args, "n")
    if args.n < 1:
        raise ConfigError(f"--n must be at least 1, got {args.n}")
    for name in ("rho0", "rho1"):
        _check_range(args, name, -1.0, 1.0)
    _check_range(args, "tau", 0.0, math.inf)


def _design(args):
    kind, obj = _model(args)
    alpha = _alpha(args)
    if kind == "model":
        return design_chart(obj, args.n, alpha=alpha), obj
    d = design_from_cv(args.gamma_x, args.gamma_y, args.rho0, obj, args.n, alpha=alpha, z0=args.z0)
    return d, None


def _echo(args, **extra) -> dict:
    cfg = {"command": args.command, "version": __version__}
    for k, v in vars(args).items():
        if k not in NOT_ECHOED:
            cfg[k] = v
    cfg.update(extra)
    return cfg


def _emit(args, columns, rows, echo) -> None:
    text = render_table(columns, rows, echo)
    sys.stdout.write(text)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)


# ----------------------------------------------------------------- commands

def cmd_design(args):
    _scenario_n(args)
    d, _ = _design(args)
    _emit(args, ["n", "alpha", "arl0", "lcl", "ucl", "gamma_xbar", "gamma_ybar", "rho_bar", "omega_bar"],
          [[d.n, d.alpha, d.arl0, d.lcl, d.ucl, d.params.gamma_x, d.params.gamma_y, d.params.rho,
            d.params.omega]], _echo(args))


def cmd_arl(args):
    _scenario_n(args)
    _require(args, "tau")
    d, _ = _design(args)
    if args.rho1 is None:
        args.rho1 = d.rho0
    rep = arl(d, ShiftSpec(args.tau, args.rho1))
    _emit(args, ["n", "tau", "rho1", "lcl", "ucl", "beta", "arl"],
          [[d.n, args.tau, args.rho1, d.lcl, d.ucl, rep.beta, rep.arl]], _echo(args))


_INTERVAL = re.compile(r"^\s*([\[(])\s*([^,;\s]+)\s*[,;]\s*([^\])\s]+)\s*([\])])\s*$")


def parse_interval(text: str):
    """``'[0.9,1)'`` -> ``((0.9, 1.0), (True, False))``."""
    m = _INTERVAL.match(text or "")
    if not m:
        raise ConfigError(f"--omega must look like '[a,b]', '[a,b)', '(a,b]' or '(a,b)', got {text!r}")
    try:
        a, b = float(m.group(2)), float(m.group(3))
    except ValueError:
        raise ConfigError(f"--omega endpoints must be numbers, got {text!r}") from None
    return (a, b), (m.group(1) == "[", m.group(4) == "]")


def cmd_earl(args):
    _scenario_n(args)
    _require(args, "omega")
    interval, closed = parse_interval(args.omega)
    d, _ = _design(args)
    if args.rho1 is None:
        args.rho1 = d.rho0
    args.method = args.method or "grid"
    kw = {}
    if args.step is not None:
        kw["step"] = args.step
    if args.order is not None:
        kw["order"] = args.order
    value = earl(d, interval, rho1=args.rho1, closed=closed, method=args.method, **kw)
    _emit(args, ["n", "omega", "rho1", "method", "lcl", "ucl", "earl"],
          [[d.n, args.omega, args.rho1, args.method, d.lcl, d.ucl, value]], _echo(args))


def cmd_table(args):
    _require(args, "preset")
    alpha = _alpha(args)
    grid = get_preset(args.preset, phi=args.phi_diag, alpha=alpha, earl_method=args.method)
    columns, rows = run_grid(grid)
    _emit(args, columns, rows, _echo(args, grid_kind=grid.kind))


def cmd_estimate(args):
    _require(args, "data")
    kw = {}
    if args.min_length is not None:
        kw["min_length"] = args.min_length
    if args.lags is not None:
        kw["max_lag"] = args.lags
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = estimate_var1(read_series_csv(args.data), **kw)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    rows = [
        ["mu", "", res.mu[0], res.mu[1]],
        ["phi", "row1", res.phi[0, 0], res.phi[0, 1]],
        ["phi", "row2", res.phi[1, 0], res.phi[1, 1]],
        ["sigma_eps", "row1", res.sigma_eps[0, 0], res.sigma_eps[0, 1]],
        ["sigma_eps", "row2", res.sigma_eps[1, 0], res.sigma_eps[1, 1]],
        ["spectral_radius", "", res.spectral_radius, ""],
        ["stationary", "", str(res.stationary).lower(), ""],
        ["T", "", res.T, ""],
    ]
    for k, c in enumerate(res.residual_ccf, start=1):
        rows.append(["resid_ccf", f"lag{k}_x", c[0, 0], c[0, 1]])
        rows.append(["resid_ccf", f"lag{k}_y", c[1, 0], c[1, 1]])
    _emit(args, ["quantity", "part", "c1", "c2"], rows, _echo(args))


def cmd_simulate(args):
    _scenario_n(args)
    d, model = _design(args)
    if model is None:
        model = Var1Model.from_cv(args.gamma_x, args.gamma_y, args.rho0, _phi(args), z0=args.z0)
    args.tau = 1.0 if args.tau is None else args.tau
    args.rho1 = d.rho0 if args.rho1 is None else args.rho1
    args.seed = 1 if args.seed is None else args.seed
    args.replications = 10_000 if args.replications is None else args.replications
    args.max_run_length = 10 ** 6 if args.max_run_length is None else args.max_run_length
    args.workers = 1 if args.workers is None else args.workers
    shifted = shifted_model(model, ShiftSpec(args.tau, args.rho1))
    cfg = SimConfig(shifted, d.n, args.seed, args.replications, args.max_run_length)
    meta = rng_metadata(cfg)
    if args.data_out:
        args.samples = 30 if args.samples is None else args.samples
        args.shift_after = args.samples if args.shift_after is None else args.shift_after
        if not 0 <= args.shift_after <= args.samples:
            raise ConfigError("--shift-after must lie between 0 and --samples")
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
        before = SubgroupSampler(model, d.n).draw(rng, args.shift_after)
        after = SubgroupSampler(shifted, d.n).draw(rng, args.samples - args.shift_after)
        data = np.concatenate([before, after])
        with open(args.data_out, "w") as fh:
            fh.write(render_subgroups(range(1, args.samples + 1), data, _echo(args, **meta)))
    lengths, censored = simulate_run_lengths(d, cfg, workers=args.workers)
    mean = float(lengths.mean())
    stderr = float(lengths.std(ddof=1) / math.sqrt(len(lengths))) if len(lengths) > 1 else math.nan
    summary = dict(lcl=d.lcl, ucl=d.ucl, arl_mean=mean, arl_stderr=stderr,
                   censored=int(censored.sum()), lower_bound=bool(censored.any()),
                   analytic_arl=arl(d, ShiftSpec(args.tau, args.rho1)).arl)
    print(" ".join(f"{k}={v}" for k, v in summary.items()), file=sys.stderr)
    rows = [[i + 1, int(L), str(bool(c)).lower()] for i, (L, c) in enumerate(zip(lengths, censored))]
    _emit(args, ["replication", "run_length", "censored"], rows, _echo(args, **meta, **summary))


def cmd_monitor(args):
    _require(args, "data")
    samples, data = read_subgroups_csv(args.data)
    n = data.shape[1]
    args.n = n
    d, _ = _design(args)
    rows = []
    for s, g in zip(samples, data):
        xbar, ybar = g[:, 0].mean(), g[:, 1].mean()
        z = g[:, 0].sum() / g[:, 1].sum()
        rows.append([s, xbar, ybar, z, d.lcl, d.ucl, classify(d, z).value])
    _emit(args, ["sample", "xbar", "ybar", "zbar", "lcl", "ucl", "verdict"], rows, _echo(args))


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ConfigError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except (ConfigError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, EstimationError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except RZChartError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
