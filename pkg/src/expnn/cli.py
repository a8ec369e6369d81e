"""Command-line experiment runner.

    expnn run --kernel tanh --operator E_n --function sinlog --scales 10,100,1000
    expnn run --config sweep.cfg --nu 0.3 --out results/
    expnn list
    expnn conditions bspline1

A config file holds ``key = value`` lines (``#`` starts a comment); flags
given on the command line override it. Exit codes: 0 all requested bound
checks hold, 1 a bound was violated, 2 bad usage or config syntax, 3 unknown
kernel/operator/function name, 4 scale too small for the interval, 5 output
directory not writable, 6 any other numerical error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from . import registry
from .errors import ExpnnError, InvalidConfigError, ScaleTooSmallError, UnknownNameError
from .experiment import ExperimentConfig, run_experiment, summary_text, write_outputs
from .operators import FAMILIES
from .sigmoids import check_conditions, get_sigmoid, list_sigmoids

EXIT_OK = 0
EXIT_BOUND_VIOLATED = 1
EXIT_USAGE = 2
EXIT_UNKNOWN_NAME = 3
EXIT_SCALE_TOO_SMALL = 4
EXIT_OUTPUT = 5
EXIT_NUMERIC = 6

_KEYS = {
    "kernel": "kernel_name",
    "operator": "operator_family",
    "function": "function_name",
    "interval": "interval",
    "scales": "scales",
    "nu": "nu",
    "grid_points": "grid_points",
    "truncation_k": "truncation_K",
    "out": "output_dir",
    "output_dir": "output_dir",
    "seed": "seed",
    "random_points": "random_points",
    "figures": "figures",
}


class ConfigError(ValueError):
    pass


def _pair(text):
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 2:
        raise ConfigError(f"interval must be 'a,b', got {text!r}")
    return float(parts[0]), float(parts[1])


def _scales(text):
    vals = []
    for p in text.replace(" ", "").split(","):
        if p:
            v = float(p)
            vals.append(int(v) if v.is_integer() else v)
    return tuple(vals)


def _bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


_PARSERS = {
    "interval": _pair,
    "scales": _scales,
    "nu": float,
    "grid_points": int,
    "truncation_K": int,
    "seed": int,
    "random_points": int,
    "figures": _bool,
}


def _convert(attr, raw):
    try:
        return _PARSERS.get(attr, str)(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {attr}: {raw!r} ({exc})") from None


def read_config(path) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, raw = (s.strip() for s in line.split("=", 1))
            attr = _KEYS.get(key.lower())
            if attr is None:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[attr] = _convert(attr, raw)
    return values


def build_config(args) -> ExperimentConfig:
    values = read_config(args.config) if args.config else {}
    overrides = {
        "kernel_name": args.kernel, "operator_family": args.operator,
        "function_name": args.function, "interval": args.interval,
        "scales": args.scales, "nu": args.nu, "grid_points": args.grid_points,
        "truncation_K": args.truncation_K, "output_dir": args.out, "seed": args.seed,
        "random_points": args.random_points, "figures": args.figures,
    }
    for attr, raw in overrides.items():
        if raw is not None:
            values[attr] = raw if not isinstance(raw, str) else _convert(attr, raw)
    known = {f.name for f in fields(ExperimentConfig)}
    return ExperimentConfig(**{k: v for k, v in values.items() if k in known})


def _add_run_args(p):
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--kernel", help=f"sigmoid: {', '.join(list_sigmoids())}")
    p.add_argument("--operator", help=f"family: {', '.join(FAMILIES)}")
    p.add_argument("--function", help="registry function name (see 'expnn list')")
    p.add_argument("--interval", help="a,b (box [a,b]^N for E_n_multivariate)")
    p.add_argument("--scales", help="comma-separated, strictly increasing")
    p.add_argument("--nu", help="exponent in (0, 1) used by the bounds")
    p.add_argument("--grid-points", dest="grid_points", help="evaluation grid size")
    p.add_argument("--truncation-K", dest="truncation_K",
                   help="half-width of the Q_n / S_w summation window")
    p.add_argument("--seed", help="seed for --random-points")
    p.add_argument("--random-points", dest="random_points",
                   help="extra log-uniform random evaluation points")
    p.add_argument("--out", help="output directory")
    fig = p.add_mutually_exclusive_group()
    fig.add_argument("--figures", dest="figures", action="store_const", const="true")
    fig.add_argument("--no-figures", dest="figures", action="store_const", const="false")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expnn", description="Exponential-type NN operator experiments")
    sub = parser.add_subparsers(dest="command")
    _add_run_args(sub.add_parser("run", help="run a scale sweep"))
    sub.add_parser("list", help="list kernels, operators and functions")
    cond = sub.add_parser("conditions", help="check a sigmoid's admissibility conditions")
    cond.add_argument("sigmoid")
    cond.add_argument("--extent", type=float, default=10.0)
    cond.add_argument("--samples", type=int, default=1000)
    return parser


def _cmd_list():
    print("kernels:   " + " ".join(list_sigmoids()))
    print("operators: " + " ".join(FAMILIES))
    print("functions:")
    for name in registry.list():
        entry = registry.get(name)
        print(f"  {name:<16} {entry.notes}")
    return EXIT_OK


def _cmd_conditions(args):
    rep = check_conditions(get_sigmoid(args.sigmoid), args.extent, args.samples)
    print(f"condition 1 (C2, concave on R+): {rep.condition_1_c2_concave}")
    print(f"condition 2 (left-tail decay):   {rep.condition_2_decay} "
          f"(slope {rep.decay_slope:.4g})")
    print(f"condition 3 (odd symmetry):      {rep.condition_3_odd_symmetry} "
          f"(deviation {rep.symmetry_deviation:.3g})")
    print(f"overall: {'pass' if rep.overall else 'fail'}")
    return EXIT_OK if rep.overall else EXIT_BOUND_VIOLATED


def _cmd_run(args):
    cfg = build_config(args)
    result = run_experiment(cfg, write=False)
    try:
        write_outputs(result, cfg.output_dir)
    except OSError as exc:
        print(f"expnn: cannot write to {cfg.output_dir}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    sys.stdout.write(summary_text(result))
    return EXIT_OK if result.all_satisfied else EXIT_BOUND_VIOLATED


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in ("run", "list", "conditions", "-h", "--help"):
        argv.insert(0, "run")
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            return _cmd_list()
        if args.command == "conditions":
            return _cmd_conditions(args)
        return _cmd_run(args)
    except (ConfigError, InvalidConfigError, OSError) as exc:
        # write failures are caught in _cmd_run; an OSError here is the config file
        print(f"expnn: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownNameError as exc:
        print(f"expnn: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_NAME
    except ScaleTooSmallError as exc:
        print(f"expnn: {exc}", file=sys.stderr)
        return EXIT_SCALE_TOO_SMALL
    except ExpnnError as exc:
        print(f"expnn: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
