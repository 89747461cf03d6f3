"""Command-line interface.

Exit status: 0 success, 2 invalid arguments, 3 numeric-domain error,
4 validation failure.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import validation
from .errors import ProcrusteanError
from .output import render, write_text
from .sweep import ConfigError, SweepConfig, columns, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VALIDATION = 0, 2, 3, 4

# flag dest -> axis name
_AXIS_FLAGS = {
    "lam": "lambda",
    "squeezing_db": "squeezing_db",
    "alpha": "alpha",
    "phi": "phi",
    "theta": "theta",
    "nu": "nu",
    "x": "x",
    "seed": "seed",
}


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON sweep description; flags override its fields")
    sq = p.add_mutually_exclusive_group()
    sq.add_argument("--lambda", dest="lam", type=float, nargs="+", metavar="L",
                    help="squeezing parameter lambda = tanh r")
    sq.add_argument("--squeezing-db", dest="squeezing_db", type=float, nargs="+", metavar="DB")
    p.add_argument("--alpha", type=float, nargs="+", help="coherent ancilla amplitude")
    p.add_argument("--phi", type=float, nargs="+", help="nonlinear phase (radians)")
    th = p.add_mutually_exclusive_group()
    th.add_argument("--theta", type=float, nargs="+", help="homodyne angle in radians (default pi/2)")
    th.add_argument("--theta-deg", type=float, nargs="+", help="homodyne angle in degrees")
    p.add_argument("--x", type=float, nargs="+", help="homodyne outcome(s)")
    p.add_argument("--seed", type=int, nargs="+")
    p.add_argument("--nu", type=float, nargs="+", help="target variance ratio V_out/V_in")
    p.add_argument("--out", dest="output_path", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--jobs", type=int, help="worker processes for sweeps")
    p.add_argument("--paper-quoted", action="store_true", default=None,
                   help="add the worked example's quoted numbers, labelled as such")
    p.add_argument("--n-max", type=int, help="fixed Fock cutoff instead of the automatic rule")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="procrustean",
        description="Entanglement concentration of two-mode squeezed vacuum by cross-Kerr "
                    "coupling, homodyne detection and feed-forward.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    sub.add_parser("run", parents=[common], help="run the protocol at given outcome(s)")
    sp = sub.add_parser("sample", parents=[common], help="sample outcomes and run the protocol on each")
    sp.add_argument("--count", type=int, help="samples per parameter point")
    dp = sub.add_parser("density", parents=[common], help="tabulate the outcome density")
    dp.add_argument("--points", type=int)
    dp.add_argument("--halfwidth", type=float)
    for name in ("exact", "exp-beta", "linear-beta"):
        dp.add_argument(f"--no-{name}", action="store_true", help=f"omit the {name} column")
    fp = sub.add_parser("feasibility", parents=[common], help="required outcome and resources for a target ratio")
    fp.add_argument("--margin", type=float, help="choose alpha so that alpha*phi/rhs equals this (when --alpha absent)")
    wp = sub.add_parser("sweep", parents=[common], help="run the sweep described by --config")
    wp.add_argument("--count", type=int)
    wp.add_argument("--points", type=int)
    wp.add_argument("--halfwidth", type=float)
    wp.add_argument("--margin", type=float)
    sub.add_parser("validate", help="run the built-in oracle suites")
    return parser


def config_from_args(args) -> SweepConfig:
    data = {}
    if args.config:
        base = SweepConfig.load(args.config)
        data = {k: getattr(base, k) for k in SweepConfig.__dataclass_fields__}
        data["axes"] = dict(base.axes)
    if args.command != "sweep":
        data["mode"] = args.command
    elif not args.config:
        raise ConfigError("sweep needs --config")

    axes = data.setdefault("axes", {})
    for dest, axis in _AXIS_FLAGS.items():
        values = getattr(args, dest, None)
        if values is not None:
            if axis in ("lambda", "squeezing_db"):
                axes.pop("lambda", None)
                axes.pop("squeezing_db", None)
            axes[axis] = list(values)
    if getattr(args, "theta_deg", None) is not None:
        axes["theta"] = [math.radians(v) for v in args.theta_deg]

    for key in ("output_path", "format", "jobs", "paper_quoted", "n_max", "count", "points",
                "halfwidth", "margin"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if args.command == "density":
        fid = dict(data.get("fidelity") or {"exact": True, "exp_beta": True, "linear_beta": True})
        for name in ("exact", "exp_beta", "linear_beta"):
            if getattr(args, f"no_{name}"):
                fid[name] = False
        data["fidelity"] = fid
    return SweepConfig.from_dict(data)


def cmd_validate(stream) -> int:
    checks = validation.run_all()
    for check in checks:
        print(check.line(), file=stream)
    failed = sum(c.status == validation.FAIL for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks without failure", file=stream)
    return EXIT_VALIDATION if failed else EXIT_OK


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "validate":
        return cmd_validate(stdout)
    try:
        cfg = config_from_args(args)
        rows = run_sweep(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except ProcrusteanError as exc:
        print(f"numeric error: {exc}", file=stderr)
        return EXIT_DOMAIN
    single = cfg.mode == "run" and cfg.size() == 1
    text = render(rows, columns(cfg), cfg.format, single=single)
    write_text(text, cfg.output_path, stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
