"""Command-line driver: ``carrollfluid certify | simulate | compare``.

Exit codes: 0 when everything passes, 2 when a certificate fails, 1 on any error.
"""

import argparse
import json
import os
import sys

from . import __version__
from .errors import CarrollError, ConfigError
from .reporting import RunConfig, SOLVERS, certify, compare, jsonable, simulate, write_json_atomic

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2
_SOLVER_ALIASES = {"characteristics": "chars"}


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors, which would collide with
    # the certificate-violation code.
    def error(self, message):
        raise ConfigError(message)


def _key_value(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected k=v, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k.strip(), float(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"value of {k!r} is not a number: {v!r}") from None


def _add_common(p):
    p.add_argument("--gamma", type=float, default=3.0, help="adiabatic exponent in (1, 3]")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="name of an analytic preset")
    src.add_argument("--data", help="CSV file with header x,sigma,beta")
    p.add_argument("--param", type=_key_value, action="append", default=[], metavar="K=V",
                   help="preset parameter (repeatable)")
    p.add_argument("--out", help="output directory")


def build_parser():
    parser = _Parser(prog="carrollfluid", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", help="admissibility, classification and blow-up prediction")
    _add_common(c)
    c.add_argument("--max-intervals", type=int, default=200,
                   help="number of per-foot blow-up intervals kept in the report")

    s = sub.add_parser("simulate", help="run a solver and certify its snapshots")
    _add_common(s)
    s.add_argument("--t-end", type=float, required=True)
    s.add_argument("--solver", default="grid", choices=SOLVERS + tuple(_SOLVER_ALIASES))
    s.add_argument("--nx", type=int, default=800, help="number of cells / output points")
    s.add_argument("--cfl", type=float, default=0.9)
    s.add_argument("--snapshots", type=int, default=5, help="number of snapshot intervals")
    s.add_argument("--tol-region", type=float, default=None,
                   help="region certificate tolerance (default 1e-9 exact, 10*dx*Lip grid)")
    s.add_argument("--spacing", type=float, default=None, help="characteristic bundle spacing")
    s.add_argument("--safety", type=float, default=0.05,
                   help="required relative margin below the blow-up lower bound")
    s.add_argument("--allow-near-blowup", action="store_true")

    m = sub.add_parser("compare", help="differences between simulate runs")
    m.add_argument("runs", nargs="+", help="run directories (first one is the reference)")
    m.add_argument("--out", help="output directory for comparison.json")
    return parser


def _config(args) -> RunConfig:
    cfg = RunConfig(gamma=args.gamma, preset=args.preset, parameters=dict(args.param),
                    data_path=args.data)
    if args.command == "certify":
        cfg.max_intervals = args.max_intervals
    if args.command == "simulate":
        cfg.solver = _SOLVER_ALIASES.get(args.solver, args.solver)
        cfg.t_end = args.t_end
        cfg.nx = args.nx
        cfg.cfl = args.cfl
        cfg.snapshots = args.snapshots
        cfg.tol_region = args.tol_region
        cfg.safety = args.safety
        cfg.allow_near_blowup = args.allow_near_blowup
        if args.spacing is not None:
            cfg.spacing = args.spacing
    return cfg


def _emit(payload, out_dir, name):
    if out_dir:
        write_json_atomic(os.path.join(out_dir, name), payload)
    print(json.dumps(jsonable(payload), indent=2, sort_keys=True, allow_nan=False))


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "certify":
            _emit(certify(_config(args)), args.out, "report.json")
            return EXIT_OK
        if args.command == "simulate":
            manifest, code = simulate(_config(args), args.out or "carrollfluid-run")
            summary = {k: manifest[k] for k in ("passed", "blowup_lower_bound")}
            summary["snapshots"] = [{"t": s["t"], "file": s["file"],
                                     "region_passed": s["region_certificate"]["passed"]}
                                    for s in manifest["snapshots"]]
            summary["lipschitz_passed"] = [d["passed"] for d in manifest["lipschitz_certificates"]]
            print(json.dumps(jsonable(summary), indent=2, sort_keys=True))
            return code
        _emit(compare(args.runs), args.out, "comparison.json")
        return EXIT_OK
    except CarrollError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
