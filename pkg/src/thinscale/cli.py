"""Command-line front end.

Exit codes: 0 success, 1 computation guard tripped (cell budget), 2 invalid
arguments or config, 3 a statistical gate failed, 4 a deterministic identity
or bound was violated.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, verify
from .environment import DistributionSpec, build_walk_ensemble, sample_weights
from .experiment import BudgetExceeded, ConfigError, ExperimentConfig, run_experiment, write_outputs
from .melon import melon_topk
from .passage import horizontal_lpp, lattice_lpp
from .scaling import ScalingFrame, coord_map, rescale_geodesic

EXIT_OK, EXIT_GUARD, EXIT_USAGE, EXIT_GATE, EXIT_BOUND = 0, 1, 2, 3, 4

DEFAULT_CELL_BUDGET = 10 ** 9


class UsageError(Exception):
    pass


def _point(text):
    try:
        u, v = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'u,v' integers, got {text!r}") from None
    return u, v


def _dist(args):
    params = {}
    for item in args.param or []:
        key, _, val = item.partition("=")
        try:
            params[key] = float(val)
        except ValueError:
            raise UsageError(f"bad --param {item!r}") from None
    try:
        return DistributionSpec(args.dist, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _guard(cells, budget):
    if cells > budget:
        raise BudgetExceeded(f"{cells} DP cells requested, budget is {budget}")


def _add_env_flags(p):
    p.add_argument("--dist", default="gaussian", help="weight family")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="distribution parameter (q for geometric, a for pareto)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cell-budget", type=int, default=DEFAULT_CELL_BUDGET)


def cmd_passage(args, out):
    if args.width < 1 or args.height < 1:
        raise UsageError("--width and --height must be positive")
    w = sample_weights(_dist(args), args.width, args.height, args.seed)
    a, b = args.from_, args.to
    _guard((abs(b[0] - a[0]) + 1) * (abs(b[1] - a[1]) + 1), args.cell_budget)
    fn = horizontal_lpp if args.horizontal else lattice_lpp
    try:
        res = fn(w, a, b, want_geodesic=args.geodesic is not None)
    except (ValueError, IndexError) as exc:
        raise UsageError(str(exc)) from None
    out.write(res.to_json() + "\n")
    if args.geodesic is not None:
        with open(args.geodesic, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["level", "entry"])
            for level, entry in res.geodesic.csv_rows():
                wr.writerow([level, repr(entry)])
    return EXIT_OK


def cmd_melon(args, out):
    if args.lines < 1 or args.width < 1:
        raise UsageError("--lines and --width must be positive")
    if not 1 <= args.k <= args.lines:
        raise UsageError("need 1 <= k <= lines")
    _guard(args.width * args.lines, args.cell_budget)
    F = build_walk_ensemble(sample_weights(_dist(args), args.width, args.lines, args.seed))
    grid = np.arange(0, args.width + 1, args.every, dtype=float)
    if grid[-1] != args.width:
        grid = np.append(grid, float(args.width))
    text = melon_topk(F, args.k, grid).to_csv()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_geodesic(args, out):
    try:
        frame = ScalingFrame(args.n, args.beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    b = coord_map(0, 1, frame)
    _guard((b.u + 1) * (b.v + 1), args.cell_budget)
    w = sample_weights(_dist(args), b.u + 1, b.v + 1, args.seed)
    res = lattice_lpp(w, (0, 0), b, want_geodesic=True)
    buf = out if not args.out else open(args.out, "w", newline="")
    try:
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["level", "entry", "rescaled"])
        for level, entry in res.geodesic.csv_rows():
            z = rescale_geodesic(res.geodesic, frame, level / frame.n)
            wr.writerow([level, repr(entry), repr(z)])
    finally:
        if args.out:
            buf.close()
    return EXIT_OK


def cmd_experiment(args, out):
    path = args.config
    if not os.path.exists(path) and os.path.exists(bundled_config(path)):
        path = bundled_config(path)
    try:
        cfg = ExperimentConfig.load(path)
    except FileNotFoundError:
        raise UsageError(f"no such config file: {args.config}") from None
    except ConfigError as exc:
        raise UsageError(f"invalid config: {exc}") from None
    if args.cell_budget is not None:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "cell_budget": args.cell_budget})
    started = datetime.now(timezone.utc).isoformat()
    result = run_experiment(cfg, workers=args.workers)
    finished = datetime.now(timezone.utc).isoformat()
    report = write_outputs(result, args.out, started, finished)
    out.write(f"wrote {args.out}/samples.csv, report.json, manifest.json\n")
    if report["bound_violations"]:
        out.write(f"deterministic bound violated {report['bound_violations']} times\n")
        return EXIT_BOUND
    failed = [k for k, g in report["gates"].items() if not g["passed"]]
    if failed:
        out.write(f"statistical gates failed: {', '.join(failed)}\n")
        return EXIT_GATE
    return EXIT_OK


def cmd_verify(args, out):
    failures, _ = verify.run_all(args.seeds, log=lambda line: out.write(line + "\n"))
    return EXIT_BOUND if failures else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="thinscale", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("passage", help="lattice passage time between two points")
    _add_env_flags(p)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--from", dest="from_", type=_point, required=True, metavar="U,V")
    p.add_argument("--to", type=_point, required=True, metavar="U,V")
    p.add_argument("--horizontal", action="store_true",
                   help="collect weights only at horizontal-step vertices")
    p.add_argument("--geodesic", metavar="CSV", help="write the geodesic profile here")
    p.set_defaults(func=cmd_passage)

    p = sub.add_parser("melon", help="top-k melon lines of a walk ensemble, as CSV")
    _add_env_flags(p)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--lines", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--every", type=int, default=1, help="grid spacing of evaluation points")
    p.add_argument("--out")
    p.set_defaults(func=cmd_melon)

    p = sub.add_parser("geodesic", help="right-most geodesic across a frame's rectangle")
    _add_env_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", required=True, help="rational, e.g. 5/2")
    p.add_argument("--out")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("experiment", help="run a JSON-configured Monte Carlo experiment")
    p.add_argument("config", help="JSON config path or the name of a bundled config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--cell-budget", type=int, default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="oracle and identity checks")
    p.add_argument("--seeds", type=int, default=25)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"thinscale: {exc}\n")
        return EXIT_USAGE
    except BudgetExceeded as exc:
        sys.stderr.write(f"thinscale: {exc}\n")
        return EXIT_GUARD


def main_entry():
    sys.exit(main())


def bundled_config(name):
    """Path of a config shipped with the package, e.g. ``universality-small``."""
    from importlib.resources import files
    return str(files("thinscale") / "configs" / f"{name}.json")


if __name__ == "__main__":
    main_entry()
