"""Command-line entry points.

    qhd run <config>                  execute one configuration
    qhd sweep <config-dir> -w N      run every *.cfg in a directory
    qhd lift <hydro-csv> --out FILE  standalone wave-function lifting
    qhd analyze <run-dir>            recompute diagnostics from fields

Exit codes: 0 success, 2 validation error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from qhdlab.config import ConfigError
from qhdlab import runner
from qhdlab.lifting import LiftError, lift_h1, lift_h2

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _cmd_run(args) -> int:
    artifacts = runner.run_config_file(args.config)
    status = artifacts.summary["status"]
    print(f"run: {artifacts.out_dir} [{status}]")
    cons = artifacts.summary.get("conservation", {})
    if cons:
        print("  mass drift {mass_drift:.3e}  energy drift {energy_drift:.3e}  "
              "momentum drift {momentum_drift:.3e}".format(**cons))
    return EXIT_OK if status == "ok" else EXIT_NUMERICAL


def _cmd_sweep(args) -> int:
    paths = sorted(Path(args.config_dir).glob("*.cfg"))
    if not paths:
        print(f"no *.cfg files in {args.config_dir}", file=sys.stderr)
        return EXIT_VALIDATION
    results = runner.sweep(paths, workers=args.workers)
    failures = [r for r in results if r["status"] != "ok"]
    for r in results:
        print(f"{r['status']:8s} {r['config']}" +
              (f" -> {r['dir']}" if r["dir"] else f"  ({r.get('error')})"))
    print(f"sweep: {len(results) - len(failures)}/{len(results)} succeeded")
    return EXIT_OK if not failures else EXIT_NUMERICAL


def _cmd_lift(args) -> int:
    cols = runner._read_csv_columns(args.hydro_csv)
    for need in ("x", "sqrt_rho", "Lambda"):
        if need not in cols:
            print(f"lift: column {need!r} missing in {args.hydro_csv}",
                  file=sys.stderr)
            return EXIT_VALIDATION
    grid = runner._grid_from_x(cols["x"])
    from qhdlab.polar import HydroState
    h = HydroState.from_fields(grid, cols["sqrt_rho"], cols["Lambda"],
                               cols.get("dx_sqrt_rho"))
    if args.h1:
        psi = lift_h1(grid, h, args.delta)
    else:
        psi = lift_h2(grid, h, args.gamma, tau_rel=args.tau_rel,
                      delta=args.delta)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "re_psi", "im_psi"])
        for xv, pv in zip(grid.x, psi):
            writer.writerow([f"{xv:.17g}", f"{pv.real:.17g}", f"{pv.imag:.17g}"])
    print(f"lift: wrote {args.out}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    out = runner.analyze(args.run_dir)
    print(f"analyze: wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qhd", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one run configuration")
    p_run.add_argument("config")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run every *.cfg in a directory")
    p_sweep.add_argument("config_dir")
    p_sweep.add_argument("--workers", "-w", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_lift = sub.add_parser("lift", help="lift hydrodynamic CSV data to a wave function")
    p_lift.add_argument("hydro_csv")
    p_lift.add_argument("--out", required=True)
    p_lift.add_argument("--gamma", type=float, default=2.0)
    p_lift.add_argument("--delta", type=float, default=1e-8)
    p_lift.add_argument("--tau-rel", type=float, default=1e-8)
    p_lift.add_argument("--h1", action="store_true",
                        help="single global phase integral (no per-component alignment)")
    p_lift.set_defaults(func=_cmd_lift)

    p_an = sub.add_parser("analyze", help="recompute diagnostics from stored fields")
    p_an.add_argument("run_dir")
    p_an.set_defaults(func=_cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except (FileNotFoundError, LiftError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except RuntimeError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
