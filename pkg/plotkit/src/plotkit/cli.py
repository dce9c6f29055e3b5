"""plotkit command line.

    plotkit decay <run-dir> --quantity NAME [--out DIR]
    plotkit conservation <run-dir> [--compare RUN2] [--out DIR]
    plotkit lambda <run-dir> --snapshot N [--out DIR]
"""

from __future__ import annotations

import argparse
import sys

from plotkit.figures import plot_conservation, plot_decay, plot_lambda_measure
from plotkit.io import ArtifactError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotkit", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decay", help="log-log decay plot with target slope")
    p.add_argument("run_dir")
    p.add_argument("--quantity", default="grad_sqrt_rho_l2")
    p.add_argument("--out", default=None)
    p.set_defaults(func=lambda a: plot_decay(a.run_dir, a.quantity, a.out))

    p = sub.add_parser("conservation", help="relative M/E/P drifts")
    p.add_argument("run_dir")
    p.add_argument("--compare", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=lambda a: plot_conservation(a.run_dir, a.out, a.compare))

    p = sub.add_parser("lambda", help="chemical-potential density with atoms")
    p.add_argument("run_dir")
    p.add_argument("--snapshot", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=lambda a: plot_lambda_measure(a.run_dir, a.snapshot, a.out))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except ArtifactError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
