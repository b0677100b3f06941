"""plotkit command line: render experiment CSVs to SVG + PNG."""
from __future__ import annotations

import argparse
import sys

from .plots import DIAG_KINDS, plot_diagnostics, plot_figure1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    fig = sub.add_parser("figure1", help="mean error vs 1/gamma sweep")
    fig.add_argument("csv")
    fig.add_argument("out", help="output path stem (writes .svg and .png)")
    fig.add_argument(
        "--per-unitary",
        action="store_true",
        help="average within each trial before aggregating across trials",
    )
    diag = sub.add_parser("diag", help="diagnostic plots")
    diag.add_argument("kind", choices=DIAG_KINDS)
    diag.add_argument("csv")
    diag.add_argument("out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "figure1":
            paths = plot_figure1(args.csv, args.out, per_unitary=args.per_unitary)
        else:
            paths = plot_diagnostics(args.csv, args.kind, args.out)
    except (ValueError, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
