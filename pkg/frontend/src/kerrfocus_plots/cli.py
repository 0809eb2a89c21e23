"""Figure CLI: plots <kind> --in <csv> [--in2 <csv>] --out <path>.

Exit codes: 0 success, 2 bad input (missing file, wrong columns, malformed
footer).  Output format follows the --out extension; .png is the lossless
raster default, .svg gives vector output.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

from . import figures


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render kerrfocus CSV outputs as figures."
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind, two_inputs in (("rings", False), ("filters", False), ("rates", True)):
        p = sub.add_parser(kind)
        p.add_argument("--in", dest="input", required=True, help="input CSV")
        if two_inputs:
            p.add_argument("--in2", dest="input2", default=None,
                           help="second sweep CSV overlaid on the first")
        p.add_argument("--out", required=True, help="output image (.png or .svg)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.kind == "rings":
            fig = figures.plot_rings(args.input)
        elif args.kind == "filters":
            fig = figures.plot_filters(args.input)
        else:
            fig = figures.plot_rates(args.input, getattr(args, "input2", None))
        figures.save_figure(fig, args.out)
    except figures.SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
