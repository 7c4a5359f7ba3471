"""Standalone figure-rendering script.

One invocation renders one figure: pick a --kind, point the path flags at the
producer's CSV/JSON artifacts, and name the output image.  Schema mismatches
and empty tables exit nonzero with a message naming the offending column or
file, and never leave a partial image behind.
"""

import argparse
import sys

from crcplots.figures import FIGURE_KINDS, FigureSpec, RenderError, render
from crcplots.schema import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crcplots",
        description="Render figures from gridcrc experiment artifacts.",
    )
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--results", help="per-repetition results CSV")
    parser.add_argument("--summary", help="summary JSON (annotates risk-hist panels)")
    parser.add_argument(
        "--curves-dir",
        help="directory holding empirical.csv / loss_monotonized.csv / risk_monotonized.csv",
    )
    parser.add_argument(
        "--selection",
        action="append",
        default=[],
        metavar="JSON",
        help="selection record to mark on the curves (repeatable)",
    )
    parser.add_argument("--true-curve", help="true risk-curve CSV")
    parser.add_argument("--phase", help="phase-table CSV")
    parser.add_argument(
        "--corrections",
        action="append",
        default=[],
        metavar="CSV",
        help="correction-amount table (repeatable)",
    )
    parser.add_argument("--alpha", type=float, help="target level marker")
    parser.add_argument("--alpha-prime", type=float, help="adjusted level marker")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            output=args.out,
            results=args.results,
            summary=args.summary,
            curves_dir=args.curves_dir,
            selections=tuple(args.selection),
            true_curve=args.true_curve,
            phase=args.phase,
            corrections=tuple(args.corrections),
            alpha=args.alpha,
            alpha_prime=args.alpha_prime,
        )
        written = render(spec)
    except (SchemaError, RenderError, OSError) as exc:
        print(f"crcplots: {exc}", file=sys.stderr)
        return 1
    print(written)
    return 0


if __name__ == "__main__":
    sys.exit(main())
