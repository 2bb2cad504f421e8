"""qwplot command line: render one figure per invocation.

Exit codes: 0 success, 2 usage error, 1 bad input or render failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .io import SchemaError
from .render import PlotJob, PlotOptions, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwplot",
        description="Render quantum-walk data files to images",
    )
    sub = parser.add_subparsers(dest="kind", required=True)

    def common(p):
        p.add_argument("--in", dest="inputs", nargs="+", required=True,
                       help="input data file(s) from qwalk")
        p.add_argument("--out", required=True, help="output image path")
        p.add_argument("--cmap", default="viridis", help="matplotlib colormap")
        p.add_argument("--dpi", type=int, default=150)

    p_carpet = sub.add_parser("carpet", help="space-time probability carpet")
    common(p_carpet)
    p_carpet.add_argument("--linear-color", action="store_true",
                          help="linear color scale instead of logarithmic")

    p_series = sub.add_parser("timeseries", help="IPR/SP time series")
    common(p_series)
    p_series.add_argument("--loglog", action="store_true")
    p_series.add_argument("--guide", action="store_true",
                          help="draw a 1/t reference line")
    p_series.add_argument("--series", default="ipr,sp",
                          help="comma-separated walk columns to plot")

    p_heat = sub.add_parser("heatmap", help="theta-chi diagram heatmap")
    common(p_heat)
    p_heat.add_argument("--contours", action="store_true",
                        help="overlay regime boundaries")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    options = PlotOptions(
        log_color=not getattr(args, "linear_color", False),
        loglog=getattr(args, "loglog", False),
        guide=getattr(args, "guide", False),
        contours=getattr(args, "contours", False),
        cmap=args.cmap,
        dpi=args.dpi,
        series=tuple(s for s in getattr(args, "series", "ipr,sp").split(",") if s),
    )
    job = PlotJob(
        kind=args.kind,
        input_paths=tuple(args.inputs),
        output_path=args.out,
        options=options,
    )
    try:
        fig = render(job)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"qwplot: error: {exc}", file=sys.stderr)
        return 1
    import matplotlib.pyplot as plt

    plt.close(fig)
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
