"""figkit <kind> --artifact <dir> --out <file>

Regenerates one of the four figure kinds from a run artifact directory.
"""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figkit",
        description="regenerate publication figures from run artifacts",
    )
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument("--artifact", required=True,
                        help="run artifact directory")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--times", type=float, nargs="*", default=None,
                        help="snapshot times (snapshots kind only)")
    args = parser.parse_args(argv)
    try:
        path = render(args.kind, args.artifact, args.out, times=args.times)
    except (FigureError, OSError, ValueError) as exc:
        print(f"figkit error: {exc}", file=sys.stderr)
        return 1
    print(f"figure -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
