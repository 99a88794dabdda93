"""Batch plotting CLI.

Exit codes mirror the simulator harness: 0 success, 2 bad request or schema
(unknown column, empty series), 5 missing files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_BAD_REQUEST = 2
EXIT_IO = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhd2b-plot", description="Figures from simulator series and sweep manifests"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norms", help="plot series columns against time")
    p.add_argument("--series", type=Path, required=True)
    p.add_argument("--quantity", action="append", required=True, help="column name (repeatable)")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--log", action="store_true", help="log-scale the norm axis")
    p.add_argument("--dump", type=Path, help="write the plotted arrays as CSV")
    p.set_defaults(func=_cmd_norms)

    p = sub.add_parser("sweep", help="overlay one quantity across a sweep")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--quantity", required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--log", action="store_true")
    p.add_argument("--dump", type=Path)
    p.set_defaults(func=_cmd_sweep)

    return parser


def _cmd_norms(args) -> int:
    from .plots import plot_norms

    plot_norms(args.series, args.quantity, args.out, log_scale=args.log, dump_path=args.dump)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    from .plots import plot_sweep

    plot_sweep(args.manifest, args.quantity, args.out, log_scale=args.log, dump_path=args.dump)
    print(f"wrote {args.out}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    from .frame import SeriesFormatError

    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as err:
        print(f"missing input: {err}", file=sys.stderr)
        return EXIT_IO
    except (SeriesFormatError, ValueError) as err:
        print(f"bad request: {err}", file=sys.stderr)
        return EXIT_BAD_REQUEST
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
