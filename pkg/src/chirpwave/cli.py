"""``chirpwave`` command line: run one named experiment and write CSV or JSON.

Exit status is 0 on success, 2 for usage or configuration errors and 3 for
numerical failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import EXPERIMENTS, apply_overrides, spec_from_dict
from .errors import ChirpwaveError, NumericalError
from .experiments import render, run

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chirpwave",
        description="Simulate DFT-s-OFDM with chirping against OFDM, AFDM, OTFS and FMCW.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", metavar="FILE", help="JSON experiment description")
    parser.add_argument("--set", dest="assignments", metavar="KEY=VALUE", action="append", default=[],
                        help="override a config field, trials, seed, sweep.values or an experiment parameter")
    parser.add_argument("--seed", type=int, help="64-bit master seed")
    parser.add_argument("--out", metavar="FILE", help="write here instead of stdout")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--workers", type=int, help="thread pool size (results do not depend on it)")
    parser.add_argument("--no-timing", action="store_true", help="omit wall time so JSON output is byte-stable")
    return parser


def _load(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = _load(args.config) if args.config else {}
        doc = apply_overrides(doc, args.assignments, args.experiment)
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.workers is not None:
            doc["workers"] = args.workers
        doc.pop("experiment", None)
        spec = spec_from_dict(doc, args.experiment)
        text = render(run(spec), args.format, timing=not args.no_timing)
    except (NumericalError, ArithmeticError) as exc:
        print(f"chirpwave: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ChirpwaveError, ValueError, TypeError, OSError) as exc:
        field = getattr(exc, "field", None)
        where = f" [{field}]" if field else ""
        print(f"chirpwave: error{where}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
