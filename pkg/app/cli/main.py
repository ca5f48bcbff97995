# app/cli/main.py
"""
hydromono command line.

    hydromono spectrum --n 12 --a 144/5
    hydromono critical --n 12 --a 4 --format json --out critical.json
    hydromono monodromy --n 12 --a 144/5
    hydromono reduced --n 12 --m 0 --a 4,36,288
    hydromono actions --n 6 --a 9
    hydromono figures --which 1,5 --out figures/

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from pydantic import ValidationError

from app.cli.commands import COMMAND_REGISTRY, RunConfig
from app.core.errors import NumericalError, PreconditionError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

COMMAND_HELP = {
    "spectrum": "joint spectrum (m, g) at fixed n",
    "critical": "critical curves and the isolated critical value",
    "monodromy": "cell transport around a loop, integer monodromy matrix",
    "reduced": "section of the reduced phase space with G-level lines",
    "actions": "exact against EBK values of g",
    "figures": "preset SVG figures",
}


def _rational(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _rational_list(text: str) -> tuple[float, ...]:
    return tuple(_rational(part) for part in text.split(","))


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'l,g', got {text!r}")
    return _rational(parts[0]), _rational(parts[1])


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, help="principal quantum number")
    parser.add_argument("--a", type=_rational_list, help="focal half-distance, e.g. 144/5 (reduced: 4,36,288)")
    parser.add_argument("--m", type=int, help="l_z quantum number (reduced)")
    parser.add_argument("--center", type=_pair, help="loop center 'l,g' (monodromy; default 0,2a)")
    parser.add_argument("--loop-width", type=int, help="loop half-width in columns (monodromy)")
    parser.add_argument("--orientation", choices=["ccw", "cw"], help="loop orientation (monodromy)")
    parser.add_argument("--out", type=Path, help="output file, or directory for figures; stdout when omitted")
    parser.add_argument("--format", choices=["csv", "json", "svg"], help="output format")
    parser.add_argument("--which", type=_int_list, help="figure numbers, e.g. 1,3,5 (figures)")
    parser.add_argument("--input", type=Path, help="JSON spectrum to re-ingest (monodromy)")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hydromono", description="Hydrogen in prolate spheroidal separation: spectra, critical values, monodromy.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMAND_REGISTRY:
        _add_common(sub.add_parser(name, help=COMMAND_HELP.get(name, "")))
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    options = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "verbose")}
    try:
        config = RunConfig(command=args.command, **options)
        paths = COMMAND_REGISTRY[args.command](config)
    except (PreconditionError, ValidationError) as exc:
        logger.error(f"{args.command}: {exc}")
        print(f"hydromono {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        logger.error(f"{args.command}: numerical failure: {exc}")
        print(f"hydromono {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"hydromono {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    for path in paths:
        logger.info(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
