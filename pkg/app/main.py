"""
Command-line entry point for the catoni robust estimation toolkit.

Every subcommand writes CSV to standard output (or --output). Errors are
reported on standard error as "error: <message>" with exit status
2 (invalid flags or input), 3 (infeasible parameters), 4 (degenerate data)
or 5 (numerical failure).
"""

import argparse
import logging
import sys
from typing import List, Optional

from app.config import Settings, get_settings
from app.commands import bounds, estimate_mean, estimate_variance, moments, simulate
from src.core.errors import EstimationError

logger = logging.getLogger(__name__)

COMMANDS = (moments, estimate_mean, estimate_variance, bounds, simulate)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catoni",
        description=(
            "Robust mean and variance M-estimators for heavy-tailed samples, "
            "their deviation bounds, and seeded Monte Carlo experiments. "
            "All output is CSV."
        ),
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for command in COMMANDS:
        command.add_parser(subparsers)
    return parser


def configure_logging(settings: Settings) -> None:
    """Send log records to standard error so CSV on standard output stays clean."""
    level = getattr(logging, settings.log_level.upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    configure_logging(settings)
    logger.info(f"catoni {args.command}: threads={settings.threads}, digits={settings.float_digits}")

    try:
        args.handler(args, settings)
    except EstimationError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
