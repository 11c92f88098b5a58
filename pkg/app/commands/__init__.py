"""
Helpers shared by the CLI subcommands: the output destination and the --output flag.
"""

import sys
from contextlib import contextmanager
from typing import IO, Iterator, Optional

from src.core.errors import ParameterError


@contextmanager
def open_output(path: Optional[str]) -> Iterator[IO[str]]:
    """Yield the CSV destination: the file at path, or standard output."""
    if path is None:
        yield sys.stdout
        return
    try:
        stream = open(path, "w", encoding="utf-8", newline="")
    except OSError as e:
        raise ParameterError(f"cannot write output file {path}: {e}") from e
    with stream:
        yield stream


def add_output_flag(parser) -> None:
    parser.add_argument(
        "--output",
        metavar="PATH",
        help="write CSV to PATH instead of standard output"
    )
