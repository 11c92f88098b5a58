"""
CSV output helpers.
"""

import csv
import math
from typing import IO, Iterable, Optional, Sequence

DEFAULT_DIGITS = 17


def format_float(value: Optional[float], digits: int = DEFAULT_DIGITS) -> str:
    """Shortest text that re-parses to the same double at 17 digits; inf/-inf/nan literal; None empty."""
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}g}"


def write_csv(
    stream: IO[str],
    header: Sequence[str],
    rows: Iterable[Sequence[object]],
    digits: int = DEFAULT_DIGITS
) -> None:
    """Write header and rows with '\\n' line endings; floats via format_float."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([
            format_float(cell, digits) if isinstance(cell, float) or cell is None else cell
            for cell in row
        ])
