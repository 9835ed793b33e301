"""
CSV and JSON emission of report tables.

Numbers are rendered by one rule so that both formats carry identical values:

- integers as integers;
- other rationals exactly when their decimal expansion terminates within 15 significant
  digits, otherwise rounded half-even to 6 significant digits (integer digits are never
  dropped);
- no exponent notation, no trailing zeros.

JSON numbers are parsed from the rendered strings, so re-rendering a JSON value gives back
the CSV cell.
"""

import csv
import io
import json
from dataclasses import fields
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Sequence

from ..errors import ConfigurationError
from ..model import ComparisonRow, DataflowKind
from .spec import OUTPUT_FORMATS, REPORT_COLUMNS, ReportRow

EXACT_DIGITS = 15
ROUNDED_DIGITS = 6

COMPARISON_COLUMNS = tuple(f.name for f in fields(ComparisonRow))


def _terminating_places(denominator: int) -> int | None:
    """Decimal places of `1 / denominator`, or `None` if the expansion does not terminate."""
    twos = fives = 0
    while denominator % 2 == 0:
        denominator //= 2
        twos += 1
    while denominator % 5 == 0:
        denominator //= 5
        fives += 1
    return max(twos, fives) if denominator == 1 else None


def _fixed(scaled: int, places: int) -> str:
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    if places == 0:
        return sign + digits
    whole, frac = digits[:-places], digits[-places:].rstrip("0")
    return sign + whole + ("." + frac if frac else "")


def format_number(value: Any) -> str:
    if isinstance(value, bool):
        raise TypeError("Booleans are not report numbers")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        value = Fraction(repr(value))
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)

    places = _terminating_places(value.denominator)
    if places is not None:
        scaled = value * 10**places
        if len(str(abs(scaled.numerator)).lstrip("0")) <= EXACT_DIGITS:
            return _fixed(scaled.numerator, places)

    magnitude = abs(value)
    if magnitude >= 1:
        places = max(ROUNDED_DIGITS - len(str(int(magnitude))), 0)
    else:
        shift = 0
        while magnitude * 10**shift < 1:
            shift += 1
        places = shift + ROUNDED_DIGITS - 1
    return _fixed(round(value * 10**places), places)


def json_number(value: Any) -> int | float:
    text = format_number(value)
    return float(text) if "." in text else int(text)


def _cell(value: Any) -> str:
    if isinstance(value, DataflowKind):
        return value.label
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, str):
        return value
    return format_number(value)


def _json_cell(value: Any):
    if isinstance(value, (str, Enum)):
        return _cell(value)
    return json_number(value)


def emit_table(records: Iterable[dict], columns: Sequence[str], fmt: str) -> str:
    """Render `records` (mappings from column name to value) as CSV or as a JSON array."""
    if fmt not in OUTPUT_FORMATS:
        raise ConfigurationError(f"Unsupported format {fmt!r}, expected one of {OUTPUT_FORMATS}")
    records = list(records)
    if fmt == "json":
        data = [{name: _json_cell(record[name]) for name in columns} for record in records]
        return json.dumps(data, indent=2) + "\n"
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow([_cell(record[name]) for name in columns])
    return out.getvalue()


def emit_report(rows: Sequence[ReportRow], fmt: str = "csv") -> str:
    return emit_table((row.cells() for row in rows), REPORT_COLUMNS, fmt)


def emit_comparison(rows: Sequence[ComparisonRow], fmt: str = "csv") -> str:
    records = ({name: getattr(row, name) for name in COMPARISON_COLUMNS} for row in rows)
    return emit_table(records, COMPARISON_COLUMNS, fmt)
