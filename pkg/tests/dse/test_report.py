import csv
import io
import json
from decimal import Decimal
from fractions import Fraction

import pytest

from trimlab.dse import REPORT_COLUMNS, ReportRow, emit_comparison, emit_report, emit_table, format_number, json_number
from trimlab.errors import ConfigurationError
from trimlab.model import DataflowKind, compare, metric_set


@pytest.mark.parametrize(
    "value,text",
    [
        (3, "3"),
        (Fraction(6, 2), "3"),
        (Fraction(1, 4), "0.25"),
        (Fraction(77, 64), "1.203125"),
        (Fraction(17792, 5), "3558.4"),
        (Decimal("13.9"), "13.9"),
        (0.1, "0.1"),
        (Fraction(1, 3), "0.333333"),
        (Fraction(-1, 3), "-0.333333"),
        (Fraction(392, 199), "1.96985"),
        (Fraction(3528, 199), "17.7286"),
        (Fraction(1, 3000), "0.000333333"),
        (Fraction(10**9, 3), "333333333"),
        (Fraction(1, 2**60), "0.000000000000000000867362"),
    ],
)
def test_format_number(value, text):
    assert format_number(value) == text


def test_format_number_rejects_bool():
    with pytest.raises(TypeError):
        format_number(True)


def test_json_number():
    assert json_number(3) == 3 and isinstance(json_number(3), int)
    assert json_number(Fraction(1, 3)) == 0.333333
    assert json_number(Fraction(10, 5)) == 2


def _rows():
    return [ReportRow.from_metrics(metric_set(kind, 3, 16)) for kind in DataflowKind]


def test_csv_report():
    text = emit_report(_rows(), "csv")
    assert text.splitlines() == [
        ",".join(REPORT_COLUMNS),
        "WS,3,16,14,14,1764,0,204,17.2941,1.92157,63,6.890625",
        "RS,3,16,14,14,3558.4,0,70,50.4,1.2,294,13.9",
        "TrIM,3,16,14,14,308,52,199,17.7286,1.96985,61,1.203125",
    ]


def test_json_matches_csv():
    rows = _rows()
    data = json.loads(emit_report(rows, "json"))
    table = list(csv.DictReader(io.StringIO(emit_report(rows, "csv"))))
    assert len(data) == len(table) == 3
    for record, cells in zip(data, table):
        assert list(record) == list(REPORT_COLUMNS)
        for name in REPORT_COLUMNS:
            value = record[name]
            assert (value if isinstance(value, str) else format_number(value)) == cells[name]


def test_comparison_table():
    text = emit_comparison([compare(3, 16)])
    header, row = text.splitlines()
    assert header.startswith("K,I,ma_ws_over_trim,")
    assert row.startswith("3,16,5.72727,")


def test_unknown_format():
    with pytest.raises(ConfigurationError):
        emit_table([], REPORT_COLUMNS, "xml")
