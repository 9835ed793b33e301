from .identities import (
    check_counters,
    check_ofmap,
    expected_counters,
    random_operands,
    simulate_and_check,
)
from .report import (
    COMPARISON_COLUMNS,
    emit_comparison,
    emit_report,
    emit_table,
    format_number,
    json_number,
)
from .spec import OUTPUT_FORMATS, REPORT_COLUMNS, ReportRow, SweepSpec
from .sweep import comparison_rows, evaluate_point, sweep
from .verify import CheckResult, VerifyReport, verify

__all__ = [
    "COMPARISON_COLUMNS",
    "CheckResult",
    "OUTPUT_FORMATS",
    "REPORT_COLUMNS",
    "ReportRow",
    "SweepSpec",
    "VerifyReport",
    "check_counters",
    "check_ofmap",
    "comparison_rows",
    "emit_comparison",
    "emit_report",
    "emit_table",
    "evaluate_point",
    "expected_counters",
    "format_number",
    "json_number",
    "random_operands",
    "simulate_and_check",
    "sweep",
    "verify",
]
