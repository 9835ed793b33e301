from .array import (
    ArrayState,
    PEState,
    ShiftRegisterBuffer,
    TrimArray,
    TrimSimulator,
    preload_weights,
    trim_simulate,
)
from .schedule import (
    DEFAULT_BRANCH_ORDER,
    ScheduleDecision,
    TrimSchedule,
    expected_operand,
    last_cycle,
    schedule_for,
    schedule_source,
    served_output,
)

__all__ = [
    "ArrayState",
    "DEFAULT_BRANCH_ORDER",
    "PEState",
    "ScheduleDecision",
    "ShiftRegisterBuffer",
    "TrimArray",
    "TrimSchedule",
    "TrimSimulator",
    "expected_operand",
    "last_cycle",
    "preload_weights",
    "schedule_for",
    "schedule_source",
    "served_output",
    "trim_simulate",
]
