from .alpha import DEFAULT_ANCHORS, AlphaModel
from .equations import (
    DEFAULT_ALPHA,
    inversion_point,
    inversion_threshold,
    latency,
    latency_rs,
    latency_trim,
    latency_ws,
    ma_rs,
    ma_rs_main,
    ma_trim,
    ma_ws,
    memory_accesses,
    normalized_energy,
    ops_total,
    ov_trim,
    pe_count,
    reg_rs,
    reg_trim,
    reg_ws,
    registers,
    srb_depth,
    throughput,
    tpe,
    weight_loads,
    ws_fifo_registers,
)
from .kinds import DataflowKind
from .metrics import (
    ComparisonRow,
    MetricSet,
    TpeDiscrepancy,
    compare,
    metric_set,
    metric_set_for,
    tpe_discrepancies,
)

__all__ = [
    "AlphaModel",
    "ComparisonRow",
    "DataflowKind",
    "DEFAULT_ALPHA",
    "DEFAULT_ANCHORS",
    "MetricSet",
    "TpeDiscrepancy",
    "compare",
    "inversion_point",
    "inversion_threshold",
    "latency",
    "latency_rs",
    "latency_trim",
    "latency_ws",
    "ma_rs",
    "ma_rs_main",
    "ma_trim",
    "ma_ws",
    "memory_accesses",
    "metric_set",
    "metric_set_for",
    "normalized_energy",
    "ops_total",
    "ov_trim",
    "pe_count",
    "reg_rs",
    "reg_trim",
    "reg_ws",
    "registers",
    "srb_depth",
    "throughput",
    "tpe",
    "tpe_discrepancies",
    "weight_loads",
    "ws_fifo_registers",
]
