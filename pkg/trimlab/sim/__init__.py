from typing import Optional

from ..conv import ConvShape, FeatureMap, Kernel
from ..model import DataflowKind
from .base import (
    BaseSimulator,
    BufferRecord,
    InputSource,
    OutputRecord,
    PERecord,
    SimConfig,
    SimCounters,
    SimResult,
    SimTrace,
    emit_trace,
)
from .rs import RsArrayConfig, RsSimulator, rs_simulate
from .trim import TrimSimulator, trim_simulate
from .ws import WsArrayConfig, WsSimulator, ws_simulate

SIMULATORS: dict[DataflowKind, type[BaseSimulator]] = {
    DataflowKind.WS: WsSimulator,
    DataflowKind.RS: RsSimulator,
    DataflowKind.TRIM: TrimSimulator,
}


def simulate(
    kind: DataflowKind,
    ifmap: FeatureMap,
    kernel: Kernel,
    shape: ConvShape,
    config: Optional[SimConfig] = None,
) -> SimResult:
    return SIMULATORS[DataflowKind.parse(kind)](config).run(ifmap, kernel, shape)


__all__ = [
    "BaseSimulator",
    "BufferRecord",
    "InputSource",
    "OutputRecord",
    "PERecord",
    "RsArrayConfig",
    "RsSimulator",
    "SIMULATORS",
    "SimConfig",
    "SimCounters",
    "SimResult",
    "SimTrace",
    "TrimSimulator",
    "WsArrayConfig",
    "WsSimulator",
    "emit_trace",
    "rs_simulate",
    "simulate",
    "trim_simulate",
    "ws_simulate",
]
