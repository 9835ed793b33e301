import abc
import json
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Iterator, Optional

import numpy as np

from runtrace import RunNode

from ..conv import ConvShape, FeatureMap, Kernel, check_operands
from ..errors import ConfigurationError, PsumOverflowError
from ..model import DataflowKind

_LOG = logging.getLogger(__name__)

TRACE_FORMATS = ("text", "json")


class InputSource(str, Enum):
    """Where a PE takes its input from in a cycle."""

    EXT = "Ext"
    """Fetched from main memory."""
    R = "R"
    """Taken from the right neighbour's input register (previous cycle)."""
    D = "D"
    """Taken diagonally from the SRB tail or the linked PE of the row below (previous cycle)."""
    IDLE = "Idle"

    def __str__(self):
        return self.value


SOURCE_ORDER: tuple[InputSource, ...] = (InputSource.EXT, InputSource.R, InputSource.D, InputSource.IDLE)
"""Sources by their integer code in schedule tables."""
EXT_CODE, R_CODE, D_CODE, IDLE_CODE = range(len(SOURCE_ORDER))


@dataclass
class SimConfig:
    keep_trace: bool = True
    """Keep per-cycle PE, buffer and output records in the result."""
    psum_bits: Optional[int] = None
    """Signed psum width checked on every accumulation; `None` means unbounded."""
    check_operands: bool = True
    """Compare every delivered operand against the convolution's expected operand."""

    def __post_init__(self):
        if self.psum_bits is not None and self.psum_bits < 2:
            raise ConfigurationError(f"psum_bits must be at least 2, got {self.psum_bits}")

    def check_psum(self, value: int, where: str) -> int:
        if self.psum_bits is not None:
            limit = 1 << (self.psum_bits - 1)
            if not -limit <= value < limit:
                raise PsumOverflowError(
                    f"psum {value} at {where} does not fit into {self.psum_bits} signed bits"
                )
        return value

    def check_psums(self, values: np.ndarray, where: Callable[[tuple[int, ...]], str]):
        """Raise `PsumOverflowError` for the first element of `values` (C order) outside the psum width."""
        if self.psum_bits is None or values.size == 0:
            return
        limit = 1 << (self.psum_bits - 1)
        outside = (values < -limit) | (values >= limit)
        if outside.any():
            index = tuple(int(x) for x in np.argwhere(outside)[0])
            self.check_psum(int(values[index]), where(index))


@dataclass
class SimCounters:
    ext_fetches: int = 0
    """Input reads from main memory (weights excluded)."""
    weight_loads: int = 0
    compute_cycles: int = 0
    preload_cycles: int = 0
    register_count: int = 0
    """Structural register count of the simulated array."""
    scratchpad_reads: int = 0
    refetches: int = 0
    """Reads of ifmap elements that had already been read before."""
    macs: int = 0

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


@dataclass(frozen=True)
class PERecord:
    t: int
    i: int
    j: int
    source: InputSource
    value: Optional[int]
    """Operand consumed in this cycle; `None` when the PE is idle or its data are don't-care."""
    weight: int
    psum_in: int
    psum_out: int


@dataclass(frozen=True)
class BufferRecord:
    t: int
    index: int
    contents: tuple[int, ...]
    """Head first."""


@dataclass(frozen=True)
class OutputRecord:
    t: int
    row: int
    col: int
    value: int


@dataclass
class SimTrace:
    pes: list[PERecord] = field(default_factory=list)
    buffers: list[BufferRecord] = field(default_factory=list)
    outputs: list[OutputRecord] = field(default_factory=list)

    def cycles(self) -> Iterator[tuple[int, list[PERecord], list[BufferRecord], list[OutputRecord]]]:
        """Records grouped by cycle, in cycle order."""
        by_cycle: dict[int, tuple[list, list, list]] = {}
        for slot, records in enumerate((self.pes, self.buffers, self.outputs)):
            for record in records:
                by_cycle.setdefault(record.t, ([], [], []))[slot].append(record)
        for t in sorted(by_cycle):
            pes, buffers, outputs = by_cycle[t]
            yield t, pes, buffers, outputs

    def pe_records(self, i: int, j: int) -> list[PERecord]:
        return [r for r in self.pes if r.i == i and r.j == j]


@dataclass
class SimResult:
    """
    Outcome of one simulation: the ofmap, the hardware counters, the optional cycle trace and
    per-ifmap-element fetch and use counts.
    """

    dataflow: DataflowKind
    shape: ConvShape
    ofmap: FeatureMap
    counters: SimCounters
    fetch_counts: np.ndarray
    """Main-memory reads per ifmap element."""
    use_counts: np.ndarray
    """PE-cycles in which each ifmap element is a MAC operand."""
    trace: Optional[SimTrace] = None

    def __trace_to_node__(self):
        return {"dataflow": self.dataflow.value, "shape": str(self.shape), "counters": self.counters.as_dict()}


def propagate_psums(
    consumed: np.ndarray, active: np.ndarray, weights: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Psums of PE columns over all cycles at once.

    `consumed` and `active` are `(cycles, rows, cols)`, `weights` is `(rows, cols)`. An active
    PE(i, j) adds its product to the psum PE(i - 1, j) produced in the previous cycle; an inactive
    PE outputs 0. Returns `(psum_in, psum_out)`.
    """
    psum_in = np.zeros_like(consumed)
    psum_out = np.zeros_like(consumed)
    for i in range(consumed.shape[1]):
        if i > 0:
            psum_in[1:, i] = psum_out[:-1, i - 1]
        psum_out[:, i] = np.where(active[:, i], psum_in[:, i] + consumed[:, i] * weights[i], 0)
    return psum_in, psum_out


def _render(value: Optional[int]) -> str:
    return "X" if value is None else str(value)


def emit_trace(result: SimResult, fmt: str = "text", values: bool = True) -> str:
    """
    Render a simulation trace.

    `text` prints one line per PE and cycle,
    `t=<n> PE(i,j) src=<Ext|R|D|Idle> in=<v> w=<v> psum_in=<v> psum_out=<v>`, then the SRB
    contents `t=<n> SRB<i>=[...]` and the adder-tree output `t=<n> OUT[r][c]=<v>`. Each cycle is
    preceded by `# cycle <t+1>`. `json` carries the same records. Without a trace (or with
    `values=False`) only the header and the counters are emitted.
    """
    if fmt not in TRACE_FORMATS:
        raise ConfigurationError(f"Unsupported trace format {fmt!r}, expected one of {TRACE_FORMATS}")
    counters = result.counters.as_dict()
    trace = result.trace if values else None
    if fmt == "json":
        return _emit_json(result, counters, trace)

    lines = [
        f"# trace dataflow={result.dataflow.label} shape={result.shape}",
        "# counters " + " ".join(f"{name}={value}" for name, value in counters.items()),
    ]
    if trace is not None:
        for t, pes, buffers, outputs in trace.cycles():
            lines.append(f"# cycle {t + 1}")
            for r in pes:
                lines.append(
                    f"t={t} PE({r.i},{r.j}) src={r.source} in={_render(r.value)} w={r.weight} "
                    f"psum_in={r.psum_in} psum_out={r.psum_out}"
                )
            for b in buffers:
                lines.append(f"t={t} SRB{b.index}=[{','.join(str(v) for v in b.contents)}]")
            for o in outputs:
                lines.append(f"t={t} OUT[{o.row}][{o.col}]={o.value}")
    return "\n".join(lines) + "\n"


def _emit_json(result: SimResult, counters: dict, trace: Optional[SimTrace]) -> str:
    data = {
        "dataflow": result.dataflow.label,
        "shape": {
            "H_I": result.shape.ifmap_height,
            "W_I": result.shape.ifmap_width,
            "K": result.shape.kernel_size,
        },
        "counters": counters,
    }
    if trace is not None:
        data["pes"] = [{**asdict(r), "source": r.source.value} for r in trace.pes]
        data["buffers"] = [{**asdict(b), "contents": list(b.contents)} for b in trace.buffers]
        data["outputs"] = [asdict(o) for o in trace.outputs]
    return json.dumps(data, indent=1) + "\n"


class BaseSimulator(abc.ABC):
    """
    Base class of the array simulators.

    Subclasses implement `_run`; `run` validates the operands and wraps every simulation in a
    `RunNode` of kind `simulation` carrying the counters.
    """

    dataflow: DataflowKind

    def __init__(self, config: Optional[SimConfig] = None):
        self.config = config or SimConfig()

    def check_shape(self, shape: ConvShape):
        """Raise `ShapeError` for shapes the array cannot process; every valid `ConvShape` by default."""

    def run(self, ifmap: FeatureMap, kernel: Kernel, shape: ConvShape) -> SimResult:
        check_operands(ifmap, kernel, shape)
        self.check_shape(shape)
        name = f"{self.dataflow.label} {shape}"
        with RunNode(name, kind="simulation", inputs={"dataflow": self.dataflow, "shape": str(shape)}) as node:
            result = self._run(ifmap, kernel, shape)
            node.add_counters(result.counters.as_dict())
            _LOG.debug(f"{name}: {result.counters}")
            return result

    @abc.abstractmethod
    def _run(self, ifmap: FeatureMap, kernel: Kernel, shape: ConvShape) -> SimResult:
        raise NotImplementedError("Implement _run with the array behaviour")
