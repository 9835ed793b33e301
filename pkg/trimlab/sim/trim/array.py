from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Optional, Sequence

import numpy as np

from ...conv import ConvShape, FeatureMap, Kernel, accumulator_dtype
from ...errors import ArrayStateError, ShapeError, SimulationError
from ...model import DataflowKind, srb_depth
from ..base import (
    D_CODE,
    EXT_CODE,
    IDLE_CODE,
    R_CODE,
    SOURCE_ORDER,
    BaseSimulator,
    BufferRecord,
    OutputRecord,
    PERecord,
    SimConfig,
    SimCounters,
    SimResult,
    SimTrace,
    propagate_psums,
)
from .schedule import DEFAULT_BRANCH_ORDER, TrimSchedule, schedule_for


class ArrayState(Enum):
    EMPTY = "empty"
    LOADED = "loaded"
    COMPUTING = "computing"
    DONE = "done"


@dataclass
class PEState:
    """Registers of one processing element."""

    REGISTERS: ClassVar[int] = 4

    weight: int = 0
    """Stationary weight."""
    input: int = 0
    """Operand of the current cycle."""
    forward: int = 0
    """Registered copy of the input driving the left and diagonal links."""
    psum_out: int = 0


class ShiftRegisterBuffer:
    """
    Fixed-depth shift register. `shift` inserts at the head and drops the tail;
    a depth-0 buffer is a wire and holds nothing.
    """

    def __init__(self, depth: int):
        if depth < 0:
            raise ShapeError(f"SRB depth must be nonnegative, got {depth}")
        self._slots: deque[int] = deque([0] * depth, maxlen=depth)

    @property
    def depth(self) -> int:
        return self._slots.maxlen

    def __len__(self):
        return self.depth

    def __getitem__(self, position: int) -> int:
        """Slot `position`, counted from the head."""
        return self._slots[position]

    @property
    def tail(self) -> int:
        return self._slots[-1]

    def shift(self, value: int):
        if self.depth:
            self._slots.appendleft(value)

    def contents(self) -> tuple[int, ...]:
        return tuple(self._slots)


class TrimArray:
    """
    A `K x K` TrIM array wired for one convolution shape.

    Inputs enter vertically (`Ext`), move right to left (`R`) and diagonally upwards (`D`) through
    the SRB of the row below or directly from that row's PEs. Psums flow top to bottom into a
    registered adder tree. Every cycle first reads the previous register values, then commits.
    """

    def __init__(
        self,
        shape: ConvShape,
        config: Optional[SimConfig] = None,
        schedule: Optional[TrimSchedule] = None,
    ):
        shape.require_streamable()
        if schedule is not None and schedule.shape != shape:
            raise ShapeError(f"Schedule is for {schedule.shape}, array is for {shape}")
        self.shape = shape
        self.config = config or SimConfig()
        self.schedule = schedule or schedule_for(shape)
        self.k = shape.kernel_size
        self.pes = [[PEState() for _ in range(self.k)] for _ in range(self.k)]
        self.srbs = [ShiftRegisterBuffer(srb_depth(shape)) for _ in range(self.k - 1)]
        self.output_register = 0
        self.state = ArrayState.EMPTY
        self.preload_cycles = 0

    @property
    def register_count(self) -> int:
        return PEState.REGISTERS * self.k**2 + sum(srb.depth for srb in self.srbs) + 1

    def pe(self, i: int, j: int) -> PEState:
        return self.pes[i][j]

    def weights(self) -> list[list[int]]:
        return [[pe.weight for pe in row] for row in self.pes]

    def preload_weights(self, kernel: Kernel) -> int:
        """
        Shift the kernel in from the top, bottom kernel row first, one row per cycle.
        Returns the number of cycles (`K`).
        """
        if self.state is ArrayState.COMPUTING:
            raise ArrayStateError("Cannot load weights while the array is computing")
        if kernel.side != self.k:
            raise ShapeError(f"Kernel side is {kernel.side}, the array is {self.k}x{self.k}")
        rows = kernel.values.tolist()
        for cycle in range(self.k):
            for i in range(self.k - 1, 0, -1):
                for j in range(self.k):
                    self.pes[i][j].weight = self.pes[i - 1][j].weight
            for j, weight in enumerate(rows[self.k - 1 - cycle]):
                self.pes[0][j].weight = weight
        self.preload_cycles = self.k
        self.state = ArrayState.LOADED
        return self.k

    def _register_layout(self) -> tuple[int, int]:
        # register file: K^2 PE inputs, then the SRB slots row by row, then one external port per PE
        k2 = self.k**2
        return k2, k2 + sum(srb.depth for srb in self.srbs)

    def _gather_tables(self, sources: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """
        Register-file indices feeding every PE input at every cycle, and the fixed indices feeding
        the SRB slots (each slot takes its predecessor, the head takes PE(i + 1, 0)).
        """
        k, (k2, ports) = self.k, self._register_layout()
        depth = srb_depth(self.shape)
        pe = np.arange(k2)
        i, j = pe // k, pe % k
        right = i * k + np.minimum(j + 1, k - 1)
        # diagonal chain of row i: SRB_i tail .. head, then PE(i + 1, 0), PE(i + 1, 1), ...
        from_srb = k2 + np.minimum(i, max(k - 2, 0)) * depth + (depth - 1 - j)
        from_below = np.minimum(i + 1, k - 1) * k + (j - depth)
        diagonal = np.where(j < depth, from_srb, from_below)
        by_code = np.stack([ports + pe, right, diagonal, pe])
        pe_index = by_code[sources, pe]

        srb_index = []
        for row in range(k - 1):
            for slot in range(depth):
                srb_index.append((row + 1) * k if slot == 0 else k2 + row * depth + slot - 1)
        return pe_index, np.array(srb_index, dtype=np.int64)

    def _check_wiring(self, sources: np.ndarray, operands: np.ndarray):
        k = self.k
        pe = np.arange(k * k)
        problems = (
            ((sources == EXT_CODE) & (operands < 0), "fetches without an operand"),
            ((sources == R_CODE) & (pe % k == k - 1), "has no right neighbour"),
            ((sources == D_CODE) & (pe // k == k - 1), "has no diagonal link"),
        )
        for mask, message in problems:
            if mask.any():
                t, p = (int(x) for x in np.argwhere(mask)[0])
                raise SimulationError(f"PE({p // k},{p % k}) {message} at t={t}")

    def run(self, ifmap: FeatureMap) -> SimResult:
        """
        Stream `ifmap` through the loaded array.

        Every cycle moves all registers at once: each PE input takes the register its scheduled
        source points to (external port, right neighbour, SRB tail or diagonal PE, or itself when
        idle) and every SRB shifts by one. Operands, counters and psums are then derived from the
        delivered values of all cycles.
        """
        if self.state is not ArrayState.LOADED:
            raise ArrayStateError(f"Array must be loaded to run, it is {self.state.value}")
        shape, k, config = self.shape, self.k, self.config
        if ifmap.shape != (shape.ifmap_height, shape.ifmap_width):
            raise ShapeError(f"Ifmap is {ifmap.rows}x{ifmap.cols}, the array expects {shape}")
        self.state = ArrayState.COMPUTING
        stationary = self.weights()

        k2, ports = self._register_layout()
        sources = self.schedule.source_table.reshape(-1, k2)
        operands = self.schedule.operand_table.reshape(-1, k2)
        self._check_wiring(sources, operands)
        pe_index, srb_index = self._gather_tables(sources)

        grid = ifmap.values.reshape(-1)
        external = grid[np.maximum(operands, 0)]
        registers = np.zeros(ports + k2, dtype=grid.dtype)
        delivered = np.empty(sources.shape, dtype=grid.dtype)
        srb_history = [] if config.keep_trace and ports > k2 else None

        for t in range(len(sources)):
            registers[ports:] = external[t]
            pes = registers[pe_index[t]]
            srbs = registers[srb_index]
            registers[:k2] = pes
            registers[k2:ports] = srbs
            delivered[t] = pes
            if srb_history is not None:
                srb_history.append(srbs.tolist())

        active = (operands >= 0) & (sources != IDLE_CODE)
        if config.check_operands:
            wrong = active & (delivered != external)
            if wrong.any():
                t, p = (int(x) for x in np.argwhere(wrong)[0])
                row, col = divmod(int(operands[t, p]), shape.ifmap_width)
                raise SimulationError(
                    f"PE({p // k},{p % k}) received {delivered[t, p]} via {SOURCE_ORDER[sources[t, p]]} "
                    f"at t={t}, expected ifmap[{row}, {col}] = {external[t, p]}"
                )

        fetched = sources == EXT_CODE
        counters = SimCounters(
            ext_fetches=int(fetched.sum()),
            weight_loads=k2,
            compute_cycles=shape.n_outputs + k,
            preload_cycles=self.preload_cycles,
            register_count=self.register_count,
            macs=int(active.sum()),
        )
        fetch_counts = np.bincount(operands[fetched], minlength=shape.n_inputs).reshape(ifmap.shape)
        use_counts = np.bincount(operands[active], minlength=shape.n_inputs).reshape(ifmap.shape)
        counters.refetches = int(np.maximum(fetch_counts - 1, 0).sum())

        cycles = len(sources)
        max_weight = max(abs(w) for row in stationary for w in row)
        dtype = accumulator_dtype(ifmap.max_abs(), max_weight, k2)
        consumed = np.where(active, delivered, 0).astype(dtype).reshape(cycles, k, k)
        psum_in, psum_out = propagate_psums(
            consumed, active.reshape(cycles, k, k), np.array(stationary, dtype=dtype)
        )
        config.check_psums(psum_out, lambda index: f"PE({index[1]},{index[2]}), t={index[0]}")
        # the adder tree sums the bottom row one cycle after it computed
        outputs = psum_out[k - 1 : k - 1 + shape.n_outputs, k - 1, :].sum(axis=1)
        config.check_psums(outputs, lambda index: f"adder tree, t={index[0] + k}")

        trace = None
        if config.keep_trace:
            trace = self._trace(sources, delivered, active, psum_in, psum_out, outputs, srb_history)
        self._commit(registers, outputs)

        if self.weights() != stationary:
            raise SimulationError("A weight register changed while computing")
        self.state = ArrayState.DONE
        return SimResult(
            dataflow=DataflowKind.TRIM,
            shape=shape,
            ofmap=FeatureMap(outputs.reshape(shape.ofmap_height, shape.ofmap_width)),
            counters=counters,
            fetch_counts=fetch_counts,
            use_counts=use_counts,
            trace=trace,
        )

    def _commit(self, registers: np.ndarray, outputs: np.ndarray):
        # final register state; psums are flushed once the last output has been served
        k, (k2, _) = self.k, self._register_layout()
        values = registers.tolist()
        for p, value in enumerate(values[:k2]):
            pe = self.pes[p // k][p % k]
            pe.input = pe.forward = value
            pe.psum_out = 0
        offset = k2
        for srb in self.srbs:
            for value in reversed(values[offset : offset + srb.depth]):
                srb.shift(value)
            offset += srb.depth
        self.output_register = int(outputs[-1])

    def _trace(self, sources, delivered, active, psum_in, psum_out, outputs, srb_history) -> SimTrace:
        k, w_o = self.k, self.shape.ofmap_width
        weights = [w for row in self.weights() for w in row]
        trace = SimTrace()
        cycles = len(sources)
        rows = zip(
            sources.tolist(),
            delivered.tolist(),
            active.tolist(),
            psum_in.reshape(cycles, -1).tolist(),
            psum_out.reshape(cycles, -1).tolist(),
        )
        for t, (codes, values, used, p_in, p_out) in enumerate(rows):
            for p in range(k * k):
                consumed = values[p] if used[p] else None
                trace.pes.append(
                    PERecord(
                        t,
                        p // k,
                        p % k,
                        SOURCE_ORDER[codes[p]],
                        consumed,
                        weights[p],
                        0 if consumed is None else p_in[p],
                        p_out[p],
                    )
                )
            if srb_history is not None:
                offset = 0
                for index, srb in enumerate(self.srbs):
                    contents = tuple(srb_history[t][offset : offset + srb.depth])
                    trace.buffers.append(BufferRecord(t, index, contents))
                    offset += srb.depth
        for n, value in enumerate(outputs.tolist()):
            trace.outputs.append(OutputRecord(n + k, n // w_o, n % w_o, value))
        return trace


def preload_weights(array: TrimArray, kernel: Kernel) -> int:
    return array.preload_weights(kernel)


class TrimSimulator(BaseSimulator):
    """Cycle-accurate TrIM simulation: weight preload, then `K + H_O * W_O` compute cycles."""

    dataflow = DataflowKind.TRIM

    def __init__(
        self, config: Optional[SimConfig] = None, branch_order: Sequence[str] = DEFAULT_BRANCH_ORDER
    ):
        super().__init__(config)
        self.branch_order = tuple(branch_order)

    def check_shape(self, shape: ConvShape):
        shape.require_streamable()

    def _run(self, ifmap: FeatureMap, kernel: Kernel, shape: ConvShape) -> SimResult:
        if self.branch_order == DEFAULT_BRANCH_ORDER:
            schedule = schedule_for(shape)
        else:
            schedule = TrimSchedule(shape, self.branch_order)
        array = TrimArray(shape, self.config, schedule)
        preload_weights(array, kernel)
        return array.run(ifmap)


def trim_simulate(
    ifmap: FeatureMap, kernel: Kernel, shape: ConvShape, config: Optional[SimConfig] = None
) -> SimResult:
    return TrimSimulator(config).run(ifmap, kernel, shape)
