"""
Weight-stationary baseline: the Conv-to-GeMM input matrix streamed through one column of
`K^2` PEs.

Lane `k` carries column `k` of the input matrix through a FIFO of depth `k`, so row `r` reaches
PE `k` at cycle `r + k`. Psums move down the column and leave the last PE at `r + K^2 - 1`.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..conv import ConvShape, FeatureMap, Kernel, accumulator_dtype, conv_to_gemm
from ..errors import SimulationError
from ..model import DataflowKind, ws_fifo_registers
from .base import (
    BaseSimulator,
    InputSource,
    OutputRecord,
    PERecord,
    SimConfig,
    SimCounters,
    SimResult,
    SimTrace,
    propagate_psums,
)


@dataclass(frozen=True)
class WsArrayConfig:
    """A single PE column (one filter) with skew FIFOs of depths `0 .. K^2 - 1` on the input lanes."""

    kernel_size: int

    @property
    def rows(self) -> int:
        return self.kernel_size**2

    @property
    def fifo_depths(self) -> tuple[int, ...]:
        return tuple(range(self.rows))

    @property
    def fifo_registers(self) -> int:
        return sum(self.fifo_depths)

    @property
    def register_count(self) -> int:
        """Weight, input and psum register per PE plus the FIFOs."""
        return 3 * self.rows + self.fifo_registers


class WsSimulator(BaseSimulator):
    dataflow = DataflowKind.WS

    @staticmethod
    def _fifo_tables(array: WsArrayConfig) -> tuple[np.ndarray, np.ndarray, int]:
        # register file: the FIFO slots lane by lane (slot 0 newest), then one entry register per lane
        starts = np.cumsum((0,) + array.fifo_depths[:-1])
        slots = int(sum(array.fifo_depths))
        arrive, shift = [], []
        for lane, depth in enumerate(array.fifo_depths):
            entry = slots + lane
            arrive.append(entry if depth == 0 else starts[lane] + depth - 1)
            shift.extend(entry if s == 0 else starts[lane] + s - 1 for s in range(depth))
        return np.array(arrive, dtype=np.int64), np.array(shift, dtype=np.int64), slots

    def _run(self, ifmap: FeatureMap, kernel: Kernel, shape: ConvShape) -> SimResult:
        config = self.config
        array = WsArrayConfig(shape.kernel_size)
        if array.fifo_registers != ws_fifo_registers(shape):
            raise SimulationError("FIFO layout does not match the WS register model")
        operands = conv_to_gemm(ifmap, kernel, shape)
        rows, n_outputs, k = array.rows, shape.n_outputs, shape.kernel_size
        w_o, w_i = shape.ofmap_width, shape.ifmap_width
        cycles = n_outputs + rows - 1

        arrive_index, shift_index, slots = self._fifo_tables(array)
        values = np.zeros(slots + rows, dtype=operands.inputs.dtype)
        valid = np.zeros(slots + rows, dtype=bool)
        arriving = np.empty((cycles, rows), dtype=values.dtype)
        arrived = np.empty((cycles, rows), dtype=bool)
        for t in range(cycles):
            # lanes take input-matrix row t while there is one
            streaming = t < n_outputs
            if streaming:
                values[slots:] = operands.inputs[t]
            valid[slots:] = streaming
            arriving[t] = values[arrive_index]
            arrived[t] = valid[arrive_index]
            values[:slots] = values[shift_index]
            valid[:slots] = valid[shift_index]

        # input-matrix row r reaches PE p at cycle r + p
        t = np.arange(cycles)[:, None]
        pe = np.arange(rows)[None, :]
        r = t - pe
        active = (r >= 0) & (r < n_outputs)
        starved = active & ~arrived
        if starved.any():
            t0, p = (int(x) for x in np.argwhere(starved)[0])
            raise SimulationError(f"PE {p} starved at t={t0}")
        position = np.where(active, (r // w_o + pe // k) * w_i + r % w_o + pe % k, 0)
        grid = ifmap.values.reshape(-1)
        if config.check_operands:
            wrong = active & (arriving != grid[position])
            if wrong.any():
                t0, p = (int(x) for x in np.argwhere(wrong)[0])
                q, c = divmod(int(position[t0, p]), w_i)
                raise SimulationError(
                    f"PE {p} received {arriving[t0, p]} at t={t0}, expected ifmap[{q}, {c}] = {grid[q * w_i + c]}"
                )

        # every lane reads its column of the input matrix from main memory
        lowered = np.arange(n_outputs)[:, None]
        lane = np.arange(rows)[None, :]
        read = (lowered // w_o + lane // k) * w_i + lowered % w_o + lane % k
        fetch_counts = np.bincount(read.reshape(-1), minlength=shape.n_inputs).reshape(ifmap.shape)
        use_counts = np.bincount(position[active], minlength=shape.n_inputs).reshape(ifmap.shape)
        counters = SimCounters(
            ext_fetches=int(read.size),
            weight_loads=rows,
            compute_cycles=cycles,
            preload_cycles=rows,
            register_count=array.register_count,
            refetches=int(np.maximum(fetch_counts - 1, 0).sum()),
            macs=int(active.sum()),
        )

        weights = operands.weights
        dtype = accumulator_dtype(ifmap.max_abs(), kernel.max_abs(), rows)
        consumed = np.where(active, arriving, 0).astype(dtype)[:, :, None]
        psum_in, psum_out = propagate_psums(
            consumed, active[:, :, None], weights.astype(dtype)[:, None]
        )
        config.check_psums(psum_out, lambda index: f"PE {index[1]}, t={index[0]}")
        outputs = psum_out[rows - 1 :, rows - 1, 0]

        trace = None
        if config.keep_trace:
            trace = SimTrace()
            table = zip(
                active.tolist(), arriving.tolist(), psum_in[:, :, 0].tolist(), psum_out[:, :, 0].tolist()
            )
            weight_list = weights.tolist()
            for t0, (used, value, p_in, p_out) in enumerate(table):
                for p in range(rows):
                    if used[p]:
                        record = PERecord(t0, p, 0, InputSource.EXT, value[p], weight_list[p], p_in[p], p_out[p])
                    else:
                        record = PERecord(t0, p, 0, InputSource.IDLE, None, weight_list[p], 0, 0)
                    trace.pes.append(record)
            for n, value in enumerate(outputs.tolist()):
                trace.outputs.append(OutputRecord(n + rows - 1, n // w_o, n % w_o, value))

        return SimResult(
            dataflow=self.dataflow,
            shape=shape,
            ofmap=FeatureMap(outputs.reshape(shape.ofmap_height, w_o)),
            counters=counters,
            fetch_counts=fetch_counts,
            use_counts=use_counts,
            trace=trace,
        )


def ws_simulate(
    ifmap: FeatureMap, kernel: Kernel, shape: ConvShape, config: Optional[SimConfig] = None
) -> SimResult:
    return WsSimulator(config).run(ifmap, kernel, shape)
