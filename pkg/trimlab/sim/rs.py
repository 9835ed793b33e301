"""
Row-stationary baseline at schedule level.

PE(i, h) of the `K x H_O` grid keeps kernel row `i` and convolves ifmap row `h + i` in 1-D.
Every output column takes `K` MAC cycles followed by `K - 1` cycles moving psums down the
columns; ifmap rows are broadcast diagonally (to every PE with `h + i = q`) from main memory.

Nothing here moves data between registers. The source labels in the trace follow the schedule:
`EXT` for the element a window takes in (every element of the first window), `R` for the
elements it keeps from the previous window, `IDLE` during psum accumulation.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..conv import ConvShape, FeatureMap, Kernel, accumulator_dtype
from ..model import DataflowKind
from .base import (
    BaseSimulator,
    InputSource,
    OutputRecord,
    PERecord,
    SimConfig,
    SimCounters,
    SimResult,
    SimTrace,
)


@dataclass(frozen=True)
class RsArrayConfig:
    kernel_size: int
    columns: int
    """One PE column per ofmap row."""

    @property
    def rows(self) -> int:
        return self.kernel_size

    @property
    def pe_count(self) -> int:
        return self.rows * self.columns

    @property
    def register_count(self) -> int:
        """`K` input and `K` weight scratch-pad entries plus one psum register per PE."""
        return (2 * self.kernel_size + 1) * self.pe_count


class RsSimulator(BaseSimulator):
    dataflow = DataflowKind.RS

    def _run(self, ifmap: FeatureMap, kernel: Kernel, shape: ConvShape) -> SimResult:
        config = self.config
        k, h_o, w_o = shape.kernel_size, shape.ofmap_height, shape.ofmap_width
        array = RsArrayConfig(k, h_o)
        dtype = accumulator_dtype(ifmap.max_abs(), kernel.max_abs(), k * k)
        grid = ifmap.values.astype(dtype)
        weights = kernel.values.astype(dtype)
        ofmap = np.zeros((h_o, w_o), dtype=dtype)
        fetch_counts = np.zeros(ifmap.shape, dtype=np.int64)
        use_counts = np.zeros(ifmap.shape, dtype=np.int64)
        counters = SimCounters(
            weight_loads=k * k,
            preload_cycles=k,
            register_count=array.register_count,
        )
        trace = SimTrace() if config.keep_trace else None
        period = 2 * k - 1
        # PE(i, h) works on ifmap row h + i
        ifmap_rows = np.arange(k)[:, None] + np.arange(h_o)[None, :]
        row_uses = np.bincount(ifmap_rows.reshape(-1), minlength=shape.ifmap_height)

        for col in range(w_o):
            base = col * period
            psums = np.zeros((k, h_o), dtype=dtype)
            for kk in range(k):
                t = base + kk
                c = col + kk
                values = grid[ifmap_rows, c]
                psum_in = psums
                psums = psum_in + values * weights[:, kk][:, None]
                config.check_psums(psums, lambda index: f"PE({index[0]},{index[1]}), t={t}")
                # first broadcast of an element from main memory
                fresh = fetch_counts[:, c] == 0
                counters.ext_fetches += int(fresh.sum())
                fetch_counts[fresh, c] = 1
                use_counts[:, c] += row_uses
                counters.macs += k * h_o
                counters.scratchpad_reads += 2 * k * h_o
                if trace is not None:
                    # a PE receives a new element in its first window, then one per column
                    source = InputSource.EXT if col == 0 or kk == k - 1 else InputSource.R
                    table = zip(values.tolist(), weights[:, kk].tolist(), psum_in.tolist(), psums.tolist())
                    for i, (row, weight, row_in, row_out) in enumerate(table):
                        for h in range(h_o):
                            trace.pes.append(PERecord(t, i, h, source, row[h], weight, row_in[h], row_out[h]))
            for a in range(k - 1):
                t = base + k + a
                psum_in = psums[a].copy()
                psums[a + 1] = psums[a + 1] + psum_in
                config.check_psums(psums[a + 1], lambda index: f"PE({a + 1},{index[0]}), t={t}")
                if trace is not None:
                    weight = int(weights[a + 1, k - 1])
                    for h, (p_in, p_out) in enumerate(zip(psum_in.tolist(), psums[a + 1].tolist())):
                        trace.pes.append(PERecord(t, a + 1, h, InputSource.IDLE, None, weight, p_in, p_out))
            ofmap[:, col] = psums[k - 1]
            if trace is not None:
                t_out = base + period - 1
                for h, value in enumerate(psums[k - 1].tolist()):
                    trace.outputs.append(OutputRecord(t_out, h, col, value))

        counters.compute_cycles = w_o * period
        return SimResult(
            dataflow=self.dataflow,
            shape=shape,
            ofmap=FeatureMap(ofmap),
            counters=counters,
            fetch_counts=fetch_counts,
            use_counts=use_counts,
            trace=trace,
        )


def rs_simulate(
    ifmap: FeatureMap, kernel: Kernel, shape: ConvShape, config: Optional[SimConfig] = None
) -> SimResult:
    return RsSimulator(config).run(ifmap, kernel, shape)
