"""
Closed-form cost model of the WS, RS and TrIM dataflows for one single-channel convolution.

All functions are pure. Counts are `int`; everything that may be non-integral (RS accesses,
throughput, normalized energy) is an exact `Fraction`.
"""

from fractions import Fraction
from typing import Optional

from ..conv import ConvShape
from ..errors import DomainError
from .alpha import AlphaModel
from .kinds import DataflowKind

DEFAULT_ALPHA = AlphaModel()


def _alpha_size(shape: ConvShape) -> int:
    # The alpha table is keyed by the ifmap side; non-square shapes use the width
    return shape.ifmap_width


# Memory accesses


def ma_ws(shape: ConvShape) -> int:
    """Input reads of the Conv-to-GeMM stream: `K^2 * H_O * W_O`."""
    return shape.kernel_size**2 * shape.n_outputs


def ma_rs_main(shape: ConvShape) -> int:
    """Main-memory reads of RS: every ifmap element exactly once."""
    return shape.n_inputs


def ma_rs(shape: ConvShape, alpha: Optional[AlphaModel] = None) -> Fraction:
    """`(1 + alpha) * H_I * W_I`: main-memory reads plus alpha-weighted scratch-pad traffic."""
    alpha = DEFAULT_ALPHA if alpha is None else alpha
    return (1 + alpha(_alpha_size(shape))) * shape.n_inputs


def ov_trim(shape: ConvShape) -> int:
    """Inputs TrIM reads more than once because they leave the array before their last use."""
    k, h_i, w_i = shape.kernel_size, shape.ifmap_height, shape.ifmap_width
    if w_i <= k:
        raise DomainError(f"OV is defined for W_I >= K + 1, got W_I={w_i}, K={k}")
    if w_i < 2 * k:
        overhead = (w_i - k - 1) * (k - 1) * (h_i - k)
    else:
        overhead = (k - 1) ** 2 * (h_i - k)
    return max(overhead, 0)


def ma_trim(shape: ConvShape) -> int:
    """Input reads of TrIM: `H_I * W_I + OV`. The `K^2` weight loads are not included."""
    return shape.n_inputs + ov_trim(shape)


def weight_loads(shape: ConvShape) -> int:
    return shape.kernel_size**2


def memory_accesses(
    kind: DataflowKind, shape: ConvShape, alpha: Optional[AlphaModel] = None
) -> int | Fraction:
    kind = DataflowKind.parse(kind)
    if kind is DataflowKind.WS:
        return ma_ws(shape)
    if kind is DataflowKind.RS:
        return ma_rs(shape, alpha)
    return ma_trim(shape)


# Operations, latency, throughput


def ops_total(shape: ConvShape) -> int:
    """One multiplication and one addition per MAC: `2 * K^2 * H_O * W_O`."""
    return 2 * shape.kernel_size**2 * shape.n_outputs


def latency_ws(shape: ConvShape) -> int:
    return shape.kernel_size**2 + shape.n_outputs - 1


def latency_rs(shape: ConvShape) -> int:
    return shape.ofmap_width * (2 * shape.kernel_size - 1)


def latency_trim(shape: ConvShape) -> int:
    """Compute cycles of TrIM, `K + H_O * W_O`; the `K` preload cycles are counted separately."""
    return shape.kernel_size + shape.n_outputs


def latency(kind: DataflowKind, shape: ConvShape) -> int:
    kind = DataflowKind.parse(kind)
    if kind is DataflowKind.WS:
        return latency_ws(shape)
    if kind is DataflowKind.RS:
        return latency_rs(shape)
    return latency_trim(shape)


def pe_count(kind: DataflowKind, shape: ConvShape) -> int:
    """`K^2` PEs for WS (one column, N = 1) and TrIM, `K * H_O` for RS."""
    if DataflowKind.parse(kind) is DataflowKind.RS:
        return shape.kernel_size * shape.ofmap_height
    return shape.kernel_size**2


def throughput(kind: DataflowKind, shape: ConvShape) -> Fraction:
    """Operations per cycle, `OPs / L`."""
    return Fraction(ops_total(shape), latency(kind, shape))


def tpe(kind: DataflowKind, shape: ConvShape) -> Fraction:
    """
    Throughput per PE. For RS this is `2K / (2K - 1)` independent of the ifmap, for TrIM it is
    `2 * H_O * W_O / (K + H_O * W_O)`, tending to the peak of 2.
    """
    return throughput(kind, shape) / pe_count(kind, shape)


# Registers


def ws_fifo_registers(shape: ConvShape) -> int:
    """Registers of the `K^2 - 1` skew FIFOs with depths `1 .. K^2 - 1`."""
    k2 = shape.kernel_size**2
    return k2 * (k2 - 1) // 2


def reg_ws(shape: ConvShape) -> int:
    return 3 * shape.kernel_size**2 + ws_fifo_registers(shape)


def reg_rs(shape: ConvShape) -> int:
    """Per PE: `K` input and `K` weight scratch-pad entries plus a psum register."""
    k = shape.kernel_size
    return (2 * k + 1) * k * shape.ofmap_height


def srb_depth(shape: ConvShape) -> int:
    return shape.ifmap_width - shape.kernel_size - 1


def reg_trim(shape: ConvShape) -> int:
    """Four registers per PE, `K - 1` SRBs of depth `W_I - K - 1`, one adder-tree output register."""
    k = shape.kernel_size
    return 4 * k * k + (k - 1) * max(srb_depth(shape), 0) + 1


def registers(kind: DataflowKind, shape: ConvShape) -> int:
    kind = DataflowKind.parse(kind)
    if kind is DataflowKind.WS:
        return reg_ws(shape)
    if kind is DataflowKind.RS:
        return reg_rs(shape)
    return reg_trim(shape)


def inversion_threshold(kernel_size: int) -> Fraction:
    """Real-valued ifmap size at which the TrIM and WS register counts are equal."""
    k = kernel_size
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise DomainError(f"The inversion point is defined for K >= 2, got K={kernel_size!r}")
    return Fraction(k**4 - k**2 - 4, 2 * (k - 1))


def inversion_point(kernel_size: int) -> int:
    """
    Smallest ifmap size from which TrIM needs at least as many registers as WS.

    Below it TrIM needs strictly fewer; the counts are equal at it only when the threshold is
    integral (K = 3: 63 registers at I = 17).
    """
    threshold = inversion_threshold(kernel_size)
    return -(-threshold.numerator // threshold.denominator)


# Energy


def normalized_energy(
    kind: DataflowKind, shape: ConvShape, alpha: Optional[AlphaModel] = None
) -> Fraction:
    """Energy in units of one full read of the ifmap from main memory."""
    kind = DataflowKind.parse(kind)
    if kind is DataflowKind.RS:
        alpha = DEFAULT_ALPHA if alpha is None else alpha
        return 1 + alpha(_alpha_size(shape))
    return Fraction(memory_accesses(kind, shape), shape.n_inputs)
