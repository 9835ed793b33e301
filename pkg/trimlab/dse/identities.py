"""Closed-form values of the simulator counters, and the checks comparing the two."""

from typing import Optional

import numpy as np

from ..conv import ConvShape, FeatureMap, Kernel, golden_conv
from ..errors import IdentityViolation
from ..model import DataflowKind
from ..model import equations as eq
from ..sim import SimConfig, SimResult, simulate


def expected_counters(kind: DataflowKind, shape: ConvShape) -> dict[str, int]:
    """Counter values the closed forms predict for a simulation of `shape`."""
    kind = DataflowKind.parse(kind)
    if kind is DataflowKind.WS:
        return {
            "ext_fetches": eq.ma_ws(shape),
            "compute_cycles": eq.latency_ws(shape),
            "register_count": eq.reg_ws(shape),
        }
    if kind is DataflowKind.RS:
        return {
            "ext_fetches": eq.ma_rs_main(shape),
            "compute_cycles": eq.latency_rs(shape),
            "register_count": eq.reg_rs(shape),
        }
    return {
        "ext_fetches": eq.ma_trim(shape),
        "compute_cycles": eq.latency_trim(shape),
        "register_count": eq.reg_trim(shape),
        "weight_loads": eq.weight_loads(shape),
        "refetches": eq.ov_trim(shape),
    }


def _point(result: SimResult) -> tuple:
    shape = result.shape
    size = shape.ifmap_width if shape.ifmap_height == shape.ifmap_width else str(shape)
    return result.dataflow.label, shape.kernel_size, size


def check_counters(result: SimResult):
    """Raise `IdentityViolation` on the first counter that differs from its closed form."""
    counters = result.counters.as_dict()
    for name, expected in expected_counters(result.dataflow, result.shape).items():
        if counters[name] != expected:
            raise IdentityViolation(_point(result), name, expected, counters[name])


def check_ofmap(result: SimResult, ifmap: FeatureMap, kernel: Kernel):
    golden = golden_conv(ifmap, kernel, result.shape)
    if result.ofmap != golden:
        mismatches = int(np.count_nonzero(result.ofmap.values != golden.values))
        raise IdentityViolation(
            _point(result), "ofmap", "golden convolution", f"{mismatches} differing element(s)"
        )


def random_operands(
    rng: np.random.Generator, shape: ConvShape, low: int = -128, high: int = 127
) -> tuple[FeatureMap, Kernel]:
    ifmap = FeatureMap.random(rng, shape.ifmap_height, shape.ifmap_width, low, high)
    kernel = Kernel.random(rng, shape.kernel_size, low, high)
    return ifmap, kernel


def simulate_and_check(
    kind: DataflowKind,
    shape: ConvShape,
    rng: np.random.Generator,
    config: Optional[SimConfig] = None,
) -> SimResult:
    """Simulate random operands and enforce counter identities and oracle equivalence."""
    ifmap, kernel = random_operands(rng, shape)
    result = simulate(kind, ifmap, kernel, shape, config or SimConfig(keep_trace=False))
    check_counters(result)
    check_ofmap(result, ifmap, kernel)
    return result
