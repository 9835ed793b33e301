import pytest

from trimlab.conv import ConvShape, FeatureMap, Kernel, golden_conv
from trimlab.model import equations as eq
from trimlab.sim import InputSource, SimConfig, WsArrayConfig, ws_simulate


def test_array_config():
    array = WsArrayConfig(3)
    assert array.rows == 9
    assert array.fifo_depths == tuple(range(9))
    assert array.fifo_registers == 36
    assert array.register_count == 63


def test_walkthrough(shape5, ramp_ifmap, ramp_kernel):
    result = ws_simulate(ramp_ifmap, ramp_kernel, shape5)
    assert result.ofmap == golden_conv(ramp_ifmap, ramp_kernel, shape5)
    c = result.counters
    assert (c.ext_fetches, c.refetches, c.macs) == (81, 56, 81)
    assert (c.compute_cycles, c.preload_cycles, c.weight_loads) == (17, 9, 9)
    assert c.register_count == 63
    assert result.fetch_counts[2, 2] == 9
    assert result.fetch_counts[0, 0] == 1


def test_skewed_timing(shape5, ramp_ifmap, ramp_kernel):
    trace = ws_simulate(ramp_ifmap, ramp_kernel, shape5).trace
    # input-matrix row r reaches PE k at cycle r + k
    first = {r.i: r.t for r in reversed(trace.pes) if r.source is InputSource.EXT}
    assert first == {k: k for k in range(9)}
    assert [(o.t, o.row, o.col) for o in trace.outputs][:2] == [(8, 0, 0), (9, 0, 1)]
    assert trace.outputs[-1].t == 16


@pytest.mark.parametrize("shape", [ConvShape(6, 4, 3), ConvShape.square(7, 5), ConvShape(3, 5, 1)])
def test_random_operands(rng, shape):
    ifmap = FeatureMap.random(rng, shape.ifmap_height, shape.ifmap_width)
    kernel = Kernel.random(rng, shape.kernel_size)
    result = ws_simulate(ifmap, kernel, shape, SimConfig(keep_trace=False))
    assert result.ofmap == golden_conv(ifmap, kernel, shape)
    assert result.counters.ext_fetches == eq.ma_ws(shape)
    assert result.counters.compute_cycles == eq.latency_ws(shape)
    assert result.counters.register_count == eq.reg_ws(shape)


def test_accepts_single_column_output():
    shape = ConvShape(5, 3, 3)
    result = ws_simulate(FeatureMap.arange(5, 3), Kernel.ones(3), shape)
    assert result.ofmap.shape == (3, 1)
