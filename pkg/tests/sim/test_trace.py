import json

import numpy as np
import pytest

from trimlab.conv import ConvShape
from trimlab.dse import random_operands
from trimlab.errors import ConfigurationError
from trimlab.model import DataflowKind
from trimlab.sim import SimConfig, emit_trace, rs_simulate, simulate, trim_simulate


def test_text_trace(shape5, ramp_ifmap, ramp_kernel):
    text = emit_trace(trim_simulate(ramp_ifmap, ramp_kernel, shape5))
    lines = text.splitlines()
    assert lines[0] == "# trace dataflow=TrIM shape=5x5/K=3"
    assert lines[1].startswith("# counters ext_fetches=29 weight_loads=9 compute_cycles=12")
    assert lines[2] == "# cycle 1"
    assert "t=0 PE(0,0) src=Ext in=1 w=1 psum_in=0 psum_out=1" in lines
    assert "t=0 PE(1,0) src=Idle in=X w=4 psum_in=0 psum_out=0" in lines
    assert "t=3 PE(0,1) src=D in=7 w=2 psum_in=0 psum_out=14" in lines
    assert "t=2 SRB0=[6]" in lines
    assert "t=3 OUT[0][0]=411" in lines
    assert lines.count("# cycle 12") == 1
    assert text.endswith("\n")


def test_counters_only(shape5, ramp_ifmap, ramp_kernel):
    result = trim_simulate(ramp_ifmap, ramp_kernel, shape5)
    assert len(emit_trace(result, values=False).splitlines()) == 2
    untraced = trim_simulate(ramp_ifmap, ramp_kernel, shape5, SimConfig(keep_trace=False))
    assert emit_trace(untraced) == emit_trace(result, values=False)


def test_json_trace(shape5, ramp_ifmap, ramp_kernel):
    data = json.loads(emit_trace(rs_simulate(ramp_ifmap, ramp_kernel, shape5), "json"))
    assert data["dataflow"] == "RS"
    assert data["shape"] == {"H_I": 5, "W_I": 5, "K": 3}
    assert data["counters"]["ext_fetches"] == 25
    assert data["pes"][0] == {
        "t": 0,
        "i": 0,
        "j": 0,
        "source": "Ext",
        "value": 1,
        "weight": 1,
        "psum_in": 0,
        "psum_out": 1,
    }
    assert len(data["outputs"]) == 9
    assert data["buffers"] == []


def test_unknown_format(shape5, ramp_ifmap, ramp_kernel):
    result = simulate("ws", ramp_ifmap, ramp_kernel, shape5, SimConfig(keep_trace=False))
    with pytest.raises(ConfigurationError):
        emit_trace(result, "csv")


@pytest.mark.parametrize("fmt", ["text", "json"])
@pytest.mark.parametrize("kind", list(DataflowKind))
def test_trace_is_reproducible(kind, fmt):
    shape = ConvShape(6, 7, 3)

    def render():
        ifmap, kernel = random_operands(np.random.default_rng(42), shape)
        return emit_trace(simulate(kind, ifmap, kernel, shape), fmt).encode()

    first = render()
    assert first == render()
    assert len(first.splitlines()) > 2
