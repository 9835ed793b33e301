import numpy as np
import pytest

from trimlab.conv import ConvShape, FeatureMap, GemmOperands, Kernel, conv_to_gemm, gemm_reference, golden_conv
from trimlab.errors import ShapeError


def test_golden_conv_ramp(shape5, ramp_ifmap):
    out = golden_conv(ramp_ifmap, Kernel.ones(3), shape5)
    assert out.to_lists() == [[63, 72, 81], [108, 117, 126], [153, 162, 171]]


def test_golden_conv_single_tap():
    shape = ConvShape(4, 6, 3)
    ifmap = FeatureMap.arange(4, 6)
    kernel = Kernel([[0, 0, 0], [0, 0, 0], [0, 0, 1]])
    # picks the bottom-right element of every window
    assert golden_conv(ifmap, kernel, shape).values.tolist() == ifmap.values[2:, 2:].tolist()


def test_conv_to_gemm_layout(shape5, ramp_ifmap, ramp_kernel):
    operands = conv_to_gemm(ramp_ifmap, ramp_kernel, shape5)
    assert operands.inputs.shape == (9, 9)
    assert operands.inputs[0].tolist() == [1, 2, 3, 6, 7, 8, 11, 12, 13]
    assert operands.inputs[4].tolist() == [7, 8, 9, 12, 13, 14, 17, 18, 19]
    assert operands.weights.tolist() == list(range(1, 10))
    assert operands.element_count == 81
    # element 13 lies in every window of the 5x5/K=3 example
    assert int(np.count_nonzero(operands.inputs == 13)) == 9


@pytest.mark.parametrize("shape", [ConvShape(6, 9, 3), ConvShape(8, 8, 5), ConvShape(3, 3, 3)])
def test_gemm_matches_golden(rng, shape):
    ifmap = FeatureMap.random(rng, shape.ifmap_height, shape.ifmap_width)
    kernel = Kernel.random(rng, shape.kernel_size)
    assert gemm_reference(conv_to_gemm(ifmap, kernel, shape)) == golden_conv(ifmap, kernel, shape)


def test_gemm_operands_validation(shape5):
    with pytest.raises(ShapeError):
        GemmOperands(inputs=np.zeros((8, 9)), weights=np.zeros(9), shape=shape5)
    with pytest.raises(ShapeError):
        GemmOperands(inputs=np.zeros((9, 9)), weights=np.zeros(8), shape=shape5)


def test_sums_beyond_int64_are_exact(shape5):
    ifmap = FeatureMap(np.full((5, 5), 2**40, dtype=np.int64))
    kernel = Kernel(np.full((3, 3), 2**30, dtype=np.int64))
    assert not ifmap.is_exact and not kernel.is_exact
    out = golden_conv(ifmap, kernel, shape5)
    assert out.is_exact
    assert out.to_lists() == [[10625324586456701730816] * 3] * 3
    assert out[1, 1] == 9 * 2**70
    assert gemm_reference(conv_to_gemm(ifmap, kernel, shape5)) == out


def test_exact_inputs_keep_their_sign():
    shape = ConvShape(2, 3, 2)
    ifmap = FeatureMap([[-(2**70), 0, 1], [2, 3, 2**70]])
    out = golden_conv(ifmap, Kernel([[1, 0], [0, 1]]), shape)
    assert out.to_lists() == [[-(2**70) + 3, 2**70]]
    assert gemm_reference(conv_to_gemm(ifmap, Kernel([[1, 0], [0, 1]]), shape)) == out


@pytest.mark.parametrize("shape", [ConvShape(6, 9, 3), ConvShape(8, 8, 5), ConvShape(4, 7, 2)])
def test_golden_conv_is_linear(rng, shape):
    h_i, w_i, k = shape.ifmap_height, shape.ifmap_width, shape.kernel_size
    a, b = FeatureMap.random(rng, h_i, w_i), FeatureMap.random(rng, h_i, w_i)
    u, v = Kernel.random(rng, k), Kernel.random(rng, k)
    assert golden_conv(a + b, u, shape) == golden_conv(a, u, shape) + golden_conv(b, u, shape)
    assert golden_conv(a, u + v, shape) == golden_conv(a, u, shape) + golden_conv(a, v, shape)
    scaled = golden_conv(FeatureMap(a.values * -3), u, shape)
    assert scaled == FeatureMap(golden_conv(a, u, shape).values * -3)
    assert golden_conv(FeatureMap.zeros(h_i, w_i), u, shape) == FeatureMap.zeros(shape.ofmap_height, shape.ofmap_width)
