import numpy as np
import pytest

from trimlab.conv import ConvShape, FeatureMap, Kernel, check_operands
from trimlab.errors import ShapeError


def test_conv_shape_geometry():
    shape = ConvShape(7, 5, 3)
    assert (shape.ofmap_height, shape.ofmap_width) == (5, 3)
    assert shape.n_inputs == 35
    assert shape.n_outputs == 15
    assert shape.stride == 1
    assert str(shape) == "7x5/K=3"
    assert ConvShape.square(5, 3) == ConvShape(5, 5, 3)


@pytest.mark.parametrize(
    "args",
    [(2, 5, 3), (5, 2, 3), (5, 5, 0), (5.0, 5, 3), (True, 5, 1)],
)
def test_conv_shape_rejects_invalid(args):
    with pytest.raises(ShapeError):
        ConvShape(*args)


def test_shape_error_is_value_error():
    with pytest.raises(ValueError):
        ConvShape(1, 1, 2)


def test_require_streamable():
    assert ConvShape(3, 4, 3).require_streamable() == ConvShape(3, 4, 3)
    # valid convolution with one output column, but not streamable
    shape = ConvShape(5, 3, 3)
    assert shape.ofmap_width == 1
    with pytest.raises(ShapeError, match="W_I >= K \\+ 1"):
        shape.require_streamable()


def test_feature_map_grids():
    fmap = FeatureMap.arange(5, 5)
    assert fmap.shape == (5, 5)
    assert fmap[0, 0] == 1
    assert fmap[2, 2] == 13
    assert isinstance(fmap[4, 4], int)
    assert fmap.to_lists()[1] == [6, 7, 8, 9, 10]
    assert FeatureMap.zeros(2, 3) + FeatureMap([[1, 2, 3], [4, 5, 6]]) == FeatureMap(
        [[1, 2, 3], [4, 5, 6]]
    )
    assert hash(FeatureMap.arange(2, 2)) == hash(FeatureMap([[1, 2], [3, 4]]))
    with pytest.raises(ValueError):
        fmap.values[0, 0] = 7


def test_feature_map_random_is_seeded():
    a = FeatureMap.random(np.random.default_rng(5), 4, 6)
    b = FeatureMap.random(np.random.default_rng(5), 4, 6)
    assert a == b
    assert a.values.min() >= -128 and a.values.max() <= 127


@pytest.mark.parametrize("values", [[1, 2, 3], [[1.5, 2.0]], np.zeros((0, 3), dtype=int)])
def test_grid_rejects_bad_values(values):
    with pytest.raises(ShapeError):
        FeatureMap(values)


def test_kernel():
    kernel = Kernel.arange(3)
    assert kernel.side == 3
    assert list(kernel.rows_top_down()) == [(1, 2, 3), (4, 5, 6), (7, 8, 9)]
    assert Kernel.ones(2) == Kernel([[1, 1], [1, 1]])
    with pytest.raises(ShapeError, match="square"):
        Kernel([[1, 2, 3], [4, 5, 6]])


def test_check_operands(shape5):
    check_operands(FeatureMap.arange(5, 5), Kernel.ones(3), shape5)
    with pytest.raises(ShapeError):
        check_operands(FeatureMap.arange(5, 6), Kernel.ones(3), shape5)
    with pytest.raises(ShapeError):
        check_operands(FeatureMap.arange(5, 5), Kernel.ones(2), shape5)
    with pytest.raises(ShapeError):
        check_operands([[1]], Kernel.ones(3), shape5)


def test_grids_keep_values_beyond_int64():
    big = np.array([[2**63, 1], [2**64 - 1, 0]], dtype=np.uint64)
    fmap = FeatureMap(big)
    assert fmap.is_exact
    assert fmap.to_lists() == [[2**63, 1], [2**64 - 1, 0]]
    assert fmap.max_abs() == 2**64 - 1
    small = FeatureMap(np.array([[1, 2]], dtype=np.uint64))
    assert not small.is_exact and small.values.dtype == np.int64
    assert FeatureMap([[-(2**80), 3]])[0, 0] == -(2**80)
    assert hash(FeatureMap([[2**80]])) == hash(FeatureMap([[2**80]]))
    # a sum back inside the int64 range drops the object array
    total = FeatureMap([[2**70, 1]]) + FeatureMap([[-(2**70), 1]])
    assert not total.is_exact and total.to_lists() == [[0, 2]]


def test_grid_rejects_bool_and_float_objects():
    with pytest.raises(ShapeError):
        FeatureMap(np.array([[1, True]], dtype=object))
    with pytest.raises(ShapeError):
        FeatureMap(np.array([[2**70, 0.5]], dtype=object))


def test_repr():
    assert repr(FeatureMap.arange(2, 3)) == "FeatureMap(2x3)"
    assert repr(Kernel.ones(3)) == "Kernel(3x3)"
    # not initialized yet, e.g. while a failing constructor is reported
    assert repr(FeatureMap.__new__(FeatureMap)) == "FeatureMap(<unset>)"
