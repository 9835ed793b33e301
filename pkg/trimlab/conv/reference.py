"""
Ground-truth convolution and the Conv-to-GeMM (im2col) lowering used by the WS baseline.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeError
from .shapes import ConvShape, FeatureMap, Kernel, accumulator_dtype, check_operands


@dataclass(frozen=True)
class GemmOperands:
    """
    Lowered operands: one row per output (raster order) holding its flattened `K x K` window,
    and the kernel flattened row-major into a `K^2` weight vector.
    """

    inputs: np.ndarray
    weights: np.ndarray
    shape: ConvShape

    def __post_init__(self):
        k2 = self.shape.kernel_size**2
        if self.inputs.shape != (self.shape.n_outputs, k2):
            raise ShapeError(
                f"Input matrix is {self.inputs.shape}, expected ({self.shape.n_outputs}, {k2})"
            )
        if self.weights.shape != (k2,):
            raise ShapeError(f"Weight vector is {self.weights.shape}, expected ({k2},)")

    @property
    def element_count(self) -> int:
        """Number of input-matrix elements, i.e. the redundancy-inclusive ifmap traffic."""
        return int(self.inputs.size)


def golden_conv(ifmap: FeatureMap, kernel: Kernel, shape: ConvShape) -> FeatureMap:
    """
    `O[h, w] = sum_{k_h, k_w} I[h + k_h, w + k_w] * W[k_h, k_w]` for every output position.

    Sums are exact: they switch to Python ints when they could leave the int64 range.
    """
    check_operands(ifmap, kernel, shape)
    h_o, w_o = shape.ofmap_height, shape.ofmap_width
    dtype = accumulator_dtype(ifmap.max_abs(), kernel.max_abs(), shape.kernel_size**2)
    inputs = ifmap.values.astype(dtype)
    weights = kernel.values.astype(dtype)
    out = np.zeros((h_o, w_o), dtype=dtype)
    for k_h in range(shape.kernel_size):
        for k_w in range(shape.kernel_size):
            out += weights[k_h, k_w] * inputs[k_h : k_h + h_o, k_w : k_w + w_o]
    return FeatureMap(out)


def conv_to_gemm(ifmap: FeatureMap, kernel: Kernel, shape: ConvShape) -> GemmOperands:
    check_operands(ifmap, kernel, shape)
    k = shape.kernel_size
    windows = sliding_window_view(ifmap.values, (k, k))
    # Materialize the overlapping windows, redundancy included
    inputs = np.array(windows.reshape(shape.n_outputs, k * k), dtype=ifmap.values.dtype)
    weights = np.array(kernel.values.reshape(k * k), dtype=kernel.values.dtype)
    inputs.setflags(write=False)
    weights.setflags(write=False)
    return GemmOperands(inputs=inputs, weights=weights, shape=shape)


def _max_abs(values: np.ndarray) -> int:
    return max(abs(int(values.max())), abs(int(values.min())))


def gemm_reference(operands: GemmOperands) -> FeatureMap:
    shape = operands.shape
    dtype = accumulator_dtype(_max_abs(operands.inputs), _max_abs(operands.weights), shape.kernel_size**2)
    product = operands.inputs.astype(dtype) @ operands.weights.astype(dtype)
    return FeatureMap(product.reshape(shape.ofmap_height, shape.ofmap_width))

