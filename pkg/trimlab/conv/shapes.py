from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import ShapeError

STRIDE = 1
"""Only unit stride is modelled."""


@dataclass(frozen=True)
class ConvShape:
    """
    Geometry of a single-channel, single-filter convolution with unit stride and no padding.

    `H_O = H_I - K + 1` and `W_O = W_I - K + 1`. Shapes with `W_I = K` are valid here
    (they have a single output column), but the TrIM array needs `W_I >= K + 1`,
    see `require_streamable`.
    """

    ifmap_height: int
    ifmap_width: int
    kernel_size: int

    def __post_init__(self):
        for name in ("ifmap_height", "ifmap_width", "kernel_size"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ShapeError(f"{name} must be an integer, got {value!r}")
        if self.kernel_size < 1:
            raise ShapeError(f"Kernel size must be at least 1, got K={self.kernel_size}")
        if self.ifmap_height < self.kernel_size or self.ifmap_width < self.kernel_size:
            raise ShapeError(
                f"Ifmap {self.ifmap_height}x{self.ifmap_width} is smaller than the "
                f"{self.kernel_size}x{self.kernel_size} kernel"
            )

    @classmethod
    def square(cls, size: int, kernel_size: int) -> "ConvShape":
        return cls(size, size, kernel_size)

    @property
    def stride(self) -> int:
        return STRIDE

    @property
    def ofmap_height(self) -> int:
        return self.ifmap_height - self.kernel_size + 1

    @property
    def ofmap_width(self) -> int:
        return self.ifmap_width - self.kernel_size + 1

    @property
    def n_inputs(self) -> int:
        return self.ifmap_height * self.ifmap_width

    @property
    def n_outputs(self) -> int:
        return self.ofmap_height * self.ofmap_width

    def require_streamable(self) -> "ConvShape":
        """Raise `ShapeError` unless the shape can be streamed through a TrIM array (`W_I >= K + 1`)."""
        if self.ifmap_width < self.kernel_size + 1:
            raise ShapeError(
                f"The TrIM array needs W_I >= K + 1, got W_I={self.ifmap_width}, K={self.kernel_size}"
            )
        return self

    def __str__(self):
        return f"{self.ifmap_height}x{self.ifmap_width}/K={self.kernel_size}"


INT64_MIN = int(np.iinfo(np.int64).min)
INT64_MAX = int(np.iinfo(np.int64).max)


def _exact_integers(array: np.ndarray, owner: str) -> np.ndarray:
    # int64 when every value fits, otherwise an object array of Python ints
    if array.dtype.kind == "u" and int(array.max()) > INT64_MAX:
        array = array.astype(object)
    if array.dtype.kind in "iub":
        return array.astype(np.int64)
    if array.dtype.kind != "O":
        raise ShapeError(f"{owner} holds integers, got dtype {array.dtype}")
    values = []
    for value in array.flat:
        if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)):
            raise ShapeError(f"{owner} holds integers, got {value!r}")
        values.append(int(value))
    if all(INT64_MIN <= value <= INT64_MAX for value in values):
        return np.array(values, dtype=np.int64).reshape(array.shape)
    return np.array(values, dtype=object).reshape(array.shape)


def accumulator_dtype(max_operand: int, max_weight: int, terms: int) -> type:
    """
    `np.int64` when a sum of `terms` products bounded by `max_operand * max_weight` cannot leave
    the int64 range, `object` (exact Python ints) otherwise.
    """
    if max_operand > INT64_MAX or max_weight > INT64_MAX:
        return object
    return np.int64 if max_operand * max_weight * terms <= INT64_MAX else object


class _IntGrid:
    """
    Immutable 2-D grid of signed integers. Backed by a read-only `int64` array, or by an object
    array of Python ints when some value does not fit into 64 bits.
    """

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray | Sequence[Sequence[int]]):
        owner = type(self).__name__
        try:
            array = np.array(values)
        except (OverflowError, ValueError) as e:
            raise ShapeError(f"{owner} needs a rectangular grid of integers: {e}")
        if array.ndim != 2:
            raise ShapeError(f"{owner} must be 2-D, got {array.ndim} dimension(s)")
        if array.size == 0:
            raise ShapeError(f"{owner} must not be empty")
        array = _exact_integers(array, owner)
        array.setflags(write=False)
        self.values = array

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def is_exact(self) -> bool:
        """True when the grid holds values outside the int64 range."""
        return self.values.dtype == object

    def max_abs(self) -> int:
        return max(abs(int(self.values.max())), abs(int(self.values.min())))

    def __getitem__(self, index: tuple[int, int]) -> int:
        row, col = index
        return int(self.values[row, col])

    def to_lists(self) -> list[list[int]]:
        return self.values.tolist()

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.values, other.values))

    def __hash__(self):
        if self.is_exact:
            return hash((self.shape, tuple(self.values.flat)))
        return hash((self.shape, self.values.tobytes()))

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        if self.shape != other.shape:
            raise ShapeError(f"Cannot add grids of shapes {self.shape} and {other.shape}")
        return type(self)(self.values.astype(object) + other.values.astype(object))

    def __repr__(self):
        values = getattr(self, "values", None)
        if values is None:
            return f"{type(self).__name__}(<unset>)"
        return f"{type(self).__name__}({values.shape[0]}x{values.shape[1]})"

    def __trace_to_node__(self):
        return {"shape": list(self.shape), "values": self.to_lists()}


class FeatureMap(_IntGrid):
    """An ifmap or ofmap: `rows x cols` signed integers, indexed `fmap[r, c]` in row-major order."""

    __slots__ = ()

    @classmethod
    def arange(cls, rows: int, cols: int, start: int = 1) -> "FeatureMap":
        """Row-major ramp `start, start + 1, ...`; `arange(5, 5)` is the 1..25 ifmap of the 5x5 example."""
        return cls(np.arange(start, start + rows * cols, dtype=np.int64).reshape(rows, cols))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "FeatureMap":
        return cls(np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def random(
        cls, rng: np.random.Generator, rows: int, cols: int, low: int = -128, high: int = 127
    ) -> "FeatureMap":
        return cls(rng.integers(low, high, size=(rows, cols), endpoint=True))


class Kernel(_IntGrid):
    """A square `K x K` kernel of signed integer weights, `kernel[k_h, k_w]`."""

    __slots__ = ()

    def __init__(self, values: np.ndarray | Sequence[Sequence[int]]):
        super().__init__(values)
        if self.rows != self.cols:
            raise ShapeError(f"Kernels are square, got {self.rows}x{self.cols}")

    @property
    def side(self) -> int:
        return self.rows

    @classmethod
    def ones(cls, side: int) -> "Kernel":
        return cls(np.ones((side, side), dtype=np.int64))

    @classmethod
    def arange(cls, side: int, start: int = 1) -> "Kernel":
        return cls(np.arange(start, start + side * side, dtype=np.int64).reshape(side, side))

    @classmethod
    def zeros(cls, side: int) -> "Kernel":
        return cls(np.zeros((side, side), dtype=np.int64))

    @classmethod
    def random(
        cls, rng: np.random.Generator, side: int, low: int = -128, high: int = 127
    ) -> "Kernel":
        return cls(rng.integers(low, high, size=(side, side), endpoint=True))

    def rows_top_down(self) -> Iterable[tuple[int, ...]]:
        for row in self.values:
            yield tuple(int(w) for w in row)


def check_operands(ifmap: FeatureMap, kernel: Kernel, shape: ConvShape):
    """Raise `ShapeError` unless the ifmap and the kernel match `shape`."""
    if not isinstance(ifmap, FeatureMap):
        raise ShapeError(f"Expected a FeatureMap, got {type(ifmap).__name__}")
    if not isinstance(kernel, Kernel):
        raise ShapeError(f"Expected a Kernel, got {type(kernel).__name__}")
    if ifmap.shape != (shape.ifmap_height, shape.ifmap_width):
        raise ShapeError(
            f"Ifmap is {ifmap.rows}x{ifmap.cols}, shape {shape} expects "
            f"{shape.ifmap_height}x{shape.ifmap_width}"
        )
    if kernel.side != shape.kernel_size:
        raise ShapeError(f"Kernel side is {kernel.side}, shape {shape} expects {shape.kernel_size}")
