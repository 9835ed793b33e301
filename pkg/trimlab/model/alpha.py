import math
from decimal import Decimal
from fractions import Fraction
from typing import Dict, Optional

import pydantic
from pydantic import BaseModel, validator

from ..errors import ConfigurationError

ALPHA_MIN = Decimal("12.9")
ALPHA_MAX = Decimal("16.5")

DEFAULT_ANCHORS = {16: Decimal("12.9"), 64: Decimal("14.7"), 256: Decimal("16.5")}
"""RS scratch-pad energy factors; `1 + alpha` gives the RS normalized energy (13.9, 15.7, 17.5)."""

INTERPOLATION_DIGITS = 9


class AlphaModel(BaseModel):
    """
    Scratch-pad energy factor `alpha` of the RS dataflow as a function of the ifmap size `I`.

    Between anchors the factor is linear in `log2(I)`; outside the anchor range it is clamped to
    the nearest anchor. With `interpolate=False` only the anchor sizes are defined.
    `override` replaces the table by a constant (`AlphaModel.constant`), which is not range
    checked so that degenerate values such as 0 can be studied.
    """

    anchors: Dict[int, Decimal] = DEFAULT_ANCHORS
    interpolate: bool = True
    override: Optional[Decimal] = None

    class Config:
        allow_mutation = False

    def __init__(self, **data):
        try:
            super().__init__(**data)
        except pydantic.ValidationError as e:
            raise ConfigurationError(f"Invalid alpha model: {e}") from e

    @validator("anchors")
    def _check_anchors(cls, anchors):
        if not anchors:
            raise ValueError("at least one anchor is required")
        for size, value in anchors.items():
            if size <= 0:
                raise ValueError(f"anchor sizes must be positive, got {size}")
            if not ALPHA_MIN <= value <= ALPHA_MAX:
                raise ValueError(f"alpha({size}) = {value} is outside [{ALPHA_MIN}, {ALPHA_MAX}]")
        return dict(sorted(anchors.items()))

    @validator("override")
    def _check_override(cls, value):
        if value is not None and value < 0:
            raise ValueError(f"alpha must be nonnegative, got {value}")
        return value

    @classmethod
    def constant(cls, value: float | str | Decimal) -> "AlphaModel":
        try:
            value = Decimal(str(value))
        except ArithmeticError:
            raise ConfigurationError(f"alpha must be a number, got {value!r}")
        if not value.is_finite():
            raise ConfigurationError(f"alpha must be finite, got {value}")
        return cls(override=value)

    def __call__(self, ifmap_size: int) -> Fraction:
        return self.alpha(ifmap_size)

    def alpha(self, ifmap_size: int) -> Fraction:
        if self.override is not None:
            return Fraction(self.override)
        if ifmap_size in self.anchors:
            return Fraction(self.anchors[ifmap_size])
        if not self.interpolate:
            raise ConfigurationError(
                f"alpha is not defined at I={ifmap_size} and interpolation is disabled "
                f"(anchors: {sorted(self.anchors)})"
            )
        sizes = list(self.anchors)
        if ifmap_size <= sizes[0]:
            return Fraction(self.anchors[sizes[0]])
        if ifmap_size >= sizes[-1]:
            return Fraction(self.anchors[sizes[-1]])
        upper = next(s for s in sizes if s > ifmap_size)
        lower = max(s for s in sizes if s < ifmap_size)
        return self._between(ifmap_size, lower, upper)

    def _between(self, size: int, lower: int, upper: int) -> Fraction:
        a_lo = Fraction(self.anchors[lower])
        a_hi = Fraction(self.anchors[upper])
        if all(_is_power_of_two(n) for n in (size, lower, upper)):
            position = Fraction(_log2(size) - _log2(lower), _log2(upper) - _log2(lower))
            return a_lo + (a_hi - a_lo) * position
        position = (math.log2(size) - math.log2(lower)) / (math.log2(upper) - math.log2(lower))
        value = float(a_lo) + float(a_hi - a_lo) * position
        return Fraction(str(round(value, INTERPOLATION_DIGITS)))

    def describe(self) -> str:
        if self.override is not None:
            return f"constant {self.override}"
        mode = "log2-interpolated" if self.interpolate else "anchors only"
        table = ", ".join(f"{size}: {value}" for size, value in self.anchors.items())
        return f"{{{table}}} ({mode})"


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _log2(n: int) -> int:
    return n.bit_length() - 1
