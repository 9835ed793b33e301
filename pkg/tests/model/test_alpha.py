from decimal import Decimal
from fractions import Fraction

import pytest

from trimlab.errors import ConfigurationError
from trimlab.model import DEFAULT_ANCHORS, AlphaModel


def test_anchor_values():
    alpha = AlphaModel()
    assert alpha(16) == Fraction("12.9")
    assert alpha(64) == Fraction("14.7")
    assert alpha(256) == Fraction("16.5")


def test_log_interpolation_and_clamping():
    alpha = AlphaModel()
    assert alpha(32) == Fraction("13.8")
    assert alpha(128) == Fraction("15.6")
    assert alpha(4) == Fraction("12.9")
    assert alpha(1024) == Fraction("16.5")
    assert Fraction("14.7") < alpha(100) < Fraction("16.5")
    assert alpha(100) == alpha.alpha(100)


def test_anchors_only():
    alpha = AlphaModel(interpolate=False)
    assert alpha(64) == Fraction("14.7")
    with pytest.raises(ConfigurationError, match="interpolation is disabled"):
        alpha(32)


def test_anchor_validation():
    with pytest.raises(ConfigurationError):
        AlphaModel(anchors={16: Decimal("20")})
    with pytest.raises(ConfigurationError):
        AlphaModel(anchors={})
    with pytest.raises(ConfigurationError):
        AlphaModel(anchors={0: Decimal("13")})
    custom = AlphaModel(anchors={256: Decimal("16.5"), 16: Decimal("12.9")})
    assert list(custom.anchors) == [16, 256]
    assert DEFAULT_ANCHORS[16] == Decimal("12.9")


def test_constant():
    assert AlphaModel.constant(0)(16) == 0
    assert AlphaModel.constant("2.5")(999) == Fraction(5, 2)
    assert AlphaModel.constant(3).describe() == "constant 3"
    for bad in ("-1", "abc", "nan"):
        with pytest.raises(ConfigurationError):
            AlphaModel.constant(bad)


def test_immutable():
    alpha = AlphaModel()
    with pytest.raises(TypeError):
        alpha.interpolate = False
    assert "log2-interpolated" in alpha.describe()
