from .reference import GemmOperands, conv_to_gemm, gemm_reference, golden_conv
from .shapes import ConvShape, FeatureMap, Kernel, accumulator_dtype, check_operands

__all__ = [
    "ConvShape",
    "FeatureMap",
    "Kernel",
    "GemmOperands",
    "accumulator_dtype",
    "check_operands",
    "conv_to_gemm",
    "gemm_reference",
    "golden_conv",
]
