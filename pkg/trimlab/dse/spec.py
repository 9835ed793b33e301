from dataclasses import dataclass
from fractions import Fraction
from typing import List

import pydantic
from pydantic import BaseModel, validator

from ..errors import ConfigurationError
from ..model import AlphaModel, DataflowKind, MetricSet

OUTPUT_FORMATS = ("csv", "json")


class SweepSpec(BaseModel):
    """
    A design-space sweep: every `(dataflow, K, I)` point of the grid, with optional simulation
    of the points up to `sim_limit`.
    """

    kernel_sizes: List[int] = [3, 5, 7]
    ifmap_sizes: List[int] = [16, 32, 64, 128, 256]
    dataflows: List[DataflowKind] = list(DataflowKind)
    alpha: AlphaModel = AlphaModel()
    output_format: str = "csv"
    simulate: bool = True
    sim_limit: int = 256
    """Largest ifmap size that is simulated; larger points are model-only."""
    seed: int = 0
    jobs: int = 1

    class Config:
        allow_mutation = False

    def __init__(self, **data):
        try:
            super().__init__(**data)
        except pydantic.ValidationError as e:
            raise ConfigurationError(f"Invalid sweep specification: {e}") from e

    @validator("dataflows", pre=True, each_item=True)
    def _parse_dataflow(cls, value):
        return DataflowKind.parse(value)

    @validator("kernel_sizes", "ifmap_sizes", "dataflows")
    def _non_empty_unique(cls, values, field):
        if not values:
            raise ValueError(f"{field.name} must not be empty")
        if len(set(values)) != len(values):
            raise ValueError(f"{field.name} contains duplicates")
        return values

    @validator("kernel_sizes", each_item=True)
    def _positive_kernel(cls, k):
        if k < 1:
            raise ValueError(f"kernel sizes must be at least 1, got {k}")
        return k

    @validator("ifmap_sizes")
    def _streamable(cls, sizes, values):
        for k in values.get("kernel_sizes", ()):
            for i in sizes:
                if i < k + 1:
                    raise ValueError(f"ifmap size {i} is below K + 1 for K={k}")
        return sizes

    @validator("output_format")
    def _known_format(cls, fmt):
        if fmt not in OUTPUT_FORMATS:
            raise ValueError(f"unsupported format {fmt!r}, expected one of {OUTPUT_FORMATS}")
        return fmt

    @validator("sim_limit", "jobs")
    def _at_least_one(cls, value, field):
        if value < 1:
            raise ValueError(f"{field.name} must be at least 1, got {value}")
        return value

    def points(self) -> list[tuple[int, int]]:
        return [(k, i) for k in sorted(self.kernel_sizes) for i in sorted(self.ifmap_sizes)]

    def simulates(self, ifmap_size: int) -> bool:
        return self.simulate and ifmap_size <= self.sim_limit

    def describe(self) -> dict:
        return {
            "kernel_sizes": list(self.kernel_sizes),
            "ifmap_sizes": list(self.ifmap_sizes),
            "dataflows": [kind.label for kind in self.dataflows],
            "alpha": self.alpha.describe(),
            "simulate": self.simulate,
            "sim_limit": self.sim_limit,
            "seed": self.seed,
            "jobs": self.jobs,
        }


REPORT_COLUMNS = (
    "dataflow",
    "K",
    "I",
    "H_O",
    "W_O",
    "MA",
    "OV",
    "latency",
    "throughput",
    "TPE",
    "registers",
    "norm_energy",
)


@dataclass(frozen=True)
class ReportRow:
    dataflow: DataflowKind
    K: int
    I: int  # noqa: E741
    H_O: int
    W_O: int
    MA: int | Fraction
    OV: int
    latency: int
    throughput: Fraction
    TPE: Fraction
    registers: int
    norm_energy: Fraction

    @classmethod
    def from_metrics(cls, metrics: MetricSet) -> "ReportRow":
        return cls(
            dataflow=metrics.dataflow,
            K=metrics.K,
            I=metrics.I,
            H_O=metrics.H_O,
            W_O=metrics.W_O,
            MA=metrics.MA,
            OV=metrics.OV,
            latency=metrics.latency,
            throughput=metrics.throughput,
            TPE=metrics.TPE,
            registers=metrics.registers,
            norm_energy=metrics.normalized_energy,
        )

    @property
    def sort_key(self) -> tuple[int, int, int]:
        return self.K, self.I, self.dataflow.order

    def cells(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_COLUMNS}
