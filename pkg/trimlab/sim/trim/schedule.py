"""
Input-source orchestration of the TrIM array.

Row 0 runs a small state machine over the compute cycles (the output-row counter `alpha`);
rows `1 .. K-2` replay row 0's decisions delayed by their row index, and the bottom row follows
its own rule. The first branch whose guard matches selects the sources of the whole row.
"""

import functools
import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import cachetools
import numpy as np

from ...conv import ConvShape
from ...errors import ConfigurationError, DomainError
from ..base import EXT_CODE, IDLE_CODE, R_CODE, SOURCE_ORDER, InputSource

_LOG = logging.getLogger(__name__)

EXT, R, D, IDLE = InputSource.EXT, InputSource.R, InputSource.D, InputSource.IDLE

DEFAULT_BRANCH_ORDER = ("start", "first_row", "row_start", "second_column", "drained", "steady")


@dataclass(frozen=True)
class ScheduleDecision:
    t: int
    i: int
    j: int
    source: InputSource


def last_cycle(shape: ConvShape) -> int:
    """Last 0-based cycle with a scheduled decision, `H_O * W_O + K - 2`."""
    return shape.n_outputs + shape.kernel_size - 2


def served_output(t: int, i: int, shape: ConvShape) -> Optional[int]:
    """Raster index of the output row `i` contributes to at cycle `t`, if any."""
    n = t - i
    return n if 0 <= n < shape.n_outputs else None


def expected_operand(t: int, i: int, j: int, shape: ConvShape) -> Optional[tuple[int, int]]:
    """Ifmap position PE(i, j) must multiply at cycle `t`, or `None` when it serves no output."""
    _check_pe(i, j, shape)
    n = served_output(t, i, shape)
    if n is None:
        return None
    w_o = shape.ofmap_width
    return n // w_o + i, n % w_o + j


def _check_pe(i: int, j: int, shape: ConvShape):
    k = shape.kernel_size
    if not (0 <= i < k and 0 <= j < k):
        raise DomainError(f"PE({i},{j}) is outside the {k}x{k} array")


class _Row0Machine:
    """Algorithm state of row 0: the output-row counter and the branch table."""

    def __init__(self, shape: ConvShape):
        self.k = shape.kernel_size
        self.w_i = shape.ifmap_width
        self.w_o = shape.ofmap_width
        self.n_outputs = shape.n_outputs
        self.alpha = 0

    def _row(self, last: InputSource, others: InputSource) -> tuple[InputSource, ...]:
        return (others,) * (self.k - 1) + (last,)

    def start(self, t: int):
        if t == 0:
            return self._row(EXT, EXT)

    def first_row(self, t: int):
        if 1 <= t <= self.w_o - 1:
            return self._row(EXT, R)

    def row_start(self, t: int):
        if t % self.w_o == 0:
            self.alpha += 1
            return self._row(D, D)

    def second_column(self, t: int):
        if t == self.alpha * self.w_o + 1:
            return self._row(D, R)

    def drained(self, t: int):
        if t >= self.n_outputs:
            return self._row(IDLE, IDLE)

    def steady(self, t: int):
        if self.w_i <= 2 * self.k:
            return self._row(EXT, R)
        row_end = (self.alpha + 1) * self.w_o
        if row_end - self.k < t <= row_end - 1:
            return self._row(EXT, R)
        return self._row(D, R)


@cachetools.cached(cache=cachetools.LRUCache(maxsize=64))
def _row0_plan(shape: ConvShape, branch_order: tuple[str, ...]) -> tuple[tuple[InputSource, ...], ...]:
    machine = _Row0Machine(shape)
    branches = [getattr(machine, name) for name in branch_order]
    plan = []
    for t in range(last_cycle(shape) + 1):
        for branch in branches:
            row = branch(t)
            if row is not None:
                break
        else:
            row = (IDLE,) * shape.kernel_size
        plan.append(row)
    _LOG.debug(f"Row-0 plan for {shape}: {len(plan)} cycles, {machine.alpha} row starts")
    return tuple(plan)


class TrimSchedule:
    """
    Per-(cycle, PE) input sources of a TrIM array for one convolution shape.

    `branch_order` permutes the row-0 branches; anything but the default order is a deliberately
    broken schedule used to check that verification catches it.
    """

    def __init__(self, shape: ConvShape, branch_order: Sequence[str] = DEFAULT_BRANCH_ORDER):
        shape.require_streamable()
        branch_order = tuple(branch_order)
        if sorted(branch_order) != sorted(DEFAULT_BRANCH_ORDER):
            raise ConfigurationError(
                f"Branch order must be a permutation of {DEFAULT_BRANCH_ORDER}, got {branch_order}"
            )
        self.shape = shape
        self.branch_order = branch_order
        self.kernel_size = shape.kernel_size
        self.last_cycle = last_cycle(shape)
        self._row0 = _row0_plan(shape, branch_order) if shape.kernel_size > 1 else ()

    @property
    def is_default(self) -> bool:
        return self.branch_order == DEFAULT_BRANCH_ORDER

    @functools.cached_property
    def source_table(self) -> np.ndarray:
        """
        Read-only `(cycles, K, K)` array of source codes, `SOURCE_ORDER[code]` being the source
        of PE(i, j) at cycle `t`.
        """
        k, cycles, w_o = self.kernel_size, self.last_cycle + 1, self.shape.ofmap_width
        table = np.full((cycles, k, k), IDLE_CODE, dtype=np.int8)
        if k > 1:
            codes = {source: code for code, source in enumerate(SOURCE_ORDER)}
            row0 = np.array([[codes[s] for s in row] for row in self._row0], dtype=np.int8)
            # rows 1 .. K-2 replay row 0 delayed by their index
            for i in range(k - 1):
                table[i:, i, :] = row0[: cycles - i]
        t = np.arange(cycles)
        bottom = np.full((cycles, k), R_CODE, dtype=np.int8)
        bottom[:, k - 1] = EXT_CODE
        bottom[(t >= k - 1) & ((t - k + 1) % w_o == 0)] = EXT_CODE
        bottom[t < k - 1] = IDLE_CODE
        table[:, k - 1, :] = bottom
        table.setflags(write=False)
        return table

    @functools.cached_property
    def operand_table(self) -> np.ndarray:
        """
        Read-only `(cycles, K, K)` array of the flat ifmap index (`row * W_I + col`) PE(i, j) must
        multiply at cycle `t`, or -1 when it serves no output. Agrees with `expected_operand`.
        """
        shape, k = self.shape, self.kernel_size
        t = np.arange(self.last_cycle + 1)[:, None, None]
        i = np.arange(k)[None, :, None]
        j = np.arange(k)[None, None, :]
        n = t - i
        served = (n >= 0) & (n < shape.n_outputs)
        flat = (n // shape.ofmap_width + i) * shape.ifmap_width + n % shape.ofmap_width + j
        table = np.where(served, flat, -1)
        table.setflags(write=False)
        return table

    def source(self, t: int, i: int, j: int) -> InputSource:
        _check_pe(i, j, self.shape)
        if not 0 <= t <= self.last_cycle:
            raise DomainError(f"Cycle {t} is outside 0..{self.last_cycle}")
        return SOURCE_ORDER[self.source_table[t, i, j]]

    def row_sources(self, t: int, i: int) -> tuple[InputSource, ...]:
        return tuple(self.source(t, i, j) for j in range(self.kernel_size))

    def decisions(self) -> Iterator[ScheduleDecision]:
        """All decisions, by cycle, then row, then column."""
        for t, rows in enumerate(self.source_table.tolist()):
            for i, row in enumerate(rows):
                for j, code in enumerate(row):
                    yield ScheduleDecision(t, i, j, SOURCE_ORDER[code])

    def ext_count_by_row(self) -> list[int]:
        return (self.source_table == EXT_CODE).sum(axis=(0, 2)).tolist()

    def ext_count(self) -> int:
        return sum(self.ext_count_by_row())


@cachetools.cached(cache=cachetools.LRUCache(maxsize=64))
def schedule_for(shape: ConvShape) -> TrimSchedule:
    return TrimSchedule(shape)


def schedule_source(t: int, i: int, j: int, shape: ConvShape) -> InputSource:
    """Input source of PE(i, j) at compute cycle `t` under the default schedule."""
    return schedule_for(shape).source(t, i, j)
