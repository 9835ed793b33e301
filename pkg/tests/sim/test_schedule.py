import pytest

from trimlab.conv import ConvShape
from trimlab.errors import ConfigurationError, DomainError, ShapeError
from trimlab.model import ma_trim
from trimlab.sim import InputSource
from trimlab.sim.trim import (
    DEFAULT_BRANCH_ORDER,
    TrimSchedule,
    expected_operand,
    last_cycle,
    schedule_for,
    schedule_source,
    served_output,
)

EXT, R, D, IDLE = InputSource.EXT, InputSource.R, InputSource.D, InputSource.IDLE


def test_walkthrough_fetches_by_row(shape5):
    schedule = TrimSchedule(shape5)
    assert schedule.is_default
    assert schedule.last_cycle == last_cycle(shape5) == 10
    assert schedule.ext_count_by_row() == [7, 7, 15]
    assert schedule.ext_count() == 29


def test_walkthrough_row0_sources(shape5):
    schedule = schedule_for(shape5)
    row0 = [schedule.row_sources(t, 0) for t in range(6)]
    assert row0 == [
        (EXT, EXT, EXT),
        (R, R, EXT),
        (R, R, EXT),
        (D, D, D),
        (R, R, D),
        (R, R, EXT),
    ]
    # middle rows replay row 0 one cycle per row later
    assert schedule.row_sources(4, 1) == schedule.row_sources(3, 0)
    assert schedule.row_sources(0, 1) == (IDLE, IDLE, IDLE)


def test_bottom_row(shape5):
    schedule = schedule_for(shape5)
    assert schedule.row_sources(1, 2) == (IDLE, IDLE, IDLE)
    assert schedule.row_sources(2, 2) == (EXT, EXT, EXT)
    assert schedule.row_sources(3, 2) == (R, R, EXT)
    assert schedule.row_sources(5, 2) == (EXT, EXT, EXT)
    assert schedule_source(8, 2, 0, shape5) is EXT


def test_served_output_and_operand(shape5):
    assert served_output(0, 1, shape5) is None
    assert served_output(4, 1, shape5) == 3
    assert served_output(11, 2, shape5) is None
    assert expected_operand(3, 0, 1, shape5) == (1, 1)
    assert expected_operand(4, 2, 2, shape5) == (2, 4)
    assert expected_operand(0, 2, 0, shape5) is None
    with pytest.raises(DomainError):
        expected_operand(0, 3, 0, shape5)


@pytest.mark.parametrize(
    "shape",
    [ConvShape.square(4, 3), ConvShape.square(6, 3), ConvShape.square(9, 3), ConvShape(7, 12, 5), ConvShape(3, 3, 2)],
)
def test_fetches_match_closed_form(shape):
    assert TrimSchedule(shape).ext_count() == ma_trim(shape)


def test_reversed_branch_order_breaks_the_count(shape5):
    schedule = TrimSchedule(shape5, tuple(reversed(DEFAULT_BRANCH_ORDER)))
    assert not schedule.is_default
    assert schedule.ext_count() == 36


def test_invalid_schedules(shape5):
    with pytest.raises(ConfigurationError, match="permutation"):
        TrimSchedule(shape5, ("start", "steady"))
    with pytest.raises(ShapeError):
        TrimSchedule(ConvShape(5, 3, 3))
    schedule = TrimSchedule(shape5)
    with pytest.raises(DomainError):
        schedule.source(11, 0, 0)
    with pytest.raises(DomainError):
        schedule.source(0, 0, 3)


def test_decisions_cover_every_pe(shape5):
    decisions = list(TrimSchedule(shape5).decisions())
    assert len(decisions) == 11 * 9
    assert decisions[0].t == 0 and (decisions[0].i, decisions[0].j) == (0, 0)
    assert sum(d.source is EXT for d in decisions) == 29


@pytest.mark.parametrize("shape", [ConvShape.square(5, 3), ConvShape(7, 12, 5), ConvShape(3, 3, 2), ConvShape(9, 8, 7)])
def test_tables_agree_with_per_pe_queries(shape):
    schedule = TrimSchedule(shape)
    k = shape.kernel_size
    sources, operands = schedule.source_table, schedule.operand_table
    assert sources.shape == operands.shape == (schedule.last_cycle + 1, k, k)
    assert not sources.flags.writeable and not operands.flags.writeable
    for t in range(schedule.last_cycle + 1):
        for i in range(k):
            for j in range(k):
                position = expected_operand(t, i, j, shape)
                if position is None:
                    assert operands[t, i, j] == -1
                    assert schedule.source(t, i, j) is not EXT
                else:
                    assert operands[t, i, j] == position[0] * shape.ifmap_width + position[1]
    fetched = [d for d in schedule.decisions() if d.source is EXT]
    assert len(fetched) == schedule.ext_count() == ma_trim(shape)
    assert schedule.ext_count_by_row()[k - 1] == sum(d.i == k - 1 for d in fetched)
