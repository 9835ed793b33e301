from fractions import Fraction

import pytest

from trimlab.conv import ConvShape
from trimlab.errors import DomainError
from trimlab.model import AlphaModel, DataflowKind
from trimlab.model import equations as eq


def test_walkthrough_counts(shape5):
    assert eq.ma_ws(shape5) == 81
    assert eq.ov_trim(shape5) == 4
    assert eq.ma_trim(shape5) == 29
    assert eq.ma_rs_main(shape5) == 25
    assert eq.weight_loads(shape5) == 9
    assert eq.latency_trim(shape5) == 12
    assert eq.latency_ws(shape5) == 17
    assert eq.latency_rs(shape5) == 15
    assert eq.srb_depth(shape5) == 1
    assert eq.reg_trim(shape5) == 39


def test_k3_i16():
    shape = ConvShape.square(16, 3)
    assert eq.ma_ws(shape) == 1764
    assert eq.ov_trim(shape) == 52
    assert eq.ma_trim(shape) == 308
    assert eq.ma_rs(shape) == Fraction("13.9") * 256
    assert eq.ops_total(shape) == 3528
    assert eq.reg_ws(shape) == 63
    assert eq.reg_rs(shape) == 294
    assert eq.reg_trim(shape) == 61
    assert eq.pe_count(DataflowKind.RS, shape) == 42
    assert eq.pe_count("trim", shape) == 9
    assert eq.tpe(DataflowKind.RS, shape) == Fraction(6, 5)
    assert eq.tpe(DataflowKind.TRIM, shape) == Fraction(392, 199)
    assert eq.throughput(DataflowKind.WS, shape) == Fraction(3528, 204)


@pytest.mark.parametrize("k", [2, 3, 5, 7, 9])
def test_overhead_branches_meet(k):
    h_i = 3 * k
    assert eq.ov_trim(ConvShape(h_i, 2 * k, k)) == (k - 1) ** 2 * (h_i - k)
    assert eq.ov_trim(ConvShape(h_i, 2 * k - 1, k)) == (k - 2) * (k - 1) * (h_i - k)


def test_overhead_edges():
    assert eq.ov_trim(ConvShape(3, 10, 3)) == 0
    assert eq.ov_trim(ConvShape(9, 4, 3)) == 0
    with pytest.raises(DomainError):
        eq.ov_trim(ConvShape(5, 3, 3))


def test_dispatchers_match_kind_functions():
    shape = ConvShape.square(20, 5)
    assert eq.memory_accesses("ws", shape) == eq.ma_ws(shape)
    assert eq.memory_accesses("trim", shape) == eq.ma_trim(shape)
    assert eq.memory_accesses("rs", shape) == eq.ma_rs(shape)
    assert eq.latency(DataflowKind.RS, shape) == eq.latency_rs(shape)
    assert eq.registers(DataflowKind.WS, shape) == eq.reg_ws(shape)
    assert eq.registers(DataflowKind.TRIM, shape) == eq.reg_trim(shape)


def test_normalized_energy():
    shape = ConvShape.square(16, 3)
    assert eq.normalized_energy(DataflowKind.RS, shape) == Fraction("13.9")
    assert eq.normalized_energy(DataflowKind.WS, shape) == Fraction(1764, 256)
    assert eq.normalized_energy(DataflowKind.TRIM, shape) == Fraction(308, 256)
    assert eq.normalized_energy(DataflowKind.RS, shape, AlphaModel.constant(0)) == 1


@pytest.mark.parametrize("k,point", [(2, 4), (3, 17), (5, 75), (7, 196)])
def test_inversion_point(k, point):
    ip = eq.inversion_point(k)
    assert ip == point
    ws = eq.reg_ws(ConvShape.square(ip, k))
    assert eq.reg_trim(ConvShape.square(ip - 1, k)) < ws
    assert eq.reg_trim(ConvShape.square(ip, k)) >= ws


def test_inversion_threshold():
    assert eq.inversion_threshold(3) == 17
    assert eq.inversion_threshold(5) == Fraction(149, 2)
    assert eq.reg_trim(ConvShape.square(17, 3)) == eq.reg_ws(ConvShape.square(17, 3)) == 63
    for bad in (1, 0, True, 2.0):
        with pytest.raises(DomainError):
            eq.inversion_threshold(bad)


def test_tpe_bounds():
    for k in (2, 3, 5):
        for i in range(k + 1, 40):
            shape = ConvShape.square(i, k)
            for kind in DataflowKind:
                assert 0 < eq.tpe(kind, shape) <= 2
            assert eq.ma_trim(shape) <= eq.ma_ws(shape)
