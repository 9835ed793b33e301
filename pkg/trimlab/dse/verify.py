"""
The verification suite: published regressions, counter/formula identities over the grid,
randomized oracle equivalence and the analytical-model properties.
"""

import json
import logging
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from runtrace import RunNode, current_run_node, with_trace

from ..conv import ConvShape, FeatureMap, Kernel, conv_to_gemm, gemm_reference, golden_conv
from ..errors import IdentityViolation, SimulationError, TrimlabError
from ..model import DataflowKind, compare, tpe_discrepancies
from ..model import equations as eq
from ..sim import SimConfig, simulate
from ..sim.trim import DEFAULT_BRANCH_ORDER, TrimSchedule, TrimSimulator
from .identities import check_counters, check_ofmap, random_operands, simulate_and_check
from .spec import SweepSpec
from .sweep import point_rng

_LOG = logging.getLogger(__name__)

ORACLE_KERNEL_SIZES = (2, 3, 5, 7)
ORACLE_MAX_WIDTH = 40

TABLE_SIZES = (16, 64, 256)
PUBLISHED_ENERGY = {
    # (K, I): (RS, WS, TrIM), normalized to one read of the ifmap
    (3, 16): ("13.9", "6.9", "1.2"),
    (3, 64): ("15.7", "8.4", "1.1"),
    (3, 256): ("17.5", "8.9", "1.0"),
    (5, 16): ("13.9", "14.1", "1.7"),
    (5, 64): ("15.7", "22.0", "1.2"),
    (5, 256): ("17.5", "24.2", "1.1"),
    (7, 16): ("13.9", "19.1", "2.3"),
    (7, 64): ("15.7", "40.2", "1.5"),
    (7, 256): ("17.5", "46.7", "1.1"),
}

PUBLISHED_INVERSION_POINTS = {3: 17, 5: 75, 7: 196}


class CheckFailure(TrimlabError):
    """A verification check found a value outside its expected range."""

    pass


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class VerifyReport:
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def first_failure(self) -> Optional[CheckResult]:
        return next((check for check in self.checks if not check.passed), None)

    def to_json(self) -> str:
        data = {"passed": self.passed, "checks": [asdict(check) for check in self.checks]}
        return json.dumps(data, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in self.checks]
        passed = sum(c.passed for c in self.checks)
        lines.append(f"{passed}/{len(self.checks)} checks passed")
        return "\n".join(lines) + "\n"


def _expect(condition: bool, message: str):
    if not condition:
        raise CheckFailure(message)


def _within(value: Fraction, target: str, tolerance: str) -> bool:
    return abs(value - Fraction(target)) <= Fraction(tolerance)


def _add_counters(**counters: int):
    # onto the check's own node when it runs under `verify`
    node = current_run_node(check=False)
    if node is not None:
        node.add_counters(counters)


# Published regressions


def check_cycle_example(branch_order: Sequence[str]) -> str:
    """The 5x5 ifmap (1..25) with a 3x3 kernel on the TrIM array."""
    shape = ConvShape.square(5, 3)
    ifmap, kernel = FeatureMap.arange(5, 5), Kernel.arange(3)
    schedule = TrimSchedule(shape, branch_order)
    by_row = schedule.ext_count_by_row()
    _expect(sum(by_row) == 29, f"schedule fetches {sum(by_row)} inputs ({by_row}), expected 29")
    _expect(by_row == [7, 7, 15], f"per-row fetches {by_row}, expected [7, 7, 15]")
    try:
        result = TrimSimulator(SimConfig(keep_trace=False), branch_order).run(ifmap, kernel, shape)
    except SimulationError as e:
        raise CheckFailure(f"simulation failed: {e}") from e
    check_counters(result)
    check_ofmap(result, ifmap, kernel)
    c = result.counters
    _expect(c.refetches == 4, f"{c.refetches} redundant fetches, expected 4")
    fetched, used = int(result.fetch_counts[2, 2]), int(result.use_counts[2, 2])
    _expect(fetched == 1 and used == 9, f"input 13 fetched {fetched}x, used {used}x; expected 1x, 9x")
    return (
        f"ext_fetches={c.ext_fetches} refetches={c.refetches} cycles={c.compute_cycles} "
        f"registers={c.register_count}; input 13 fetched once, used 9 times"
    )


def check_ma_ratios() -> str:
    r1 = compare(3, 16).ma_ws_over_trim
    r2 = compare(7, 256).ma_ws_over_trim
    r3 = compare(3, 256).ma_trim_over_rs_main
    _expect(_within(r1, "5.73", "0.05"), f"MA_WS/MA_TrIM at K=3, I=16 is {float(r1):.4f}")
    _expect(_within(r2, "41.1", "0.1"), f"MA_WS/MA_TrIM at K=7, I=256 is {float(r2):.4f}")
    _expect(_within(r3, "1.015", "0.001"), f"MA_TrIM/MA_RS,main at K=3, I=256 is {float(r3):.5f}")
    return f"{float(r1):.3f}, {float(r2):.3f}, {float(r3):.4f}"


def check_energy_table(spec: SweepSpec) -> str:
    for (k, i), published in PUBLISHED_ENERGY.items():
        shape = ConvShape.square(i, k)
        for kind, value in zip((DataflowKind.RS, DataflowKind.WS, DataflowKind.TRIM), published):
            energy = eq.normalized_energy(kind, shape, spec.alpha)
            if kind is DataflowKind.RS:
                _expect(energy == Fraction(value), f"RS energy at K={k}, I={i} is {float(energy)}")
            else:
                shown = round(energy, 1)
                _expect(
                    _within(shown, value, "0.05"),
                    f"{kind.label} energy at K={k}, I={i} is {float(energy):.3f}, published {value}",
                )
    return f"{len(PUBLISHED_ENERGY) * 3} cells match"


def check_register_claims() -> str:
    r1 = compare(3, 256).reg_rs_over_trim
    r2 = compare(7, 256).reg_rs_over_trim
    r3 = compare(3, 64).reg_trim_over_ws
    _expect(_within(r1, "9.86", "0.05"), f"Reg_RS/Reg_TrIM at K=3, I=256 is {float(r1):.3f}")
    _expect(_within(r2, "15.58", "0.05"), f"Reg_RS/Reg_TrIM at K=7, I=256 is {float(r2):.3f}")
    _expect(_within(r3, "2.49", "0.02"), f"Reg_TrIM/Reg_WS at K=3, I=64 is {float(r3):.3f}")
    return f"{float(r1):.2f}, {float(r2):.2f}, {float(r3):.2f}"


def check_inversion_points(scan_limit: int = 300) -> str:
    for k, published in PUBLISHED_INVERSION_POINTS.items():
        _expect(eq.inversion_point(k) == published, f"inversion point K={k} is {eq.inversion_point(k)}")
    for k in range(2, 10):
        ip = eq.inversion_point(k)
        ws = eq.reg_ws(ConvShape.square(k + 1, k))
        for i in range(k + 1, scan_limit + 1):
            trim = eq.reg_trim(ConvShape.square(i, k))
            if i < ip:
                _expect(trim < ws, f"K={k}, I={i}: Reg_TrIM={trim} is not below Reg_WS={ws}")
            else:
                _expect(trim >= ws, f"K={k}, I={i}: Reg_TrIM={trim} is below Reg_WS={ws}")
    equal = eq.reg_trim(ConvShape.square(17, 3)) == eq.reg_ws(ConvShape.square(17, 3))
    _expect(equal, "K=3, I=17 register counts differ")
    return "17, 75, 196; crossover holds for K=2..9"


# Grid identities and oracles


def check_grid_identities(spec: SweepSpec) -> str:
    simulated = 0
    for k, i in spec.points():
        if not spec.simulates(i):
            continue
        shape = ConvShape.square(i, k)
        for kind in spec.dataflows:
            simulate_and_check(kind, shape, point_rng(spec.seed, k, i, kind))
            simulated += 1
    _add_counters(simulations=simulated)
    return f"{simulated} simulation(s) match their closed forms"


def check_schedule_fetches(spec: SweepSpec, branch_order: Sequence[str]) -> str:
    for k, i in spec.points():
        shape = ConvShape.square(i, k)
        count = TrimSchedule(shape, branch_order).ext_count()
        if count != eq.ma_trim(shape):
            raise IdentityViolation((DataflowKind.TRIM.label, k, i), "scheduled fetches", eq.ma_trim(shape), count)
    return f"{len(spec.points())} schedule(s)"


def check_oracles(configs: int, seed: int) -> str:
    rng = np.random.default_rng(seed)
    for n in range(configs):
        k = int(rng.choice(ORACLE_KERNEL_SIZES))
        width = int(rng.integers(k + 1, ORACLE_MAX_WIDTH, endpoint=True))
        height = int(rng.integers(k, ORACLE_MAX_WIDTH, endpoint=True))
        shape = ConvShape(height, width, k)
        ifmap, kernel = random_operands(rng, shape)
        golden = golden_conv(ifmap, kernel, shape)
        if gemm_reference(conv_to_gemm(ifmap, kernel, shape)) != golden:
            raise IdentityViolation(("GeMM", k, str(shape)), "ofmap", "golden convolution", "mismatch")
        for kind in DataflowKind:
            result = simulate(kind, ifmap, kernel, shape, SimConfig(keep_trace=False))
            check_ofmap(result, ifmap, kernel)
            check_counters(result)
    _add_counters(configs=configs, simulations=configs * len(DataflowKind))
    return f"{configs} randomized configuration(s), 3 simulators each"


def check_overhead_continuity() -> str:
    for k in range(2, 10):
        h_i = 3 * k
        first = (2 * k - k - 1) * (k - 1) * (h_i - k)
        second = (k - 1) ** 2 * (h_i - k)
        _expect(first == second, f"OV branches differ at W_I=2K for K={k}")
        _expect(eq.ov_trim(ConvShape(h_i, 2 * k, k)) == second, f"ov_trim(W_I=2K) wrong for K={k}")
    return "K=2..9"


def check_model_properties(limit: int = 512) -> str:
    for k in range(2, 10):
        previous = Fraction(0)
        for i in range(k + 1, limit + 1):
            shape = ConvShape.square(i, k)
            _expect(eq.ma_trim(shape) <= eq.ma_ws(shape), f"MA_TrIM > MA_WS at K={k}, I={i}")
            _expect(eq.ma_trim(shape) - shape.n_inputs == eq.ov_trim(shape) >= 0, f"OV at K={k}, I={i}")
            for kind in DataflowKind:
                value = eq.tpe(kind, shape)
                _expect(0 < value <= 2, f"TPE_{kind.label}={value} at K={k}, I={i}")
            trim_tpe = eq.tpe(DataflowKind.TRIM, shape)
            _expect(trim_tpe >= previous, f"TPE_TrIM decreases at K={k}, I={i}")
            previous = trim_tpe
            _expect(eq.tpe(DataflowKind.RS, shape) == Fraction(2 * k, 2 * k - 1), f"TPE_RS at K={k}, I={i}")
            _expect(
                eq.throughput(DataflowKind.TRIM, shape) == Fraction(eq.ops_total(shape), eq.latency_trim(shape)),
                f"T_TrIM at K={k}, I={i}",
            )
    return f"K=2..9, I up to {limit}"


def check_throughput(spec: SweepSpec) -> str:
    for k, i in spec.points():
        value = eq.tpe(DataflowKind.TRIM, ConvShape.square(i, k))
        _expect(0 < value <= 2, f"TPE_TrIM={float(value)} at K={k}, I={i}")
    for k in spec.kernel_sizes:
        value = eq.tpe(DataflowKind.TRIM, ConvShape.square(256, k))
        _expect(value >= Fraction("1.999"), f"TPE_TrIM at K={k}, I=256 is {float(value):.5f}")
    gain = compare(3, 256).tpe_gain_vs_rs
    _expect(_within(gain, "0.6667", "0.001"), f"TPE_TrIM/TPE_RS - 1 at K=3, I=256 is {float(gain):.4f}")
    return f"TPE gain vs RS at K=3, I=256: {float(gain):.2%}"


def note_published_tpe_gains() -> str:
    items = tpe_discrepancies()
    return "; ".join(
        f"{d.quantity} K={d.K or 'any'}: published {float(d.published):.1%}, formulas {float(d.computed):.1%}"
        for d in items
    )


def verify(
    spec: Optional[SweepSpec] = None,
    configs: int = 200,
    branch_order: Sequence[str] = DEFAULT_BRANCH_ORDER,
) -> VerifyReport:
    """
    Run every check and collect the outcomes; a failing check does not stop the others.

    `branch_order` replaces the TrIM row-0 branch order in the schedule checks, which lets a
    broken schedule be fed through the suite.
    """
    spec = spec or SweepSpec()
    checks: list[tuple[str, Callable[[], str]]] = [
        ("cycle_example", lambda: check_cycle_example(branch_order)),
        ("schedule_fetches", lambda: check_schedule_fetches(spec, branch_order)),
        ("ma_ratios", check_ma_ratios),
        ("energy_table", lambda: check_energy_table(spec)),
        ("register_claims", check_register_claims),
        ("inversion_points", check_inversion_points),
        ("overhead_continuity", check_overhead_continuity),
        ("model_properties", check_model_properties),
        ("throughput", lambda: check_throughput(spec)),
        ("grid_identities", lambda: check_grid_identities(spec)),
        ("oracles", lambda: check_oracles(configs, spec.seed)),
        ("published_tpe_gains", note_published_tpe_gains),
    ]
    results = []
    with RunNode("verify", kind="verify", inputs={**spec.describe(), "configs": configs}) as node:
        for name, check in checks:
            try:
                detail = with_trace(check, name=name, kind="check")()
            except (TrimlabError, ArithmeticError) as e:
                results.append(CheckResult(name, False, str(e)))
                _LOG.info(f"FAIL {name}: {e}")
                continue
            results.append(CheckResult(name, True, detail))
            _LOG.info(f"PASS {name}")
        report = VerifyReport(results)
        node.add_counters(checks=len(results), failed=sum(not c.passed for c in results))
        node.set_result(report.passed)
    return report
