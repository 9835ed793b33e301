import json

import pytest

from runtrace import RunNode, RunNodeState
from trimlab.dse import SweepSpec, verify
from trimlab.dse.verify import (
    CheckFailure,
    CheckResult,
    VerifyReport,
    check_cycle_example,
    check_energy_table,
    check_inversion_points,
    check_ma_ratios,
    check_oracles,
    check_register_claims,
)
from trimlab.model import AlphaModel
from trimlab.sim.trim import DEFAULT_BRANCH_ORDER

SMALL = SweepSpec(kernel_sizes=[3], ifmap_sizes=[5, 16], sim_limit=5)
BROKEN_ORDER = tuple(reversed(DEFAULT_BRANCH_ORDER))


def test_published_regressions():
    assert "input 13 fetched once, used 9 times" in check_cycle_example(DEFAULT_BRANCH_ORDER)
    assert check_ma_ratios() == "5.727, 41.107, 1.0154"
    assert check_register_claims() == "9.86, 15.58, 2.49"
    check_energy_table(SweepSpec())
    check_inversion_points(scan_limit=200)


def test_oracles_small():
    assert check_oracles(2, seed=3).startswith("2 randomized")


def test_verify_passes(storage):
    with storage:
        report = verify(SMALL, configs=1)
    assert report.passed, report.to_text()
    assert report.first_failure is None
    names = [check.name for check in report.checks]
    assert names[:2] == ["cycle_example", "schedule_fetches"]
    assert "oracles" in names
    (root,) = list(storage.read_all_nodes())
    assert root.counters == {"checks": len(names), "failed": 0}
    assert root.result is True
    checks = root.find_nodes(lambda n: n.kind == "check")
    assert [n.name for n in checks] == names
    (oracles,) = [n for n in checks if n.name == "oracles"]
    assert oracles.counters == {"configs": 1, "simulations": 3}
    assert len(oracles.find_nodes(lambda n: n.kind == "simulation")) == 3


def test_broken_schedule_fails():
    with RunNode("session") as session:
        report = verify(SMALL, configs=0, branch_order=BROKEN_ORDER)
    failed_nodes = session.find_nodes(lambda n: n.kind == "check" and n.state == RunNodeState.ERROR)
    assert [n.name for n in failed_nodes] == ["cycle_example", "schedule_fetches"]
    assert "29" in failed_nodes[0].error["message"]
    assert not report.passed
    assert report.first_failure.name == "cycle_example"
    assert "29" in report.first_failure.detail
    failed = {check.name for check in report.checks if not check.passed}
    assert failed == {"cycle_example", "schedule_fetches"}
    with pytest.raises(CheckFailure):
        check_cycle_example(BROKEN_ORDER)


def test_wrong_alpha_fails_energy_table():
    spec = SweepSpec(kernel_sizes=[3], ifmap_sizes=[5], simulate=False, alpha=AlphaModel.constant(0))
    report = verify(spec, configs=0)
    assert [c.name for c in report.checks if not c.passed] == ["energy_table"]


def test_report_rendering():
    report = VerifyReport([CheckResult("a", True, "ok"), CheckResult("b", False, "bad")])
    assert report.to_text() == "PASS a: ok\nFAIL b: bad\n1/2 checks passed\n"
    data = json.loads(report.to_json())
    assert data["passed"] is False
    assert data["checks"][1] == {"name": "b", "passed": False, "detail": "bad"}
