from trimlab.dse import OUTPUT_FORMATS, SweepSpec, comparison_rows, emit_comparison, emit_report, evaluate_point, sweep
from trimlab.dse.sweep import point_rng
from trimlab.model import DataflowKind


def test_sweep_small_grid(storage):
    spec = SweepSpec(kernel_sizes=[3, 2], ifmap_sizes=[6, 5], sim_limit=5)
    with storage:
        rows = sweep(spec)
    assert [(r.K, r.I, r.dataflow) for r in rows[:4]] == [
        (2, 5, DataflowKind.WS),
        (2, 5, DataflowKind.RS),
        (2, 5, DataflowKind.TRIM),
        (2, 6, DataflowKind.WS),
    ]
    assert len(rows) == 12
    trim = next(r for r in rows if (r.K, r.I, r.dataflow) == (3, 5, DataflowKind.TRIM))
    assert (trim.MA, trim.OV, trim.latency, trim.registers) == (29, 4, 12, 39)

    (root,) = list(storage.read_all_nodes())
    assert root.kind == "sweep"
    assert root.counters == {"points": 4, "simulated_points": 2, "rows": 12}
    assert len(root.find_nodes(lambda n: n.kind == "point")) == 4
    assert len(root.find_nodes(lambda n: n.kind == "simulation")) == 6


def test_parallel_sweep_matches_sequential():
    spec = SweepSpec(kernel_sizes=[3], ifmap_sizes=[5, 7], sim_limit=7)
    parallel = SweepSpec(kernel_sizes=[3], ifmap_sizes=[5, 7], sim_limit=7, jobs=2)
    assert sweep(parallel) == sweep(spec)


def test_point_rng_is_order_independent():
    a = point_rng(0, 3, 16, DataflowKind.TRIM).integers(0, 100, 5)
    b = point_rng(0, 3, 16, DataflowKind.TRIM).integers(0, 100, 5)
    c = point_rng(0, 3, 16, DataflowKind.WS).integers(0, 100, 5)
    assert a.tolist() == b.tolist()
    assert a.tolist() != c.tolist()


def test_evaluate_point_without_simulation():
    rows = evaluate_point(SweepSpec(simulate=False), 7, 256)
    assert [r.dataflow for r in rows] == list(DataflowKind)
    assert rows[2].MA == 74500


def test_comparison_rows():
    rows = comparison_rows(SweepSpec(kernel_sizes=[3], ifmap_sizes=[16, 256]))
    assert [(r.K, r.I) for r in rows] == [(3, 16), (3, 256)]


def test_reports_are_reproducible():
    spec = SweepSpec(kernel_sizes=[3, 5], ifmap_sizes=[6, 9], sim_limit=9, seed=11)
    first, second = sweep(spec), sweep(spec)
    for fmt in OUTPUT_FORMATS:
        assert emit_report(first, fmt).encode() == emit_report(second, fmt).encode()
    assert emit_comparison(comparison_rows(spec)).encode() == emit_comparison(comparison_rows(spec)).encode()
