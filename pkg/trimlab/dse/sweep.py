import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Iterator, Optional

import numpy as np
from tqdm import tqdm

from runtrace import RunNode

from ..conv import ConvShape
from ..model import ComparisonRow, DataflowKind, compare, metric_set_for
from .identities import simulate_and_check
from .spec import ReportRow, SweepSpec

_LOG = logging.getLogger(__name__)


def point_rng(seed: int, kernel_size: int, ifmap_size: int, kind: DataflowKind) -> np.random.Generator:
    """Operand generator of one grid point, independent of evaluation order and worker count."""
    return np.random.default_rng([seed, kernel_size, ifmap_size, kind.order])


def evaluate_point(spec: SweepSpec, kernel_size: int, ifmap_size: int) -> list[ReportRow]:
    """
    Report rows of one `(K, I)` point for every dataflow of `spec`.

    Simulated points raise `IdentityViolation` unless every counter equals its closed form
    and the ofmap equals the golden convolution.
    """
    shape = ConvShape.square(ifmap_size, kernel_size)
    rows = []
    for kind in spec.dataflows:
        metrics = metric_set_for(kind, shape, spec.alpha)
        if spec.simulates(ifmap_size):
            simulate_and_check(kind, shape, point_rng(spec.seed, kernel_size, ifmap_size, kind))
        rows.append(ReportRow.from_metrics(metrics))
    return rows


def _evaluate(args: tuple[SweepSpec, int, int]) -> list[ReportRow]:
    return evaluate_point(*args)


def _results(spec: SweepSpec, node: RunNode) -> Iterator[tuple[tuple[int, int], list[ReportRow]]]:
    points = spec.points()
    if spec.jobs == 1:
        for k, i in points:
            with RunNode(f"K={k} I={i}", kind="point", inputs={"K": k, "I": i}) as point:
                rows = evaluate_point(spec, k, i)
                point.set_result(rows)
            yield (k, i), rows
        return
    with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
        for (k, i), rows in zip(points, pool.map(_evaluate, [(spec, k, i) for k, i in points])):
            node.add_event(f"K={k} I={i}", kind="point", data=rows)
            yield (k, i), rows


def sweep(spec: Optional[SweepSpec] = None, progress: bool = False) -> list[ReportRow]:
    """
    Evaluate every grid point of `spec`, sorted by `(K, I, dataflow)`.

    With `progress`, a progress bar is drawn on stderr.
    """
    spec = spec or SweepSpec()
    rows = []
    with RunNode("sweep", kind="sweep", inputs=spec.describe()) as node:
        results = _results(spec, node)
        with tqdm(
            total=len(spec.points()), desc="sweep", unit="point", disable=not progress, file=sys.stderr
        ) as bar:
            for (k, i), point_rows in results:
                rows.extend(point_rows)
                bar.update(1)
                _LOG.debug(f"Point K={k} I={i} done")
        rows.sort(key=lambda row: row.sort_key)
        simulated = sum(1 for _, i in spec.points() if spec.simulates(i))
        node.add_counters(points=len(spec.points()), simulated_points=simulated, rows=len(rows))
        _LOG.info(f"Sweep finished: {len(rows)} rows, {simulated} simulated point(s)")
    return rows


def comparison_rows(spec: Optional[SweepSpec] = None) -> list[ComparisonRow]:
    """Cross-dataflow ratios for every `(K, I)` point of `spec`."""
    spec = spec or SweepSpec()
    with RunNode("comparison", kind="sweep", inputs=spec.describe()) as node:
        rows = [compare(k, i, spec.alpha) for k, i in spec.points()]
        node.add_counters(rows=len(rows))
    return rows
