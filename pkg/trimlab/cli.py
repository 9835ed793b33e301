"""
Command-line frontend: `trimlab {model,sim,trace,sweep,verify} ...`.

Exit status: 0 on success, 1 when an identity or a verification check fails, 2 on usage errors.
"""

import argparse
import contextlib
import logging
import os
import sys
from typing import Optional, Sequence

import dotenv
import numpy as np

from runtrace import FileStorage

from .__version__ import __version__
from .conv import ConvShape, FeatureMap, Kernel
from .dse import SweepSpec, comparison_rows, emit_comparison, emit_report, sweep, verify
from .dse.identities import check_counters, check_ofmap, random_operands
from .dse.report import format_number
from .dse.spec import ReportRow
from .errors import ConfigurationError, DomainError, IdentityViolation, ShapeError, SimulationError
from .model import AlphaModel, DataflowKind, compare, inversion_point, metric_set_for
from .model import equations as eq
from .sim import SimConfig, emit_trace, simulate

_LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    value = os.environ.get(name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ConfigurationError(f"Environment variable {name} must be an integer, got {value!r}")


def _add_point_args(parser: argparse.ArgumentParser, default_dataflow: Optional[str] = "trim"):
    parser.add_argument("--dataflow", choices=[k.value for k in DataflowKind], default=default_dataflow)
    parser.add_argument("--k", type=int, required=True, help="kernel side K")
    parser.add_argument("--ifmap", type=int, required=True, help="ifmap side I (square ifmap)")


def _add_data_args(parser: argparse.ArgumentParser):
    parser.add_argument("--height", type=int, help="ifmap height, for non-square ifmaps")
    parser.add_argument(
        "--seed",
        type=int,
        help="random operands from this seed (default: ramp ifmap 1.. and ramp kernel 1..)",
    )
    parser.add_argument("--psum-bits", type=int, help="checked signed psum width")


def _add_output_args(parser: argparse.ArgumentParser, formats: Sequence[str], default: str):
    parser.add_argument("--format", choices=formats, default=default)
    parser.add_argument("--out", help="write the output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trimlab",
        description="TrIM systolic-array laboratory: analytical model, simulators and sweeps",
    )
    parser.add_argument("--version", action="version", version=f"trimlab {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true", help="log errors only")
    parser.add_argument(
        "--storage",
        default=os.environ.get("TRIMLAB_STORAGE") or None,
        help="directory receiving the gzipped run logs (default: $TRIMLAB_STORAGE)",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    model = commands.add_parser("model", help="analytical metrics of one point")
    _add_point_args(model)
    model.add_argument("--alpha", type=str, help="constant RS scratch-pad factor")
    _add_output_args(model, ("text", "csv", "json"), "text")

    sim = commands.add_parser("sim", help="simulate one point and print the counters")
    _add_point_args(sim)
    _add_data_args(sim)
    _add_output_args(sim, ("text",), "text")

    trace = commands.add_parser("trace", help="cycle-by-cycle trace of one simulation")
    _add_point_args(trace)
    _add_data_args(trace)
    trace.add_argument("--no-trace-values", action="store_true", help="emit the counters only")
    _add_output_args(trace, ("text", "json"), "text")

    sweep_cmd = commands.add_parser("sweep", help="design-space sweep as CSV or JSON")
    sweep_cmd.add_argument("--k", type=int, nargs="+", help="kernel sizes")
    sweep_cmd.add_argument("--ifmap", type=int, nargs="+", help="ifmap sizes")
    sweep_cmd.add_argument("--dataflow", nargs="+", choices=[k.value for k in DataflowKind])
    sweep_cmd.add_argument("--alpha", type=str, help="constant RS scratch-pad factor")
    sweep_cmd.add_argument("--no-sim", action="store_true", help="analytical model only")
    sweep_cmd.add_argument("--sim-limit", type=int, help="largest simulated ifmap size")
    sweep_cmd.add_argument("--seed", type=int, help="operand seed (default: $TRIMLAB_SEED or 0)")
    sweep_cmd.add_argument("--jobs", type=int, help="worker processes (default: $TRIMLAB_JOBS or 1)")
    sweep_cmd.add_argument("--progress", action="store_true", help="progress bar on stderr")
    sweep_cmd.add_argument("--compare", action="store_true", help="emit cross-dataflow ratios instead")
    _add_output_args(sweep_cmd, ("csv", "json"), "csv")

    verify_cmd = commands.add_parser("verify", help="run the identity and oracle suite")
    verify_cmd.add_argument("--k", type=int, nargs="+", help="kernel sizes of the grid")
    verify_cmd.add_argument("--ifmap", type=int, nargs="+", help="ifmap sizes of the grid")
    verify_cmd.add_argument("--configs", type=int, default=200, help="randomized oracle configurations")
    verify_cmd.add_argument("--sim-limit", type=int, help="largest simulated ifmap size")
    verify_cmd.add_argument("--no-sim", action="store_true", help="skip the grid simulations")
    verify_cmd.add_argument("--seed", type=int, help="seed (default: $TRIMLAB_SEED or 0)")
    _add_output_args(verify_cmd, ("text", "json"), "text")
    return parser


def _configure_logging(verbose: int, quiet: bool):
    if quiet:
        level = logging.ERROR
    else:
        level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _write(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _shape(args) -> ConvShape:
    height = args.height if getattr(args, "height", None) else args.ifmap
    return ConvShape(height, args.ifmap, args.k)


def _alpha(args) -> Optional[AlphaModel]:
    return AlphaModel.constant(args.alpha) if args.alpha is not None else None


def _operands(args, shape: ConvShape) -> tuple[FeatureMap, Kernel]:
    if args.seed is None:
        return FeatureMap.arange(shape.ifmap_height, shape.ifmap_width), Kernel.arange(shape.kernel_size)
    return random_operands(np.random.default_rng(args.seed), shape)


def cmd_model(args) -> int:
    kind = DataflowKind.parse(args.dataflow)
    shape = _shape(args)
    metrics = metric_set_for(kind, shape, _alpha(args))
    if args.format != "text":
        _write(emit_report([ReportRow.from_metrics(metrics)], args.format), args.out)
        return EXIT_OK
    lines = [f"dataflow={kind.label} K={shape.kernel_size} I={shape.ifmap_width}"]
    for name in ("H_O", "W_O", "MA", "OV", "OPs", "latency", "throughput", "TPE", "registers"):
        lines.append(f"{name}={format_number(getattr(metrics, name))}")
    lines.append(f"norm_energy={format_number(metrics.normalized_energy)}")
    lines.append(f"pe_count={metrics.pe_count} weight_loads={metrics.weight_loads}")
    if kind is not DataflowKind.RS and shape.kernel_size >= 2:
        ip = inversion_point(shape.kernel_size)
        lines.append(
            f"inversion_point={ip} reg_ws={eq.reg_ws(shape)} reg_trim={eq.reg_trim(shape)} "
            f"(TrIM needs {'fewer' if shape.ifmap_width < ip else 'at least as many'} registers)"
        )
    if kind is DataflowKind.RS:
        lines.append(f"MA_main={eq.ma_rs_main(shape)}")
    if shape.ifmap_height == shape.ifmap_width and shape.ifmap_width >= shape.kernel_size + 1:
        ratio = compare(shape.kernel_size, shape.ifmap_width, _alpha(args)).ma_ws_over_trim
        lines.append(f"ma_ws_over_trim={format_number(ratio)}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _run_simulation(args, keep_trace: bool):
    kind = DataflowKind.parse(args.dataflow)
    shape = _shape(args)
    ifmap, kernel = _operands(args, shape)
    config = SimConfig(keep_trace=keep_trace, psum_bits=args.psum_bits)
    result = simulate(kind, ifmap, kernel, shape, config)
    return result, ifmap, kernel


def cmd_sim(args) -> int:
    result, ifmap, kernel = _run_simulation(args, keep_trace=False)
    lines = [f"dataflow={result.dataflow.label} shape={result.shape}"]
    lines += [f"{name}={value}" for name, value in result.counters.as_dict().items()]
    _write("\n".join(lines) + "\n", args.out)
    check_counters(result)
    check_ofmap(result, ifmap, kernel)
    return EXIT_OK


def cmd_trace(args) -> int:
    result, _, _ = _run_simulation(args, keep_trace=not args.no_trace_values)
    _write(emit_trace(result, args.format, values=not args.no_trace_values), args.out)
    return EXIT_OK


def _spec(args, **extra) -> SweepSpec:
    fields = dict(extra)
    if args.k:
        fields["kernel_sizes"] = args.k
    if args.ifmap:
        fields["ifmap_sizes"] = args.ifmap
    if getattr(args, "dataflow", None):
        fields["dataflows"] = args.dataflow
    if getattr(args, "alpha", None) is not None:
        fields["alpha"] = AlphaModel.constant(args.alpha)
    if args.sim_limit is not None:
        fields["sim_limit"] = args.sim_limit
    fields["simulate"] = not args.no_sim
    fields["seed"] = args.seed if args.seed is not None else _env_int("TRIMLAB_SEED", 0)
    return SweepSpec(**fields)


def cmd_sweep(args) -> int:
    jobs = args.jobs if args.jobs is not None else _env_int("TRIMLAB_JOBS", 1)
    spec = _spec(args, output_format=args.format, jobs=jobs)
    if args.compare:
        _write(emit_comparison(comparison_rows(spec), spec.output_format), args.out)
        return EXIT_OK
    rows = sweep(spec, progress=args.progress)
    _write(emit_report(rows, spec.output_format), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.configs < 0:
        raise ConfigurationError(f"--configs must be nonnegative, got {args.configs}")
    report = verify(_spec(args), configs=args.configs)
    _write(report.to_json() if args.format == "json" else report.to_text(), args.out)
    failure = report.first_failure
    if failure is not None:
        print(f"trimlab: verification failed: {failure.name}: {failure.detail}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


COMMANDS = {
    "model": cmd_model,
    "sim": cmd_sim,
    "trace": cmd_trace,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    dotenv.load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    _configure_logging(args.verbose, args.quiet)

    storage = FileStorage(args.storage) if args.storage else contextlib.nullcontext()
    try:
        with storage:
            return COMMANDS[args.command](args)
    except (ShapeError, DomainError, ConfigurationError) as e:
        sys.stderr.write(parser.format_usage())
        print(f"trimlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (IdentityViolation, SimulationError) as e:
        print(f"trimlab: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
