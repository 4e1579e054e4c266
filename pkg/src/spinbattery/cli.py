"""Command-line interface: simulate, sweep, preset, topology and validate.

Exit status is 0 on success, 1 for configuration and domain errors and 2
when Krylov propagation fails to converge.
"""

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path

from rich.console import Console
from rich.table import Table

from spinbattery import __version__
from spinbattery.config.config import (
    LOG_BACKUP_COUNT,
    LOG_FILE,
    LOG_FORMAT,
    LOG_LEVEL,
    LOG_MAX_SIZE,
    SWEEP_WORKERS,
)
from spinbattery.errors import (
    ConvergenceError,
    DomainError,
    OutputError,
    PlanError,
    SpinBatteryError,
)
from spinbattery.experiments import (
    REQUIRED_GROUPS,
    SweepSpec,
    lookup_preset,
    point_label,
    preset_catalog,
    run_plan,
    run_sweep,
)
from spinbattery.logger import get_logger, setup_logging
from spinbattery.metrics import ChargeTimeSeries, cycle_report
from spinbattery.output import write_series_csv, write_summary_csv
from spinbattery.render.svg import Metric, render_svg
from spinbattery.run_config import RunConfig
from spinbattery.topology import topology_by_name

logger = get_logger("cli")

console = Console(highlight=False)
err_console = Console(stderr=True, highlight=False)


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit 1 like every other domain error."""

    def error(self, message: str):
        raise DomainError(f"{self.prog}: {message}")


def exit_code(error: BaseException) -> int:
    """2 for convergence failures, wrapped or not; 1 for everything else."""
    if isinstance(error, ConvergenceError) or isinstance(
        error.__cause__, ConvergenceError
    ):
        return 2
    return 1


def report_error(error: BaseException) -> None:
    err_console.print(f"error: {error}", style="bold red", markup=False, soft_wrap=True)


def parse_axis(text: str) -> tuple[str, tuple[float, ...]]:
    """`name=v1,v2,...` -> (name, values)."""
    name, sep, values = text.partition("=")
    if not sep or not name.strip() or not values.strip():
        raise DomainError(f"Axis '{text}' must look like name=v1,v2,...")
    try:
        return name.strip(), tuple(float(v) for v in values.split(","))
    except ValueError:
        raise DomainError(f"Axis '{text}' has a non-numeric value") from None


def _make_dir(directory: Path) -> None:
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(directory, e) from e


def _slug(label: str) -> str:
    return label.replace("=", "").replace(",", "_")


def write_run(
    series: ChargeTimeSeries, directory: Path, emit_svg: bool, suffix: str = ""
) -> list[Path]:
    """Write series{suffix}.csv and, optionally, both metric plots."""
    _make_dir(directory)
    written = [directory / f"series{suffix}.csv"]
    write_series_csv(series, written[0])
    if emit_svg:
        for metric in Metric:
            path = directory / f"{metric}{suffix}.svg"
            render_svg(series, metric, path)
            written.append(path)
    return written


def execute_sweep(
    spec: SweepSpec, directory: Path, emit_svg: bool, workers: int
) -> int:
    """Run a sweep, write per-point files plus summary.csv; return the exit status."""
    results = run_sweep(spec, workers)
    _make_dir(directory)
    rows = []
    status = 0
    for point, outcome in results.items():
        label = point_label(point)
        if isinstance(outcome, PlanError):
            report_error(outcome)
            status = max(status, exit_code(outcome))
            rows.append((label, None))
            continue
        write_run(outcome, directory, emit_svg, suffix=f"_{_slug(label)}")
        rows.append((label, cycle_report(outcome) if len(outcome) >= 3 else None))
    write_summary_csv(rows, directory / "summary.csv")

    failed = sum(isinstance(o, PlanError) for o in results.values())
    console.print(
        f"{len(results) - failed}/{len(results)} sweep points written to {directory}",
        markup=False,
        soft_wrap=True,
    )
    return status


# =============================================================================
# COMMANDS
# =============================================================================


def cmd_simulate(args: argparse.Namespace) -> int:
    config = RunConfig.read(args.config)
    plan = config.to_plan()
    directory = args.out or config.output_dir
    series = run_plan(plan)
    for path in write_run(series, directory, args.svg or config.emit_svg):
        console.print(f"wrote {path}", markup=False, soft_wrap=True)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = RunConfig.read(args.config)
    spec = SweepSpec(config.to_plan(), tuple(parse_axis(a) for a in args.axis))
    directory = args.out or config.output_dir
    return execute_sweep(spec, directory, args.svg or config.emit_svg, args.workers)


def cmd_preset_list(args: argparse.Namespace) -> int:
    if args.group is not None and args.group not in REQUIRED_GROUPS:
        raise DomainError(
            f"Unknown group '{args.group}'. Groups: {', '.join(REQUIRED_GROUPS)}"
        )
    table = Table(title="Presets")
    table.add_column("Name", style="cyan", no_wrap=True)
    table.add_column("Kind")
    table.add_column("Topology")
    table.add_column("Groups", style="dim")
    for name, preset in sorted(preset_catalog().items()):
        if args.group is not None and args.group not in preset.groups:
            continue
        table.add_row(
            name,
            preset.kind,
            preset.base_plan.topology.name,
            ", ".join(sorted(preset.groups)),
        )
    console.print(table)
    return 0


def cmd_preset_run(args: argparse.Namespace) -> int:
    preset = lookup_preset(args.name)
    directory = args.out or Path("out") / preset.name
    if preset.sweep is not None:
        return execute_sweep(preset.sweep, directory, args.svg, args.workers)
    series = run_plan(preset.plan)
    for path in write_run(series, directory, args.svg):
        console.print(f"wrote {path}", markup=False, soft_wrap=True)
    return 0


def cmd_topology_export(args: argparse.Namespace) -> int:
    text = topology_by_name(args.name).to_edge_list()
    if args.output is None:
        sys.stdout.write(text)
        return 0
    try:
        args.output.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OutputError(args.output, e) from e
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    plan = RunConfig.read(args.config).to_plan()
    console.print(
        f"ok: {plan.label} on {plan.topology.name} ({plan.topology.n} qubits, "
        f"{plan.model_kind}, {plan.samples} samples up to t={plan.t_max:g})",
        markup=False,
        soft_wrap=True,
    )
    return 0


# =============================================================================
# PARSER
# =============================================================================


def build_parser() -> CliParser:
    parser = CliParser(
        prog="spinbattery",
        description="Simulate collective charging of spin-chain quantum batteries.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        default=LOG_LEVEL,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
    )
    parser.add_argument("--log-file", default=LOG_FILE, help="rotating log file")
    parser.add_argument(
        "--no-log-file", action="store_true", help="log to the console only"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def outputs(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--out", type=Path, default=None, help="output directory")
        sub.add_argument("--svg", action="store_true", help="also render SVG plots")

    simulate = commands.add_parser("simulate", help="run one configured plan")
    simulate.add_argument("--config", type=Path, required=True)
    outputs(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    sweep = commands.add_parser("sweep", help="run a configured plan over parameter axes")
    sweep.add_argument("--config", type=Path, required=True)
    sweep.add_argument(
        "--axis",
        action="append",
        required=True,
        metavar="NAME=V1,V2,...",
        help="parameter axis; repeat for a Cartesian product",
    )
    sweep.add_argument("--workers", type=int, default=SWEEP_WORKERS)
    outputs(sweep)
    sweep.set_defaults(handler=cmd_sweep)

    preset = commands.add_parser("preset", help="list or run catalog presets")
    preset_commands = preset.add_subparsers(dest="preset_command", required=True)
    listing = preset_commands.add_parser("list", help="show the preset catalog")
    listing.add_argument("--group", default=None, help="only presets in this group")
    listing.set_defaults(handler=cmd_preset_list)
    running = preset_commands.add_parser("run", help="run a preset by name")
    running.add_argument("name")
    running.add_argument("--workers", type=int, default=SWEEP_WORKERS)
    outputs(running)
    running.set_defaults(handler=cmd_preset_run)

    topology = commands.add_parser("topology", help="topology catalog tools")
    topology_commands = topology.add_subparsers(dest="topology_command", required=True)
    export = topology_commands.add_parser("export", help="print a topology edge list")
    export.add_argument("name")
    export.add_argument("--output", type=Path, default=None)
    export.set_defaults(handler=cmd_topology_export)

    validate = commands.add_parser("validate", help="check a config without running it")
    validate.add_argument("--config", type=Path, required=True)
    validate.set_defaults(handler=cmd_validate)
    return parser


def cli_main(argv: Sequence[str] | None = None) -> int:
    """Parse `argv`, run the chosen command and return its exit status."""
    try:
        args = build_parser().parse_args(argv)
    except DomainError as e:
        report_error(e)
        return 1

    setup_logging(
        log_level=args.log_level,
        log_file=None if args.no_log_file else args.log_file,
        log_format=LOG_FORMAT,
        max_size=LOG_MAX_SIZE,
        backup_count=LOG_BACKUP_COUNT,
    )
    logger.info(f"Running command {args.command}")
    try:
        return args.handler(args)
    except SpinBatteryError as e:
        logger.error(f"Command {args.command} failed: {e}")
        report_error(e)
        return exit_code(e)
