"""
The ``micro-slice`` command line.

Commands:
    run <scenario> [--out DIR] [--seed N] [--verify-replay]
    validate <trace-file> [--scenario KIND]
    list-scenarios
    check <scenario>
    schema

``<scenario>`` is a file path or the name of a bundled scenario. Exit codes: 0 success,
1 expectation mismatch or non-conformant trace, 2 unreadable, unparseable or invalid input,
3 invariant violation or replay divergence, 4 outputs could not be written.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger

from microslice._version import __version__
from microslice.config import Settings
from microslice.engine.replay import replay
from microslice.engine.trace import FormationTrace
from microslice.engine.validator import validate_trace
from microslice.errors import (
    ExpectationMismatch,
    InvariantViolation,
    IoError,
    MalformedTrace,
    ReplayDivergence,
    ScenarioError,
)
from microslice.management.models import DeploymentScenario
from microslice.runner.report import emit_report, render_summary
from microslice.runner.run import run_scenario
from microslice.scenario.loader import list_bundled, load_bundled, resolve_scenario
from microslice.scenario.schema import ScenarioSpec
from microslice.utils.json_schema_cleaner import inline_refs
from microslice.utils.telemetry import configure_tracing

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_INVARIANT = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="micro-slice",
        description="Simulate the network slicing management plane of a micro-operator.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run a scenario and write its traces and report")
    run.add_argument("scenario", help="Scenario file or bundled scenario name")
    run.add_argument(
        "--out",
        type=Path,
        default=None,
        help="Output directory (default: $MICROSLICE_OUTPUT_DIR/<name>)",
    )
    run.add_argument("--seed", type=int, default=None, help="Seed for synthetic requests")
    run.add_argument(
        "--verify-replay",
        action="store_true",
        help="Replay the run and fail on the first divergent event",
    )

    validate = subparsers.add_parser("validate", help="Check a trace file for conformance")
    validate.add_argument("trace", type=Path, help="Trace file")
    validate.add_argument(
        "--scenario",
        choices=[scenario.value for scenario in DeploymentScenario],
        default=None,
        help="Deployment scenario the trace must follow (default: the one it records)",
    )

    subparsers.add_parser("list-scenarios", help="List the bundled scenarios")

    check = subparsers.add_parser("check", help="Parse and check a scenario without running it")
    check.add_argument("scenario", help="Scenario file or bundled scenario name")

    subparsers.add_parser("schema", help="Print the scenario JSON schema")
    return parser


def _report_scenario_error(exc: ScenarioError) -> int:
    logger.error("{}", exc)
    for field, message in exc.diagnostics:
        logger.error("  {}: {}", field, message)
    return EXIT_INPUT


def command_run(args: argparse.Namespace, settings: Settings) -> int:
    spec = resolve_scenario(args.scenario)
    seed = spec.seed if args.seed is None else args.seed
    config = settings.simulation_config(
        seed=seed, strict_latency_ms=spec.settings.strict_latency_ms
    )
    report, traces = run_scenario(spec, config, raise_on_mismatch=False)
    out_dir = args.out if args.out is not None else settings.output_dir / spec.name
    emit_report(report, traces, out_dir)
    if args.verify_replay:
        replay(traces, spec, config, expected_state=report.final_state)
    sys.stdout.write(render_summary(report))
    report.raise_for_expectations()
    return EXIT_OK


def command_validate(args: argparse.Namespace) -> int:
    try:
        text = args.trace.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise MalformedTrace(f"cannot read {args.trace}: {exc}") from None
    trace = FormationTrace.from_text(text)
    kind = DeploymentScenario(args.scenario) if args.scenario else None
    conformance = validate_trace(trace, kind)
    sys.stdout.write(conformance.summary() + "\n")
    return EXIT_OK if conformance.conformant else EXIT_MISMATCH


def command_list() -> int:
    for name in list_bundled():
        spec = load_bundled(name)
        sys.stdout.write(f"{name}\t{spec.description}\n")
    return EXIT_OK


def command_check(args: argparse.Namespace) -> int:
    spec = resolve_scenario(args.scenario)
    sys.stdout.write(
        f"{spec.name}: ok ({len(spec.locations)} locations, {len(spec.tenants)} tenants, "
        f"{len(spec.requests)} requests)\n"
    )
    return EXIT_OK


def command_schema() -> int:
    schema = inline_refs(ScenarioSpec.model_json_schema())
    sys.stdout.write(json.dumps(schema, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse ``argv`` and run one command.

    :return: The process exit code.
    """
    args = build_parser().parse_args(argv)
    settings = Settings()
    logger.remove()
    logger.add(sys.stderr, level=settings.log_level.upper())
    configure_tracing(console=settings.otel_console)
    try:
        if args.command == "run":
            return command_run(args, settings)
        if args.command == "validate":
            return command_validate(args)
        if args.command == "list-scenarios":
            return command_list()
        if args.command == "check":
            return command_check(args)
        return command_schema()
    except ScenarioError as exc:
        return _report_scenario_error(exc)
    except MalformedTrace as exc:
        logger.error("{}", exc)
        return EXIT_INPUT
    except ExpectationMismatch as exc:
        logger.error("expectations not met: {}", exc)
        return EXIT_MISMATCH
    except (InvariantViolation, ReplayDivergence) as exc:
        logger.error("{}: {}", exc.reason, exc)
        return EXIT_INVARIANT
    except IoError as exc:
        logger.error("{}", exc)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())
