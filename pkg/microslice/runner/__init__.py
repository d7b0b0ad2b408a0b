"""
Whole-scenario runs and the ``micro-slice`` command line.

- `run_scenario`: executes a scenario and returns a `RunReport` with the traces.
- `emit_report`: writes traces, ``report.json`` and ``summary.txt``.
- `main`: the command line entry point.
"""
from microslice.runner.cli import main
from microslice.runner.report import emit_report, render_report, render_summary
from microslice.runner.run import (
    ExpectationResult,
    PoolPeak,
    RequestReport,
    RunReport,
    run_scenario,
)


__all__ = [
    "ExpectationResult",
    "PoolPeak",
    "RequestReport",
    "RunReport",
    "emit_report",
    "main",
    "render_report",
    "render_summary",
    "run_scenario",
]
