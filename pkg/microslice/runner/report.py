"""
Run outputs.

`emit_report` writes one directory per run:

    <out>/traces/<request_id>.trace   one trace file per request
    <out>/report.json                 the `RunReport`, keys sorted, two-space indent
    <out>/summary.txt                 the same, for humans

Every file is UTF-8 with LF endings and contains nothing that varies between equal runs,
so output trees can be compared byte for byte.
"""
import json
from pathlib import Path
from typing import List, Sequence, Union

from loguru import logger

from microslice.engine.trace import FormationTrace, OutcomeKind
from microslice.errors import IoError
from microslice.runner.run import RunReport


def render_summary(report: RunReport) -> str:
    lines = [
        f"scenario {report.scenario}",
        f"requests {len(report.requests)}: {report.count(OutcomeKind.SERVED)} served, "
        f"{report.count(OutcomeKind.REJECTED)} rejected, "
        f"{report.count(OutcomeKind.FAILED)} failed",
        "",
    ]
    for request in report.requests:
        lines.append(
            "  ".join(
                [
                    request.request_id,
                    request.classification.value if request.classification else "-",
                    request.config_type.value if request.config_type else "-",
                    request.outcome,
                    f"ticks={request.ticks_to_outcome}",
                    f"units={request.nf_units_consumed}",
                ]
            )
        )
    lines.append("")
    for peak in report.pool_peaks.values():
        lines.append(
            f"pool {peak.pool_id}: peak {peak.peak_allocated_units}/{peak.total_units} units "
            f"({peak.peak_utilization:.0%})"
        )
    lines.append(f"shared NSSI reuse: {report.shared_nssi_reuse}")
    for action in report.lifecycle:
        result = action.state.value if action.state else f"refused ({action.error})"
        lines.append(f"lifecycle {action.request_id} {action.event.value}: {result}")
    if report.teardown_restored is not None:
        restored = "restored" if report.teardown_restored else "NOT restored"
        lines.append(f"teardown: pools {restored}")
    verdict = "passed" if report.invariants.passed else "FAILED"
    lines.append(f"invariants: {verdict} ({report.invariants.evaluations} evaluations)")
    if report.expectations:
        unmet = report.unmet
        lines.append(
            f"expectations: {len(report.expectations) - len(unmet)}/{len(report.expectations)} met"
        )
        for result in unmet:
            lines.append(f"  {result.request_id}: expected {result.expected}, got {result.actual}")
    return "\n".join(lines) + "\n"


def render_report(report: RunReport) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def emit_report(
    report: RunReport, traces: Sequence[FormationTrace], out_dir: Union[str, Path]
) -> List[Path]:
    """
    Write the outputs of a run.

    :return: The written files, trace files first.
    :raises IoError: If a directory or file cannot be written.
    """
    root = Path(out_dir)
    try:
        trace_dir = root / "traces"
        trace_dir.mkdir(parents=True, exist_ok=True)
        written = [
            _write(trace_dir / f"{trace.request_id}.trace", trace.to_text()) for trace in traces
        ]
        written.append(_write(root / "report.json", render_report(report)))
        written.append(_write(root / "summary.txt", render_summary(report)))
    except OSError as exc:
        raise IoError(f"cannot write run outputs to {root}: {exc}") from None
    logger.info("wrote {} files to {}", len(written), root)
    return written
