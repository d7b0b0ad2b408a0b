# pylint: disable-all
import json

import pytest

from microslice.config import SimulationConfig
from microslice.engine import OutcomeKind
from microslice.errors import ExpectationMismatch, IoError
from microslice.management import LifecycleEvent, LifecycleState
from microslice.runner import emit_report, render_report, render_summary, run_scenario
from microslice.scenario import LifecycleAction, load_bundled


def broken_expectation(name="closed_dep_a"):
    spec = load_bundled(name)
    expectation = spec.expectations[0].model_copy(update={"outcome": "rejected"})
    return spec.model_copy(update={"expectations": [expectation]})


def test_report_of_a_served_request():
    report, traces = run_scenario(load_bundled("closed_dep_a"))
    assert report.passed
    assert report.final_tick == 15
    assert report.teardown_restored is True
    [request] = report.requests
    assert request.outcome == "served"
    assert request.ticks_to_outcome == 15
    assert request.nf_units_consumed == 10
    assert request.events == len(traces[0].events) == 21
    peak = report.pool_peaks["L1"]
    assert (peak.peak_allocated_units, peak.total_units) == (10, 12)
    assert peak.peak_utilization == 0.8333


def test_report_counts_and_lifecycle():
    report, _ = run_scenario(load_bundled("public_open"))
    assert report.count(OutcomeKind.SERVED) == 1
    assert report.count(OutcomeKind.REJECTED) == 2
    assert report.count(OutcomeKind.FAILED) == 0
    assert [action.state for action in report.lifecycle] == [
        LifecycleState.SUPERVISED,
        LifecycleState.MODIFIED,
        LifecycleState.SUPERVISED,
        LifecycleState.DEACTIVATED,
        LifecycleState.TERMINATED,
    ]
    assert all(result.met for result in report.expectations)


def test_teardown_after_a_modify_action():
    spec = load_bundled("closed_dep_a")
    actions = [
        LifecycleAction(request_id="t1-s1", event=LifecycleEvent.SUPERVISE),
        LifecycleAction(request_id="t1-s1", event=LifecycleEvent.MODIFY),
    ]
    report, _ = run_scenario(spec.model_copy(update={"lifecycle": actions}))
    assert [action.state for action in report.lifecycle] == [
        LifecycleState.SUPERVISED,
        LifecycleState.MODIFIED,
    ]
    assert report.teardown_restored is True
    assert report.invariants.passed


def test_shared_nssi_reuse_is_counted():
    report, _ = run_scenario(load_bundled("mno_open"))
    assert report.shared_nssi_reuse == 3
    assert [request.nf_units_consumed for request in report.requests][1] == 0


def test_unmet_expectation_raises():
    mismatch = "expected rejected closed_dep_a type1, got served closed_dep_a type1"
    with pytest.raises(ExpectationMismatch, match=mismatch) as info:
        run_scenario(broken_expectation())
    assert info.value.request_ids == ["t1-s1"]
    assert info.value.reason == "expectation_mismatch"


def test_unmet_expectation_can_be_reported_only():
    report, _ = run_scenario(broken_expectation(), raise_on_mismatch=False)
    assert not report.passed
    [unmet] = report.unmet
    assert unmet.expected == "rejected closed_dep_a type1"
    assert unmet.actual == "served closed_dep_a type1"
    assert "expectations: 0/1 met" in render_summary(report)


def test_invariants_can_be_switched_off():
    config = SimulationConfig(check_invariants=False)
    report, _ = run_scenario(load_bundled("closed_dep_b"), config)
    assert report.invariants.evaluations == 0
    assert report.invariants.passed


def test_strict_threshold_changes_the_configuration_type():
    spec = load_bundled("mno_open")
    report, _ = run_scenario(spec, SimulationConfig(strict_latency_ms=30), raise_on_mismatch=False)
    served = [request for request in report.requests if request.outcome == "served"]
    assert [request.config_type.value for request in served] == ["type1", "type1"]
    assert report.shared_nssi_reuse == 0


def test_summary_text():
    report, _ = run_scenario(load_bundled("closed_dep_a"))
    lines = render_summary(report).splitlines()
    assert lines[0] == "scenario closed_dep_a"
    assert lines[1] == "requests 1: 1 served, 0 rejected, 0 failed"
    assert lines[3] == "t1-s1  closed_dep_a  type1  served  ticks=15  units=10"
    assert "pool L1: peak 10/12 units (83%)" in lines
    assert "teardown: pools restored" in lines


def test_report_json():
    report, _ = run_scenario(load_bundled("closed_dep_a"))
    data = json.loads(render_report(report))
    assert data["scenario"] == "closed_dep_a"
    assert data["requests"][0]["classification"] == "closed_dep_a"
    assert data["pool_peaks"]["L1"]["peak_utilization"] == 0.8333
    assert data["invariants"]["passed"] is True


def test_emit_report_writes_every_file(tmp_path):
    report, traces = run_scenario(load_bundled("closed_dep_b"))
    written = emit_report(report, traces, tmp_path / "run")
    names = [path.relative_to(tmp_path / "run").as_posix() for path in written]
    assert names == ["traces/t1-s1.trace", "traces/t2-s1.trace", "report.json", "summary.txt"]
    assert (tmp_path / "run" / "traces" / "t1-s1.trace").read_text() == traces[0].to_text()


def test_outputs_are_byte_identical_across_runs(tmp_path):
    for folder in ("first", "second"):
        report, traces = run_scenario(load_bundled("mixed_option_b"))
        emit_report(report, traces, tmp_path / folder)
    first = sorted((tmp_path / "first").rglob("*.*"))
    second = sorted((tmp_path / "second").rglob("*.*"))
    assert [path.name for path in first] == [path.name for path in second]
    for left, right in zip(first, second):
        assert left.read_bytes() == right.read_bytes()


def test_unwritable_output_directory(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    report, traces = run_scenario(load_bundled("closed_dep_a"))
    with pytest.raises(IoError, match="cannot write run outputs"):
        emit_report(report, traces, blocker)
