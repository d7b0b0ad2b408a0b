# pylint: disable-all
from pathlib import Path

import pytest

from microslice.engine import (
    FormationEngine,
    InvariantSuite,
    OutcomeKind,
    Step,
    World,
    validate_trace,
)
from microslice.engine.trace import FormationTrace
from microslice.management import (
    LifecycleEvent,
    LifecycleState,
    NsiConfigType,
    ServiceStatus,
)
from microslice.scenario import LifecycleAction, list_bundled, load_bundled

GOLDEN = Path(__file__).parent.parent / "golden"


def build(name):
    spec = load_bundled(name)
    world = World.from_scenario(spec)
    engine = FormationEngine(world, hooks=[InvariantSuite(world)])
    return spec, world, engine


def run_all(name):
    spec, world, engine = build(name)
    traces = [engine.run_formation_sequence(raw) for raw in spec.requests]
    return spec, world, engine, traces


@pytest.mark.parametrize("name", ["closed_dep_a", "closed_dep_b"])
def test_golden_traces(name):
    _, _, _, traces = run_all(name)
    expected = (GOLDEN / f"{name}.trace").read_text(encoding="utf-8")
    assert traces[0].to_text() == expected


@pytest.mark.parametrize("name", list_bundled())
def test_bundled_scenarios_meet_expectations(name):
    spec, _, engine, traces = run_all(name)
    for trace in traces:
        result = engine.results[trace.request_id]
        assert validate_trace(trace, result.scenario, engine.graph).conformant
    for expectation in spec.expectations:
        result = engine.results[expectation.request_id]
        assert result.trace.outcome.matches(expectation.outcome), expectation.request_id
        if expectation.classification is not None:
            assert result.scenario is expectation.classification
        if expectation.config_type is not None:
            assert result.config_type is expectation.config_type


def test_clock_keeps_running_across_requests():
    _, _, engine, traces = run_all("closed_dep_b")
    assert traces[0].events[-1].tick == 15
    assert traces[1].events[0].tick == 16
    assert engine.clock == traces[1].events[-1].tick + 1


def test_served_trace_metrics():
    _, _, engine, traces = run_all("closed_dep_a")
    result = engine.results["t1-s1"]
    assert traces[0].ticks_to_outcome == 15
    # nf1 (2 units), nf3 (4) and nf4 (4)
    assert result.nf_units_consumed == 10


def test_rejections_stop_at_the_failing_step():
    _, world, engine, traces = run_all("public_open")
    by_id = {trace.request_id: trace for trace in traces}
    assert by_id["t2-s1"].max_step is Step.APPROVAL
    assert by_id["t3-s1"].events_at(Step.APPROVAL)[0].payload["reason"] == "no_agreement"
    assert sorted(world.provider.decisions) == ["t1-s1", "t2-s1", "t3-s1"]
    assert world.nsis_of("t2-s1") == []


def test_mno_failure_rolls_back_micro_operator_nssis():
    _, world, engine, traces = run_all("mixed_option_a")
    failed = traces[1]
    assert str(failed.outcome) == "failed:mno_unreachable"
    assert failed.max_step is Step.MNO_NSSI_REQUEST
    [event] = failed.events_at(Step.MNO_NSSI_REQUEST)
    assert event.actor.value == "mno_nssmf"
    assert event.payload["verdict"] == "failed"
    modes = [event.payload["mode"] for event in failed.events_at(Step.UO_NSSI_REQUEST)]
    assert modes == ["provisioned", "provisioned"]
    live = [nssi.id for nssi in world.live_nssis()]
    assert live == ["nssi-uo-001", "nssi-uo-002", "nssi-mno1-001"]
    assert engine.results["t2-s1"].nf_units_consumed == 0


def test_mixed_option_b_forms_two_nsis():
    _, world, engine, traces = run_all("mixed_option_b")
    trace = traces[0]
    assert trace.outcome.kind is OutcomeKind.SERVED
    composed = trace.events_at(Step.NSI_COMPOSITION)
    assert [event.actor.value for event in composed] == ["nsmf", "mno_nsmf"]
    assert composed[1].payload["nsi"] == "nsi-t1-s1-mno1"
    assert Step.MNO_NSSI_REQUEST not in trace.steps
    service = world.csmf.service_for("t1-s1")
    assert service.nsi_ids == ["nsi-t1-s1", "nsi-t1-s1-mno1"]
    assert service.owner_domains == ["uo", "mno1"]
    assert engine.results["t1-s1"].config_type is NsiConfigType.TYPE1


def test_shared_nssis_in_mno_open():
    _, world, engine, traces = run_all("mno_open")
    second = traces[1]
    modes = [event.payload["mode"] for event in second.events_at(Step.UO_NSSI_REQUEST)]
    assert modes == ["attached", "attached", "attached"]
    refs = [event.payload["refs"] for event in second.events_at(Step.NSSI_PROVIDED)]
    assert refs == ["2", "2", "2"]
    assert engine.results["t2-s1"].nf_units_consumed == 0
    assert world.nsmf.shared_attachments == 3


def test_malformed_request_ends_at_step_one():
    spec, world, engine = build("closed_dep_a")
    trace = engine.run_formation_sequence(
        {**spec.requests[0], "tenant_slice_id": "bad", "home_location": "L9"}
    )
    assert str(trace.outcome) == "rejected:malformed"
    assert trace.max_step is Step.SLICE_REQUEST
    assert trace.events[1].payload["verdict"] == "malformed"
    assert "home_location" in trace.events[1].get_list("fields")
    assert world.provider.decisions == {}


def test_requests_without_usable_id_get_one():
    _, _, engine = build("closed_dep_a")
    trace = engine.run_formation_sequence({"tenant_id": "t1"})
    assert trace.request_id == "req-001"
    assert trace.outcome.kind is OutcomeKind.REJECTED


def test_duplicate_request_ids_are_rejected():
    spec, _, engine = build("closed_dep_a")
    engine.run_formation_sequence(spec.requests[0])
    again = engine.run_formation_sequence(spec.requests[0])
    assert again.request_id == "req-001"
    assert str(again.outcome) == "rejected:malformed"


def test_unclassifiable_request_ends_at_step_two():
    spec, _, engine = build("closed_dep_a")
    trace = engine.run_formation_sequence({**spec.requests[0], "network_mode": "open"})
    assert str(trace.outcome) == "rejected:unclassifiable"
    assert trace.max_step is Step.REQUEST_ROUTING


def test_insufficient_resources_fail_the_request():
    spec, world, engine = build("closed_dep_a")
    trace = engine.run_formation_sequence({**spec.requests[0], "throughput_units": 9})
    assert str(trace.outcome) == "failed:insufficient_resources"
    assert trace.max_step is Step.NF_ALLOCATION
    assert len(trace.events_at(Step.UO_NSSI_REQUEST)) == 3
    [event] = trace.events_at(Step.NF_ALLOCATION)
    assert event.payload["verdict"] == "failed"
    assert world.live_nssis() == []
    assert world.snapshots() == World.from_scenario(spec).snapshots()


def test_lifecycle_actions_and_teardown():
    spec, world, engine, _ = run_all("public_open")
    results = engine.apply_actions(spec.lifecycle)
    assert [result.state for result in results] == [
        LifecycleState.SUPERVISED,
        LifecycleState.MODIFIED,
        LifecycleState.SUPERVISED,
        LifecycleState.DEACTIVATED,
        LifecycleState.TERMINATED,
    ]
    assert world.csmf.service_for("t1-s1").status is ServiceStatus.TERMINATED
    initial = World.from_scenario(spec).snapshots()
    assert world.snapshots() == initial
    assert engine.teardown() == []


def test_illegal_lifecycle_action_is_reported():
    spec, world, engine, _ = run_all("closed_dep_a")
    results = engine.apply_actions(
        [
            LifecycleAction(request_id="t1-s1", event=LifecycleEvent.TERMINATE),
            LifecycleAction(request_id="t9-s9", event=LifecycleEvent.SUPERVISE),
            LifecycleAction(request_id="t1-s1", event=LifecycleEvent.SUPERVISE),
        ]
    )
    assert [result.error for result in results] == [
        "invalid_transition",
        "contract_violation",
        None,
    ]
    assert world.nsis_of("t1-s1")[0].state is LifecycleState.SUPERVISED


def test_teardown_restores_every_pool():
    spec, world, engine, _ = run_all("closed_dep_b")
    reports = engine.teardown()
    assert [report.nsi_id for report in reports] == ["nsi-t1-s1", "nsi-t2-s1"]
    assert world.snapshots() == World.from_scenario(spec).snapshots()
    assert all(not service.active for service in world.csmf.services.values())


def test_teardown_of_a_modified_nsi():
    spec, world, engine, _ = run_all("closed_dep_a")
    engine.apply_actions(
        [
            LifecycleAction(request_id="t1-s1", event=LifecycleEvent.SUPERVISE),
            LifecycleAction(request_id="t1-s1", event=LifecycleEvent.MODIFY),
        ]
    )
    [nsi] = world.nsis_of("t1-s1")
    assert nsi.state is LifecycleState.MODIFIED
    [report] = engine.teardown()
    assert report.nsi_id == "nsi-t1-s1"
    assert nsi.state is LifecycleState.TERMINATED
    assert nsi.history[-4:] == [
        LifecycleState.MODIFIED,
        LifecycleState.SUPERVISED,
        LifecycleState.DEACTIVATED,
        LifecycleState.TERMINATED,
    ]
    assert world.snapshots() == World.from_scenario(spec).snapshots()


def test_traces_parse_back(tmp_path):
    _, _, _, traces = run_all("mno_open")
    for trace in traces:
        path = tmp_path / f"{trace.request_id}.trace"
        path.write_text(trace.to_text(), encoding="utf-8")
        assert FormationTrace.from_text(path.read_text(encoding="utf-8")) == trace


def consumed_by_first_two(latency_ms):
    spec = load_bundled("mno_open")
    engine = FormationEngine(World.from_scenario(spec))
    for raw in spec.requests[:2]:
        engine.run_formation_sequence({**raw, "latency_ms": latency_ms})
    return [engine.results[raw["tenant_slice_id"]] for raw in spec.requests[:2]]


def test_sharing_economics():
    shared = consumed_by_first_two(latency_ms=20)
    assert [result.config_type for result in shared] == [NsiConfigType.TYPE2] * 2
    single = shared[0].nf_units_consumed
    assert sum(result.nf_units_consumed for result in shared) < 2 * single

    isolated = consumed_by_first_two(latency_ms=5)
    assert [result.config_type for result in isolated] == [NsiConfigType.TYPE1] * 2
    assert isolated[0].nf_units_consumed == isolated[1].nf_units_consumed
    assert sum(result.nf_units_consumed for result in isolated) == 2 * single


@pytest.mark.parametrize("name", list_bundled())
def test_refused_approval_allocates_nothing(name):
    spec = load_bundled(name)
    expired = [
        agreement.model_copy(update={"valid_until_tick": 0}) for agreement in spec.agreements
    ]
    spec = spec.model_copy(update={"agreements": expired})
    world = World.from_scenario(spec)
    engine = FormationEngine(world, hooks=[InvariantSuite(world)])
    initial = world.snapshots()
    for raw in spec.requests:
        trace = engine.run_formation_sequence(raw)
        assert trace.outcome.kind is OutcomeKind.REJECTED
        assert trace.max_step is Step.APPROVAL
        assert world.snapshots() == initial
    assert world.nsis() == []


def test_mixed_option_a_composes_one_nsi_over_two_domains():
    _, world, _, traces = run_all("mixed_option_a")
    assert traces[0].outcome.kind is OutcomeKind.SERVED
    [nsi] = world.nsis()
    assert set(nsi.constituent_domains) == {"uo", "mno1"}
    assert len(world.csmf.services) == 1


def test_mixed_option_b_delivers_one_service_of_two_domains():
    _, world, _, _ = run_all("mixed_option_b")
    [service] = world.csmf.services.values()
    assert len(service.nsi_ids) == 2
    assert len(set(service.owner_domains)) == 2
