# pylint: disable-all
import pytest
from pydantic import ValidationError

from microslice.engine.steps import Step
from microslice.engine.trace import (
    FormationTrace,
    Outcome,
    OutcomeKind,
    TraceEvent,
    TraceRecorder,
    encode_value,
)
from microslice.errors import MalformedTrace
from microslice.management.base import Actor


@pytest.mark.parametrize(
    "value, encoded",
    [(True, "true"), (False, "false"), (3, "3"), ("L1", "L1"), (["a", "b"], "a,b"), ([], "")],
)
def test_encode_value(value, encoded):
    assert encode_value(value) == encoded


def test_event_line_sorts_payload_keys():
    event = TraceEvent(
        seq_no=3,
        tick=2,
        step=Step.REQUEST_ROUTING,
        request_id="t1-s1",
        actor=Actor.COMM_SERVICE_PROVIDER,
        payload={"scenario": "closed_dep_a", "extra": "x"},
    )
    assert event.to_line() == "3 2 2 t1-s1 comm_service_provider extra=x scenario=closed_dep_a"
    assert TraceEvent.from_line(event.to_line()) == event


def test_payload_must_fit_on_one_line():
    with pytest.raises(ValidationError):
        TraceEvent(
            seq_no=0,
            tick=0,
            step=Step.UE_WAITING,
            request_id="t1-s1",
            actor=Actor.UE,
            payload={"tenant": "two words"},
        )


@pytest.mark.parametrize(
    "line",
    [
        "0 0 0 t1-s1",
        "x 0 0 t1-s1 ue",
        "0 0 16 t1-s1 ue",
        "0 0 0 t1-s1 robot",
        "0 0 0 t1-s1 ue tenant",
        "0 0 0 t1-s1 ue =t1",
    ],
)
def test_malformed_lines(line):
    with pytest.raises(MalformedTrace):
        TraceEvent.from_line(line, 2)


def test_outcomes():
    assert str(Outcome.served()) == "served"
    assert str(Outcome.rejected("expired")) == "rejected:expired"
    assert Outcome.parse("failed:mno_unreachable") == Outcome.failed("mno_unreachable")
    assert Outcome.rejected("expired").matches("rejected")
    assert Outcome.rejected("expired").matches("rejected:expired")
    assert not Outcome.rejected("expired").matches("rejected:charging")
    assert not Outcome.served().matches("failed")
    with pytest.raises(MalformedTrace):
        Outcome.parse("postponed")


def test_recorder_numbers_events_and_freezes():
    recorder = TraceRecorder("t1-s1")
    recorder.append(Step.UE_WAITING, 0, Actor.UE, {"tenant": "t1", "ignored": None})
    recorder.append(Step.SLICE_REQUEST, 1, Actor.TENANT, {"locations": ["L1", "L2"]})
    assert recorder.emitted(Step.SLICE_REQUEST)
    assert not recorder.emitted(Step.APPROVAL)
    trace = recorder.finish(Outcome.served())
    assert [event.seq_no for event in trace.events] == [0, 1]
    assert trace.events[0].payload == {"tenant": "t1"}
    assert trace.events[1].get_list("locations") == ["L1", "L2"]
    assert trace.ticks_to_outcome == 2
    assert trace.max_step is Step.SLICE_REQUEST
    with pytest.raises(MalformedTrace):
        recorder.append(Step.REQUEST_ROUTING, 2, Actor.COMM_SERVICE_PROVIDER, {})


def test_trace_text_round_trip():
    recorder = TraceRecorder("t1-s1")
    recorder.append(Step.UE_WAITING, 0, Actor.UE, {"tenant": "t1"})
    trace = recorder.finish(Outcome.rejected("malformed"))
    text = trace.to_text()
    assert text == "#trace request_id=t1-s1 outcome=rejected:malformed\n0 0 0 t1-s1 ue tenant=t1\n"
    parsed = FormationTrace.from_text(text)
    assert parsed == trace
    assert parsed.outcome.kind is OutcomeKind.REJECTED


@pytest.mark.parametrize(
    "text",
    [
        "",
        "0 0 0 t1-s1 ue\n",
        "#trace request_id=t1-s1\n",
        "#trace request_id=t1-s1 outcome=served\n0 0 0 t2-s1 ue\n",
    ],
)
def test_malformed_traces(text):
    with pytest.raises(MalformedTrace):
        FormationTrace.from_text(text)
