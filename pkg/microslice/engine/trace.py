"""
Formation traces and their line format.

A trace file starts with a header line and holds one event per line:

    #trace request_id=t1-s1 outcome=served
    0 0 0 t1-s1 ue tenant=t1
    1 1 1 t1-s1 tenant home=L1 locations=L1 tenant=t1

Fields are ``seq_no tick step request_id actor`` followed by the payload as ``key=value``
pairs in key order. List values are comma-joined. Files are UTF-8 with LF line endings, so
equal runs give byte-identical files.
"""
import re
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from microslice.engine.steps import Step
from microslice.errors import MalformedTrace
from microslice.inventory.domain import Identifier
from microslice.management.base import Actor

# None values are left out of the payload.
PayloadValue = Union[str, int, bool, Sequence[str], None]

_TOKEN = re.compile(r"^[^\s=]+$")
_VALUE = re.compile(r"^[^\s]*$")


def encode_value(value: PayloadValue) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (str, int)):
        return str(value)
    return ",".join(str(item) for item in value)


class OutcomeKind(str, Enum):
    SERVED = "served"
    REJECTED = "rejected"
    FAILED = "failed"


class Outcome(BaseModel):
    """``served``, ``rejected:<reason>`` or ``failed:<reason>``."""

    model_config = ConfigDict(frozen=True)

    kind: OutcomeKind
    reason: Optional[str] = None

    def __str__(self) -> str:
        return self.kind.value if self.reason is None else f"{self.kind.value}:{self.reason}"

    @classmethod
    def served(cls) -> "Outcome":
        return cls(kind=OutcomeKind.SERVED)

    @classmethod
    def rejected(cls, reason: str) -> "Outcome":
        return cls(kind=OutcomeKind.REJECTED, reason=reason)

    @classmethod
    def failed(cls, reason: str) -> "Outcome":
        return cls(kind=OutcomeKind.FAILED, reason=reason)

    @classmethod
    def parse(cls, text: str) -> "Outcome":
        kind, _, reason = text.partition(":")
        try:
            return cls(kind=OutcomeKind(kind), reason=reason or None)
        except ValueError:
            raise MalformedTrace(f"unknown outcome {text!r}") from None

    def matches(self, expected: str) -> bool:
        """``rejected`` matches any rejection; ``rejected:expired`` only that one."""
        return str(self) == expected or (":" not in expected and self.kind.value == expected)


class TraceEvent(BaseModel):
    """One event of a formation trace; payload values are kept in their encoded form."""

    model_config = ConfigDict(frozen=True)

    seq_no: int = Field(ge=0)
    tick: int = Field(ge=0)
    step: Step
    request_id: Identifier
    actor: Actor
    payload: Dict[str, str] = {}

    @field_validator("payload")
    @classmethod
    def _check_payload(cls, payload: Dict[str, str]) -> Dict[str, str]:
        for key, value in payload.items():
            if not _TOKEN.match(key) or not _VALUE.match(value):
                raise ValueError(f"payload entry {key}={value!r} cannot be written on one line")
        return payload

    def get_list(self, key: str) -> List[str]:
        value = self.payload.get(key, "")
        return value.split(",") if value else []

    def to_line(self) -> str:
        fields = [
            str(self.seq_no),
            str(self.tick),
            str(self.step.value),
            self.request_id,
            self.actor.value,
        ]
        fields.extend(f"{key}={self.payload[key]}" for key in sorted(self.payload))
        return " ".join(fields)

    @classmethod
    def from_line(cls, line: str, line_no: int = 0) -> "TraceEvent":
        parts = line.split(" ")
        if len(parts) < 5:
            raise MalformedTrace(f"line {line_no}: expected at least 5 fields, got {len(parts)}")
        seq_no, tick, step, request_id, actor, *pairs = parts
        payload: Dict[str, str] = {}
        for pair in pairs:
            key, sep, value = pair.partition("=")
            if not sep or not key:
                raise MalformedTrace(f"line {line_no}: bad payload entry {pair!r}")
            payload[key] = value
        try:
            return cls(
                seq_no=int(seq_no),
                tick=int(tick),
                step=Step(int(step)),
                request_id=request_id,
                actor=Actor(actor),
                payload=payload,
            )
        except (ValueError, ValidationError) as exc:
            raise MalformedTrace(f"line {line_no}: {exc}") from None


class FormationTrace(BaseModel):
    """The immutable event log of one request's formation sequence."""

    model_config = ConfigDict(frozen=True)

    request_id: Identifier
    events: Tuple[TraceEvent, ...]
    outcome: Outcome

    @property
    def steps(self) -> List[Step]:
        return [event.step for event in self.events]

    def events_at(self, step: Step) -> List[TraceEvent]:
        return [event for event in self.events if event.step is step]

    @property
    def max_step(self) -> Optional[Step]:
        return max(self.steps) if self.events else None

    @property
    def ticks_to_outcome(self) -> int:
        """Ticks spanned by the trace, counting the first and last tick."""
        if not self.events:
            return 0
        return self.events[-1].tick - self.events[0].tick + 1

    def to_text(self) -> str:
        lines = [f"#trace request_id={self.request_id} outcome={self.outcome}"]
        lines.extend(event.to_line() for event in self.events)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FormationTrace":
        """
        Parse a trace file.

        :raises MalformedTrace: On a missing header, an unparseable line or events of
            another request.
        """
        lines = [line.rstrip("\r") for line in text.split("\n")]
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or not lines[0].startswith("#trace "):
            raise MalformedTrace("missing '#trace' header")
        header: Dict[str, str] = {}
        for pair in lines[0].split(" ")[1:]:
            key, _, value = pair.partition("=")
            header[key] = value
        if "request_id" not in header or "outcome" not in header:
            raise MalformedTrace("header needs request_id and outcome")
        events = tuple(
            TraceEvent.from_line(line, line_no)
            for line_no, line in enumerate(lines[1:], start=2)
        )
        for event in events:
            if event.request_id != header["request_id"]:
                raise MalformedTrace(
                    f"event {event.seq_no} belongs to {event.request_id}, "
                    f"not {header['request_id']}"
                )
        try:
            return cls(
                request_id=header["request_id"],
                events=events,
                outcome=Outcome.parse(header["outcome"]),
            )
        except ValidationError as exc:
            raise MalformedTrace(str(exc)) from None


class TraceRecorder:
    """Append-only builder for one trace; `finish` freezes it."""

    def __init__(self, request_id: str):
        self.request_id = request_id
        self._events: List[TraceEvent] = []
        self._finished = False

    @property
    def events(self) -> Sequence[TraceEvent]:
        return tuple(self._events)

    def append(
        self, step: Step, tick: int, actor: Actor, payload: Dict[str, PayloadValue]
    ) -> TraceEvent:
        if self._finished:
            raise MalformedTrace(f"trace of {self.request_id} is already finished")
        event = TraceEvent(
            seq_no=len(self._events),
            tick=tick,
            step=step,
            request_id=self.request_id,
            actor=actor,
            payload={
                key: encode_value(value) for key, value in payload.items() if value is not None
            },
        )
        self._events.append(event)
        return event

    def emitted(self, step: Step) -> bool:
        return any(event.step is step for event in self._events)

    def finish(self, outcome: Outcome) -> FormationTrace:
        self._finished = True
        return FormationTrace(
            request_id=self.request_id, events=tuple(self._events), outcome=outcome
        )


def traces_by_id(traces: Iterable[FormationTrace]) -> Dict[str, FormationTrace]:
    return {trace.request_id: trace for trace in traces}
