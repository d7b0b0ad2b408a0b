"""
Conformance checking of formation traces.

`validate_trace` checks a trace on its own, without the engine that produced it:

- ordering: every event of a step comes after every event of the steps it depends on;
- numbering: ``seq_no`` strictly increases and ``tick`` never decreases;
- outcome rules: a served trace holds every mandatory step, a rejected trace never reaches
  step 5, and nothing is provisioned before the approval;
- step 6 rules: step 6 appears iff MNO NSSIs were drawn, so never for closed deployment A,
  the open scenarios and mixed option B, and always for a served mixed option A trace.
"""
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict

from microslice.engine.steps import SERVED_STEPS, Step, StepDependencyGraph
from microslice.engine.trace import FormationTrace, OutcomeKind
from microslice.management.base import Actor
from microslice.management.models import DeploymentScenario

NO_MNO_NSSI = frozenset(
    {
        DeploymentScenario.CLOSED_DEP_A,
        DeploymentScenario.MNO_OPEN,
        DeploymentScenario.PUBLIC_OPEN,
        DeploymentScenario.MIXED_OPTION_B,
    }
)


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    rule: str
    message: str
    event_index: Optional[int] = None


class ConformanceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    request_id: str
    violations: List[Violation] = []

    @property
    def conformant(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.conformant:
            return f"{self.request_id}: conformant"
        lines = [f"{self.request_id}: {len(self.violations)} violation(s)"]
        for violation in self.violations:
            where = "" if violation.event_index is None else f" at event {violation.event_index}"
            lines.append(f"  {violation.rule}{where}: {violation.message}")
        return "\n".join(lines)


def _scenario_of(trace: FormationTrace) -> Optional[DeploymentScenario]:
    for event in trace.events_at(Step.REQUEST_ROUTING):
        if "scenario" in event.payload:
            try:
                return DeploymentScenario(event.payload["scenario"])
            except ValueError:
                return None
    return None


def validate_trace(
    trace: FormationTrace,
    scenario_kind: Optional[DeploymentScenario] = None,
    graph: Optional[StepDependencyGraph] = None,
) -> ConformanceReport:
    """
    Check one trace against the formation sequence rules.

    :param scenario_kind: The scenario the trace should follow; defaults to the one
        recorded at step 2.
    :return: A report, conformant when no rule is broken.
    """
    graph = graph or StepDependencyGraph()
    violations: List[Violation] = []
    events = trace.events

    for index in range(1, len(events)):
        if events[index].seq_no <= events[index - 1].seq_no:
            violations.append(
                Violation(
                    rule="seq_order",
                    message=f"seq_no {events[index].seq_no} after {events[index - 1].seq_no}",
                    event_index=index,
                )
            )
        if events[index].tick < events[index - 1].tick:
            violations.append(
                Violation(
                    rule="tick_order",
                    message=f"tick {events[index].tick} after {events[index - 1].tick}",
                    event_index=index,
                )
            )

    first: Dict[Step, int] = {}
    last: Dict[Step, int] = {}
    for index, event in enumerate(events):
        first.setdefault(event.step, index)
        last[event.step] = index
    for earlier, later in graph.ordered_pairs(set(first)):
        if last[earlier] > first[later]:
            violations.append(
                Violation(
                    rule="edge",
                    message=f"step {later.value} before step {earlier.value} "
                    f"(edge {earlier.value}->{later.value} broken)",
                    event_index=first[later],
                )
            )

    provisioning = [
        index for index, event in enumerate(events) if event.step >= Step.UO_NSSI_REQUEST
    ]
    if provisioning and (Step.APPROVAL not in last or provisioning[0] < last[Step.APPROVAL]):
        violations.append(
            Violation(
                rule="approval_order",
                message="provisioning event without a preceding approval",
                event_index=provisioning[0],
            )
        )

    kind = trace.outcome.kind
    if kind is OutcomeKind.SERVED:
        missing = sorted(SERVED_STEPS - set(first))
        if missing:
            violations.append(
                Violation(
                    rule="missing_step",
                    message=f"served trace lacks steps {[step.value for step in missing]}",
                )
            )
    elif kind is OutcomeKind.REJECTED and provisioning:
        violations.append(
            Violation(
                rule="rejected_progress",
                message="rejected trace reaches step 5 or later",
                event_index=provisioning[0],
            )
        )

    recorded = _scenario_of(trace)
    scenario = scenario_kind or recorded
    if scenario_kind is not None and recorded is not None and recorded is not scenario_kind:
        violations.append(
            Violation(
                rule="scenario_mismatch",
                message=f"trace was routed as {recorded.value}, expected {scenario_kind.value}",
                event_index=first.get(Step.REQUEST_ROUTING),
            )
        )
    has_step6 = Step.MNO_NSSI_REQUEST in first
    if scenario in NO_MNO_NSSI and has_step6:
        violations.append(
            Violation(
                rule="step6_forbidden",
                message=f"{scenario.value} never draws MNO NSSIs",
                event_index=first[Step.MNO_NSSI_REQUEST],
            )
        )
    if kind is OutcomeKind.SERVED:
        if scenario is DeploymentScenario.MIXED_OPTION_A and not has_step6:
            violations.append(
                Violation(rule="step6_missing", message="mixed option A draws an MNO NSSI")
            )
        composed = [
            event
            for event in trace.events_at(Step.NSI_COMPOSITION)
            if event.actor is Actor.NSMF
        ]
        external = any(event.payload.get("external") == "true" for event in composed)
        if composed and external != has_step6:
            violations.append(
                Violation(
                    rule="step6_mismatch",
                    message=(
                        "step 6 present without MNO NSSIs"
                        if has_step6
                        else "MNO NSSIs drawn without step 6"
                    ),
                    event_index=first.get(Step.MNO_NSSI_REQUEST),
                )
            )

    return ConformanceReport(request_id=trace.request_id, violations=violations)
