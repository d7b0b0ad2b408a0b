"""
This module runs a whole scenario.

`run_scenario` builds the world of a scenario, takes every request through the formation
sequence in file order, applies the scripted lifecycle actions and the optional teardown,
and condenses the result into a `RunReport`. The invariant suite runs after every event,
every engine trace is checked with `validate_trace`, and expectations recorded in the
scenario are compared with what actually happened.
"""
from typing import Dict, List, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, ConfigDict, computed_field

from microslice.config import SimulationConfig
from microslice.engine.invariants import InvariantSuite, InvariantSummary
from microslice.engine.sequence import (
    EventHook,
    FormationEngine,
    FormationResult,
    LifecycleResult,
)
from microslice.engine.trace import FormationTrace, OutcomeKind, TraceEvent
from microslice.engine.validator import validate_trace
from microslice.engine.world import World
from microslice.errors import ExpectationMismatch, InvariantViolation
from microslice.management.models import DeploymentScenario, NsiConfigType
from microslice.scenario.schema import Expectation, ScenarioSpec
from microslice.scenario.synthetic import scenario_requests


class RequestReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    request_id: str
    classification: Optional[DeploymentScenario] = None
    config_type: Optional[NsiConfigType] = None
    outcome: str
    ticks_to_outcome: int
    nf_units_consumed: int
    events: int


class ExpectationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    request_id: str
    expected: str
    actual: str
    met: bool


class PoolPeak(BaseModel):
    """Highest allocation a pool reached during the run."""

    model_config = ConfigDict(frozen=True)

    pool_id: str
    total_units: int
    peak_allocated_units: int

    @computed_field  # type: ignore[prop-decorator]
    @property
    def peak_utilization(self) -> float:
        if not self.total_units:
            return 0.0
        return round(self.peak_allocated_units / self.total_units, 4)


class RunReport(BaseModel):
    """
    Everything a run produced except the traces themselves.

    Attributes:
        requests (List[RequestReport]): One entry per request, in execution order.
        pool_peaks (Dict[str, PoolPeak]): Peak allocation per pool.
        shared_nssi_reuse (int): How many times an NSI attached to an existing shared NSSI.
        invariants (InvariantSummary): Checks run and whether the final state passes.
        teardown_restored (Optional[bool]): Whether every pool was back at its initial state
            after teardown; ``None`` without teardown.
        final_state (str): `World.state_fingerprint` once the run is over, for replay.
    """

    scenario: str
    requests: List[RequestReport]
    expectations: List[ExpectationResult] = []
    lifecycle: List[LifecycleResult] = []
    pool_peaks: Dict[str, PoolPeak]
    shared_nssi_reuse: int
    invariants: InvariantSummary
    teardown_restored: Optional[bool] = None
    final_tick: int
    final_state: str = ""

    @property
    def unmet(self) -> List[ExpectationResult]:
        return [result for result in self.expectations if not result.met]

    @property
    def passed(self) -> bool:
        return not self.unmet and self.invariants.passed

    def count(self, kind: OutcomeKind) -> int:
        return sum(
            1 for request in self.requests if request.outcome.split(":")[0] == kind.value
        )

    def raise_for_expectations(self) -> None:
        """:raises ExpectationMismatch: Naming every request whose expectation failed."""
        unmet = self.unmet
        if unmet:
            details = ", ".join(
                f"{result.request_id} (expected {result.expected}, got {result.actual})"
                for result in unmet
            )
            raise ExpectationMismatch(
                f"{self.scenario}: {details}", [result.request_id for result in unmet]
            )


class PeakTracker:
    """Engine hook recording the highest allocated units of every pool."""

    def __init__(self, world: World):
        self.world = world
        self.peaks: Dict[str, int] = {pool.pool_id: 0 for pool in world.all_pools()}
        self.update()

    def update(self) -> None:
        for pool_id, snapshot in self.world.snapshots().items():
            self.peaks[pool_id] = max(self.peaks.get(pool_id, 0), snapshot.allocated_units)

    def __call__(self, event: TraceEvent) -> None:
        self.update()

    def report(self) -> Dict[str, PoolPeak]:
        totals = {
            pool_id: sum(acc.total_units for acc in snapshot.subnets.values())
            for pool_id, snapshot in self.world.snapshots().items()
        }
        return {
            pool_id: PoolPeak(
                pool_id=pool_id, total_units=totals[pool_id], peak_allocated_units=peak
            )
            for pool_id, peak in sorted(self.peaks.items())
        }


def check_expectation(
    expectation: Expectation, result: Optional[FormationResult]
) -> ExpectationResult:
    expected = [expectation.outcome]
    if expectation.classification is not None:
        expected.append(expectation.classification.value)
    if expectation.config_type is not None:
        expected.append(expectation.config_type.value)
    if result is None:
        return ExpectationResult(
            request_id=expectation.request_id,
            expected=" ".join(expected),
            actual="<not run>",
            met=False,
        )
    actual = [str(result.trace.outcome)]
    met = result.trace.outcome.matches(expectation.outcome)
    if expectation.classification is not None:
        actual.append(result.scenario.value if result.scenario else "-")
        met = met and result.scenario is expectation.classification
    if expectation.config_type is not None:
        actual.append(result.config_type.value if result.config_type else "-")
        met = met and result.config_type is expectation.config_type
    return ExpectationResult(
        request_id=expectation.request_id,
        expected=" ".join(expected),
        actual=" ".join(actual),
        met=met,
    )


def run_scenario(
    spec: ScenarioSpec,
    config: Optional[SimulationConfig] = None,
    raise_on_mismatch: bool = True,
) -> Tuple[RunReport, List[FormationTrace]]:
    """
    Execute a scenario from its initial state.

    :param spec: A loaded scenario.
    :param config: Defaults to the scenario's own threshold and seed.
    :param raise_on_mismatch: Raise on unmet expectations instead of only reporting them.
    :return: The report and the traces, in execution order.
    :raises InvariantViolation: On any broken invariant, non-conformant trace, or pools not
        restored by teardown.
    :raises ExpectationMismatch: If ``raise_on_mismatch`` and an expectation is unmet.
    """
    world = World.from_scenario(spec, config)
    config = world.config
    initial = world.snapshots()
    suite = InvariantSuite(world)
    peaks = PeakTracker(world)
    hooks: List[EventHook] = [peaks]
    if config.check_invariants:
        hooks.append(suite)
    engine = FormationEngine(world, hooks=hooks)
    log = logger.bind(role="runner", scenario=spec.name)

    traces: List[FormationTrace] = []
    for raw in scenario_requests(spec, config.seed):
        formation = engine.run_formation_sequence(raw)
        result = engine.results[formation.request_id]
        conformance = validate_trace(formation, result.scenario, engine.graph)
        if not conformance.conformant:
            raise InvariantViolation(
                f"engine produced a non-conformant trace: {conformance.summary()}"
            )
        traces.append(formation)

    lifecycle = engine.apply_actions(spec.lifecycle)
    if config.check_invariants:
        suite.check("after lifecycle actions")

    teardown_restored: Optional[bool] = None
    if spec.teardown:
        engine.teardown()
        if config.check_invariants:
            suite.check("after teardown")
        teardown_restored = world.snapshots() == initial
        if not teardown_restored:
            raise InvariantViolation(
                f"{spec.name}: pools differ from their initial state after teardown"
            )

    requests = [
        RequestReport(
            request_id=formation.request_id,
            classification=engine.results[formation.request_id].scenario,
            config_type=engine.results[formation.request_id].config_type,
            outcome=str(formation.outcome),
            ticks_to_outcome=formation.ticks_to_outcome,
            nf_units_consumed=engine.results[formation.request_id].nf_units_consumed,
            events=len(formation.events),
        )
        for formation in traces
    ]
    report = RunReport(
        scenario=spec.name,
        requests=requests,
        expectations=[
            check_expectation(expectation, engine.results.get(expectation.request_id))
            for expectation in spec.expectations
        ],
        lifecycle=lifecycle,
        pool_peaks=peaks.report(),
        shared_nssi_reuse=sum(nsmf.shared_attachments for nsmf in world.nsmfs()),
        invariants=suite.summary(),
        teardown_restored=teardown_restored,
        final_tick=engine.clock,
        final_state=world.state_fingerprint(),
    )
    log.info(
        "{}: {} served, {} rejected, {} failed",
        spec.name,
        report.count(OutcomeKind.SERVED),
        report.count(OutcomeKind.REJECTED),
        report.count(OutcomeKind.FAILED),
    )
    for unmet in report.unmet:
        log.warning("{}: expected {}, got {}", unmet.request_id, unmet.expected, unmet.actual)
    if raise_on_mismatch:
        report.raise_for_expectations()
    return report, traces
