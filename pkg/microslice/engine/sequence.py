"""
The formation sequence engine.

`FormationEngine.run_formation_sequence` takes one raw tenant request through steps 0 to 15
in the topological order of the step graph. Each step delegates to the management function
owning it and appends its events to the request's trace. Every event emitted during a step
carries the same tick; the logical clock advances by one after each step that emitted
anything and keeps running across requests.

Failures never escape a formation. A malformed request ends the trace at step 1, an
unclassifiable one at step 2, a refused approval at step 4; a provisioning failure ends it
with a ``failed`` outcome after everything the request had obtained is rolled back. Hooks
run after every event; an `InvariantViolation` raised by a hook is the one error that does
propagate.
"""
import re
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence

from loguru import logger
from opentelemetry import trace
from pydantic import BaseModel, ConfigDict

from microslice.engine.steps import STEP_ACTORS, Step, StepDependencyGraph
from microslice.engine.trace import (
    FormationTrace,
    Outcome,
    OutcomeKind,
    PayloadValue,
    TraceEvent,
    TraceRecorder,
)
from microslice.engine.world import World
from microslice.errors import (
    ContractViolation,
    MalformedRequest,
    MicroSliceError,
    RequestDiscarded,
    UnclassifiableRequest,
)
from microslice.management.base import Actor
from microslice.management.csmf import CommunicationService, ingest_request
from microslice.management.lifecycle import LifecycleEvent, LifecycleState
from microslice.management.models import (
    ApprovalDecision,
    DeploymentScenario,
    NetworkSliceRequirements,
    Nsi,
    NsiConfigType,
    SliceRequest,
)
from microslice.management.nsmf import (
    ConstituentRecord,
    NsiFormation,
    TerminationReport,
    classify_scenario,
    determine_config_type,
)
from microslice.scenario.schema import LifecycleAction

EventHook = Callable[[TraceEvent], None]

_ID = re.compile(r"^[A-Za-z0-9_.:\-]+$")


class FormationContext(BaseModel):
    """What one formation has produced so far."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    request_id: str
    raw: Dict[str, Any]
    recorder: TraceRecorder
    req: Optional[SliceRequest] = None
    reqs: Optional[NetworkSliceRequirements] = None
    scenario: Optional[DeploymentScenario] = None
    config_type: Optional[NsiConfigType] = None
    approval: Optional[ApprovalDecision] = None
    formation: Optional[NsiFormation] = None
    nsi: Optional[Nsi] = None
    mno_nsi: Optional[Nsi] = None
    service: Optional[CommunicationService] = None
    outcome: Optional[Outcome] = None


class FormationResult(BaseModel):
    """Trace plus the classification reached, for reports."""

    model_config = ConfigDict(frozen=True)

    trace: FormationTrace
    scenario: Optional[DeploymentScenario] = None
    config_type: Optional[NsiConfigType] = None
    nf_units_consumed: int = 0


class LifecycleResult(BaseModel):
    """Result of one scripted lifecycle action; ``error`` holds the reason on failure."""

    model_config = ConfigDict(frozen=True)

    request_id: str
    event: LifecycleEvent
    state: Optional[LifecycleState] = None
    error: Optional[str] = None


class FormationEngine:
    """
    Runs formation sequences against a `World`.

    :param world: The engine state; mutated in place.
    :param graph: Step dependency graph; defaults to the formation sequence.
    :param hooks: Called with every event right after it is appended.
    """

    def __init__(
        self,
        world: World,
        graph: Optional[StepDependencyGraph] = None,
        hooks: Sequence[EventHook] = (),
    ):
        self.world = world
        self.graph = graph or StepDependencyGraph()
        self.hooks: List[EventHook] = list(hooks)
        self.clock = 0
        self.results: Dict[str, FormationResult] = {}
        self._auto_ids = 0
        self.tracer = trace.get_tracer(self.__class__.__name__)
        self.logger = logger.bind(role="engine")
        self._handlers: Dict[Step, Callable[[FormationContext], None]] = {
            Step.UE_WAITING: self._ue_waiting,
            Step.SLICE_REQUEST: self._slice_request,
            Step.REQUEST_ROUTING: self._request_routing,
            Step.REQUIREMENT_TRANSLATION: self._requirement_translation,
            Step.APPROVAL: self._approval,
            Step.UO_NSSI_REQUEST: self._uo_nssi_request,
            Step.MNO_NSSI_REQUEST: self._mno_nssi_request,
            Step.NF_ALLOCATION: self._nf_allocation,
            Step.NSSI_PROVIDED: self._nssi_provided,
            Step.NSSI_MANAGEMENT: self._nssi_management,
            Step.NSI_COMPOSITION: self._nsi_composition,
            Step.NSI_ATTRIBUTION: self._nsi_attribution,
            Step.SERVICE_ASSEMBLY: self._service_assembly,
            Step.SERVICE_MANAGEMENT: self._service_management,
            Step.SERVICE_DELIVERY: self._service_delivery,
            Step.UE_CONNECTIVITY: self._ue_connectivity,
        }

    def add_hook(self, hook: EventHook) -> None:
        self.hooks.append(hook)

    def _request_id(self, raw: Mapping[str, Any]) -> str:
        candidate = raw.get("tenant_slice_id")
        if (
            isinstance(candidate, str)
            and _ID.match(candidate)
            and candidate not in self.results
        ):
            return candidate
        self._auto_ids += 1
        return f"req-{self._auto_ids:03d}"

    def _emit(
        self,
        ctx: FormationContext,
        step: Step,
        actor: Optional[Actor] = None,
        **payload: PayloadValue,
    ) -> TraceEvent:
        event = ctx.recorder.append(step, self.clock, actor or STEP_ACTORS[step], payload)
        for hook in self.hooks:
            hook(event)
        return event

    def _records(self, ctx: FormationContext) -> List[ConstituentRecord]:
        if ctx.formation is None:
            return []
        return self.world.nsmf.records_of(ctx.formation)

    def _fail(
        self,
        ctx: FormationContext,
        step: Step,
        exc: MicroSliceError,
        actor: Optional[Actor] = None,
    ) -> None:
        self._emit(ctx, step, actor, verdict="failed", reason=exc.reason)
        self._abort(ctx, exc)

    def run_formation_sequence(self, raw: Mapping[str, Any]) -> FormationTrace:
        """
        Execute the formation sequence for one raw request.

        :return: The finished, immutable trace; its outcome tells how the request ended.
        :raises InvariantViolation: If a hook detects a broken engine invariant.
        """
        request_id = self._request_id(raw)
        ctx = FormationContext(
            request_id=request_id, raw=dict(raw), recorder=TraceRecorder(request_id)
        )
        with self.tracer.start_as_current_span("formation") as span:
            span.set_attribute("request_id", request_id)
            for step in self.graph.execution_order():
                with self.tracer.start_as_current_span(f"step-{step.value}"):
                    self._handlers[step](ctx)
                if ctx.recorder.emitted(step):
                    self.clock += 1
                if ctx.outcome is not None:
                    break
            outcome = ctx.outcome or Outcome.served()
            span.set_attribute("outcome", str(outcome))
        formation = ctx.recorder.finish(outcome)
        consumed = 0
        if outcome.kind is OutcomeKind.SERVED:
            for nsi in (ctx.nsi, ctx.mno_nsi):
                if nsi is not None:
                    records = self.world.nsmf_owning(nsi).provisioning[nsi.id]
                    consumed += sum(record.units for record in records)
        self.results[request_id] = FormationResult(
            trace=formation,
            scenario=ctx.scenario,
            config_type=ctx.config_type,
            nf_units_consumed=consumed,
        )
        log = self.logger.bind(request=request_id)
        if outcome.kind is OutcomeKind.SERVED:
            assert ctx.scenario is not None and ctx.config_type is not None
            log.info(
                "{} served as {} ({})", request_id, ctx.scenario.value, ctx.config_type.value
            )
        else:
            log.warning("{} ended {}", request_id, outcome)
        return formation

    # Step handlers, in step order.

    def _ue_waiting(self, ctx: FormationContext) -> None:
        tenant = ctx.raw.get("tenant_id")
        if not (isinstance(tenant, str) and _ID.match(tenant)):
            tenant = None
        self._emit(ctx, Step.UE_WAITING, tenant=tenant)

    def _slice_request(self, ctx: FormationContext) -> None:
        try:
            req = ingest_request(ctx.raw, self.world.locations, self.world.mno_names)
            if req.tenant_slice_id != ctx.request_id:
                raise MalformedRequest(
                    f"{req.tenant_slice_id} was already requested",
                    [("tenant_slice_id", "duplicate request id")],
                )
        except MalformedRequest as exc:
            self._emit(
                ctx,
                Step.SLICE_REQUEST,
                verdict="malformed",
                fields=sorted({field for field, _ in exc.diagnostics}),
            )
            for field, message in exc.diagnostics:
                self.logger.warning("{}: {}: {}", ctx.request_id, field, message)
            ctx.outcome = Outcome.rejected(exc.reason)
            return
        ctx.req = req
        self._emit(
            ctx,
            Step.SLICE_REQUEST,
            tenant=req.tenant_id,
            home=req.home_location.id,
            locations=[loc.id for loc in req.locations],
        )

    def _request_routing(self, ctx: FormationContext) -> None:
        assert ctx.req is not None
        try:
            ctx.scenario = classify_scenario(ctx.req)
        except UnclassifiableRequest as exc:
            self._emit(ctx, Step.REQUEST_ROUTING, verdict="unclassifiable")
            self.logger.warning("{}: {}", ctx.request_id, exc)
            ctx.outcome = Outcome.rejected(exc.reason)
            return
        self._emit(ctx, Step.REQUEST_ROUTING, scenario=ctx.scenario.value)

    def _requirement_translation(self, ctx: FormationContext) -> None:
        assert ctx.req is not None and ctx.scenario is not None
        ctx.reqs = self.world.csmf.translate(ctx.req)
        ctx.config_type = determine_config_type(ctx.reqs, ctx.scenario)
        self._emit(
            ctx,
            Step.REQUIREMENT_TRANSLATION,
            latency=ctx.reqs.latency_class.value,
            profile=ctx.reqs.profile_key,
            sharing=ctx.reqs.sharing.value,
            units=ctx.reqs.throughput_units,
        )

    def _approval(self, ctx: FormationContext) -> None:
        assert ctx.req is not None and ctx.reqs is not None and ctx.scenario is not None
        ctx.approval = self.world.provider.decide(ctx.req, ctx.scenario, self.clock)
        self._emit(
            ctx,
            Step.APPROVAL,
            verdict=ctx.approval.verdict.value,
            reason=ctx.approval.reason.value if ctx.approval.reason else None,
        )
        if ctx.approval.approved:
            return
        try:
            self.world.nsmf.begin_formation(ctx.req, ctx.reqs, ctx.approval)
        except RequestDiscarded as exc:
            ctx.outcome = Outcome.rejected(exc.reason)

    def _uo_nssi_request(self, ctx: FormationContext) -> None:
        assert ctx.req is not None and ctx.reqs is not None and ctx.approval is not None
        nsmf = self.world.nsmf
        try:
            ctx.formation = nsmf.begin_formation(ctx.req, ctx.reqs, ctx.approval)
            records = nsmf.request_local_nssis(ctx.formation)
        except MicroSliceError as exc:
            self._fail(ctx, Step.UO_NSSI_REQUEST, exc)
            return
        for record in records:
            self._emit(
                ctx,
                Step.UO_NSSI_REQUEST,
                nssi=record.nssi_id,
                subnet=record.subnet.value,
                location=record.location_id,
                mode="attached" if record.attached else "provisioned",
            )

    def _mno_nssi_request(self, ctx: FormationContext) -> None:
        assert ctx.formation is not None
        if all(mno_name is None for _, mno_name in ctx.formation.plan):
            return
        try:
            records = self.world.nsmf.request_external_nssis(ctx.formation)
        except MicroSliceError as exc:
            self._fail(ctx, Step.MNO_NSSI_REQUEST, exc)
            return
        for record in records:
            self._emit(
                ctx,
                Step.MNO_NSSI_REQUEST,
                nssi=record.nssi_id,
                subnet=record.subnet.value,
                location=record.location_id,
                mno=record.domain.name,
            )

    def _nf_allocation(self, ctx: FormationContext) -> None:
        assert ctx.formation is not None
        try:
            records = self.world.nsmf.allocate_constituents(ctx.formation)
        except MicroSliceError as exc:
            self._fail(ctx, Step.NF_ALLOCATION, exc)
            return
        for record in records:
            self._emit(
                ctx,
                Step.NF_ALLOCATION,
                nssi=record.nssi_id,
                nfs=record.nf_ids,
                units=record.units,
            )

    def _nssi_provided(self, ctx: FormationContext) -> None:
        assert ctx.formation is not None
        for record in self.world.nsmf.provide_constituents(ctx.formation):
            self._emit(
                ctx,
                Step.NSSI_PROVIDED,
                nssi=record.nssi_id,
                subnet=record.subnet.value,
                refs=record.ref_count,
            )

    def _nssi_management(self, ctx: FormationContext) -> None:
        by_domain: Dict[str, List[str]] = {}
        for record in self._records(ctx):
            by_domain.setdefault(record.domain.name, []).append(record.nssi_id)
        for domain_name, nssi_ids in by_domain.items():
            nssmf = self.world.nsmf.nssmf_for(domain_name)
            managed = nssmf.manage_nssis([nssmf.get(nssi_id) for nssi_id in nssi_ids])
            self._emit(ctx, Step.NSSI_MANAGEMENT, nssmf.actor, domain=domain_name, nssis=managed)

    def _nsi_composition(self, ctx: FormationContext) -> None:
        assert ctx.formation is not None and ctx.reqs is not None and ctx.req is not None
        try:
            ctx.nsi = self.world.nsmf.compose(ctx.formation)
        except MicroSliceError as exc:
            self._fail(ctx, Step.NSI_COMPOSITION, exc, Actor.NSMF)
            return
        nsi = ctx.nsi
        self._emit(
            ctx,
            Step.NSI_COMPOSITION,
            Actor.NSMF,
            nsi=nsi.id,
            config_type=nsi.config_type.value,
            constituents=nsi.constituents,
            domains=sorted(set(nsi.constituent_domains)),
            external=any(record.domain.is_external for record in self._records(ctx)),
            state=nsi.state.value,
        )
        if ctx.scenario is not DeploymentScenario.MIXED_OPTION_B:
            return
        try:
            stub = self.world.nsmf.mno(ctx.reqs.mno)
            ctx.mno_nsi = stub.mno_provide_nsi(ctx.reqs, ctx.request_id, ctx.req.tenant_id)
        except MicroSliceError as exc:
            self._fail(ctx, Step.NSI_COMPOSITION, exc, Actor.MNO_NSMF)
            return
        self._emit(
            ctx,
            Step.NSI_COMPOSITION,
            Actor.MNO_NSMF,
            nsi=ctx.mno_nsi.id,
            config_type=ctx.mno_nsi.config_type.value,
            constituents=ctx.mno_nsi.constituents,
            domains=[stub.name],
            state=ctx.mno_nsi.state.value,
        )

    def _nsi_attribution(self, ctx: FormationContext) -> None:
        assert ctx.req is not None
        nsis = [nsi.id for nsi in (ctx.nsi, ctx.mno_nsi) if nsi is not None]
        self._emit(ctx, Step.NSI_ATTRIBUTION, nsis=nsis, tenant=ctx.req.tenant_id)

    def _service_assembly(self, ctx: FormationContext) -> None:
        assert ctx.req is not None
        nsis = [nsi for nsi in (ctx.nsi, ctx.mno_nsi) if nsi is not None]
        try:
            ctx.service = self.world.csmf.assemble_service(nsis, ctx.req.tenant_id)
        except MicroSliceError as exc:
            self._fail(ctx, Step.SERVICE_ASSEMBLY, exc)
            return
        self._emit(
            ctx,
            Step.SERVICE_ASSEMBLY,
            service=ctx.service.id,
            nsis=ctx.service.nsi_ids,
            domains=ctx.service.owner_domains,
        )

    def _service_management(self, ctx: FormationContext) -> None:
        assert ctx.service is not None
        self._emit(
            ctx, Step.SERVICE_MANAGEMENT, service=ctx.service.id, status=ctx.service.status.value
        )

    def _service_delivery(self, ctx: FormationContext) -> None:
        assert ctx.service is not None
        delivery = self.world.csmf.notify_tenant(ctx.service)
        self._emit(
            ctx,
            Step.SERVICE_DELIVERY,
            service=delivery.service_id,
            tenant=delivery.tenant_id,
            first=delivery.first,
        )

    def _ue_connectivity(self, ctx: FormationContext) -> None:
        assert ctx.service is not None
        service = self.world.csmf.connect_ue(ctx.service.id)
        self._emit(ctx, Step.UE_CONNECTIVITY, service=service.id)

    def _abort(self, ctx: FormationContext, exc: MicroSliceError) -> None:
        """Roll back everything a formation obtained and mark it failed."""
        if ctx.service is not None:
            self.world.csmf.discard_service(ctx.service.id)
        if ctx.mno_nsi is not None:
            self.world.nsmf_owning(ctx.mno_nsi).rollback_nsi(ctx.mno_nsi)
            ctx.mno_nsi = None
        if ctx.nsi is not None:
            self.world.nsmf.rollback_nsi(ctx.nsi)
            ctx.nsi = None
        elif ctx.formation is not None:
            self.world.nsmf.abandon_formation(ctx.formation)
        ctx.outcome = Outcome.failed(exc.reason)

    # Run-time management after formation.

    def apply_lifecycle(self, request_id: str, event: LifecycleEvent) -> LifecycleState:
        """
        Apply a lifecycle event to every NSI formed for a request.

        :raises ContractViolation: If the request has no NSI.
        :raises InvalidTransition: If the event is illegal for an NSI; NSIs already handled
            keep their new state.
        """
        nsis = self.world.nsis_of(request_id)
        if not nsis:
            raise ContractViolation(f"{request_id} has no NSI")
        state = nsis[0].state
        for nsi in nsis:
            state = self.world.nsmf_owning(nsi).advance_lifecycle(nsi, event)
        self.logger.info("{} {} -> {}", request_id, event.value, state.value)
        return state

    def apply_actions(self, actions: Iterable[LifecycleAction]) -> List[LifecycleResult]:
        """Run scripted lifecycle actions in order; a failing action does not stop the rest."""
        results: List[LifecycleResult] = []
        for action in actions:
            try:
                state = self.apply_lifecycle(action.request_id, action.event)
            except MicroSliceError as exc:
                self.logger.warning(
                    "{} {} refused: {}", action.request_id, action.event.value, exc
                )
                results.append(
                    LifecycleResult(
                        request_id=action.request_id, event=action.event, error=exc.reason
                    )
                )
                continue
            results.append(
                LifecycleResult(request_id=action.request_id, event=action.event, state=state)
            )
        return results

    def teardown(self) -> List[TerminationReport]:
        """Deactivate and terminate every NSI still alive, in id order."""
        reports: List[TerminationReport] = []
        for nsi in sorted(self.world.nsis(), key=lambda item: item.id):
            nsmf = self.world.nsmf_owning(nsi)
            if nsi.state is LifecycleState.MODIFIED:
                nsmf.advance_lifecycle(nsi, LifecycleEvent.SUPERVISE)
            if nsi.in_service:
                nsmf.advance_lifecycle(nsi, LifecycleEvent.DEACTIVATE)
            if nsi.state is LifecycleState.DEACTIVATED:
                reports.append(nsmf.terminate_nsi(nsi))
        return reports

