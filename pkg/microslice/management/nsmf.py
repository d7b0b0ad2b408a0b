"""
This module implements the Network Slice Management Function (NSMF).

The NSMF classifies a request into a deployment scenario, decides the NSI configuration
type, requisitions one AN, one CN and one DN NSSI from the right domain(s) and composes
them into an NSI it then drives through its lifecycle.

Subnet placement per scenario:

- closed deployment A, MNO open, public open, mixed option B (micro-operator side): all
  three subnets from the micro-operator NSSMF at the home location;
- closed deployment B bridged by an MNO, and mixed option A: AN and CN at home, DN from the
  MNO NSSMF;
- closed deployment B across micro-operator sites: AN and CN at home, DN at the next site.

Formation is staged the way the formation sequence runs it: `begin_formation` plans the
subnets, `request_local_nssis` and `request_external_nssis` requisition them,
`allocate_constituents` and `provide_constituents` bring the new NSSIs up and `compose`
registers the NSI. `form` runs the stages back to back. `abandon_formation` gives back
everything a failed formation obtained, so pools and NSSI tables end as they were.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from microslice.errors import (
    ContractViolation,
    InvalidTransition,
    MicroSliceError,
    RequestDiscarded,
    UnclassifiableRequest,
)
from microslice.inventory.domain import DomainRef, LocationRef
from microslice.inventory.pool import SubnetKind
from microslice.management.base import Actor, ManagementFunction
from microslice.management.lifecycle import (
    LifecycleEvent,
    LifecycleState,
    bring_up_history,
    next_state,
)
from microslice.management.models import (
    ApprovalDecision,
    DepBBridge,
    DeploymentScenario,
    GroupKind,
    NetworkMode,
    NetworkSliceRequirements,
    Nsi,
    NsiConfigType,
    SliceRequest,
)
from microslice.management.nssmf import (
    Nssi,
    Nssmf,
    ReleaseOutcome,
    SubnetRequirement,
    aggregate_multi_domain,
)

if TYPE_CHECKING:
    from microslice.management.mno import MnoStub

# A subnet requirement and the MNO that must serve it (None: the NSMF's own NSSMF).
SubnetPlan = List[Tuple[SubnetRequirement, Optional[str]]]

EXTERNAL_SCENARIOS = frozenset(
    {DeploymentScenario.CLOSED_DEP_B, DeploymentScenario.MIXED_OPTION_A}
)


class ConstituentRecord(BaseModel):
    """
    How one constituent of an NSI was obtained.

    :param nf_ids: NFs allocated for this NSI; empty when an existing NSSI was attached.
    :param units: Capacity units of ``nf_ids``.
    """

    model_config = ConfigDict(frozen=True)

    nssi_id: str
    subnet: SubnetKind
    domain: DomainRef
    location_id: str
    nf_ids: List[str]
    units: int
    attached: bool
    ref_count: int


class NsiFormation(BaseModel):
    """
    An NSI on its way through the formation sequence.

    ``obtained`` maps plan positions to the NSSIs requisitioned so far; ``attached`` lists
    those that were shared rather than provisioned for this NSI.
    """

    nsi_id: str
    request_id: str
    tenant_id: str
    scenario: DeploymentScenario
    config_type: NsiConfigType
    plan: SubnetPlan
    home_location: LocationRef
    serves: Optional[str] = None
    obtained: Dict[int, Nssi] = Field(default_factory=dict)
    attached: List[str] = Field(default_factory=list)

    def nssis(self) -> List[Nssi]:
        return [self.obtained[index] for index in sorted(self.obtained)]


class LifecycleNotice(BaseModel):
    """Published to subscribers when an NSI is activated, deactivated or terminated."""

    model_config = ConfigDict(frozen=True)

    nsi_id: str
    request_id: str
    tenant_id: str
    state: LifecycleState


class TerminationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    nsi_id: str
    released: Dict[str, ReleaseOutcome]
    freed_nf_ids: List[str]


def classify_scenario(req: SliceRequest) -> DeploymentScenario:
    """
    Map a request to exactly one deployment scenario.

    :raises UnclassifiableRequest: On contradictory flags, e.g. both mixed directions set,
        or a customer group the network mode cannot serve.
    """
    if req.needs_mno_wide_area and req.mno_needs_uo_access:
        raise UnclassifiableRequest(
            f"{req.tenant_slice_id}: wide-area need and MNO access both requested"
        )
    mode = req.network_mode
    group = req.customer_group.kind
    if mode is NetworkMode.MIXED:
        if req.mno_needs_uo_access:
            return DeploymentScenario.MIXED_OPTION_B
        if req.needs_mno_wide_area:
            return DeploymentScenario.MIXED_OPTION_A
    elif req.mno_needs_uo_access:
        raise UnclassifiableRequest(
            f"{req.tenant_slice_id}: MNO access to the micro-operator needs a mixed network"
        )
    if group is not GroupKind.CLOSED:
        if mode is NetworkMode.CLOSED or req.needs_mno_wide_area:
            raise UnclassifiableRequest(
                f"{req.tenant_slice_id}: open group {group.value} in a {mode.value} network"
            )
        if group is GroupKind.OPEN_MNO_SUBSCRIBERS:
            return DeploymentScenario.MNO_OPEN
        return DeploymentScenario.PUBLIC_OPEN
    if mode is NetworkMode.OPEN:
        raise UnclassifiableRequest(
            f"{req.tenant_slice_id}: closed group in an open network"
        )
    if len(req.locations) == 1 and not req.needs_mno_wide_area:
        return DeploymentScenario.CLOSED_DEP_A
    return DeploymentScenario.CLOSED_DEP_B


def determine_config_type(
    reqs: NetworkSliceRequirements, scenario: DeploymentScenario
) -> NsiConfigType:
    """
    Type 3 when constituents come from outside the home site, otherwise Type 1 for tenants
    with strict latency or no sharing agreement, Type 2 for the rest.
    """
    if scenario in EXTERNAL_SCENARIOS:
        return NsiConfigType.TYPE3
    if not reqs.allows_sharing:
        return NsiConfigType.TYPE1
    return NsiConfigType.TYPE2


class Nsmf(ManagementFunction):
    """
    End-to-end NSI management for one domain.

    :param nssmf: The NSSMF of the same domain.
    :param mnos: MNO stubs reachable for external constituents, by name.

    ``nsis`` and ``provisioning`` keep terminated NSIs as history; only `rollback_nsi` forgets one.
    """

    role = "nsmf"
    description = "Composes NSIs from NSSIs and drives their lifecycle"
    actor = Actor.NSMF

    def __init__(self, nssmf: Nssmf, mnos: Optional[Mapping[str, "MnoStub"]] = None):
        super().__init__()
        self.nssmf = nssmf
        self.domain = nssmf.domain
        self.mnos: Dict[str, "MnoStub"] = dict(mnos or {})
        self.nsis: Dict[str, Nsi] = {}
        self.provisioning: Dict[str, List[ConstituentRecord]] = {}
        self.shared_attachments = 0
        self._subscribers: List[Callable[[LifecycleNotice], None]] = []

    def subscribe(self, callback: Callable[[LifecycleNotice], None]) -> None:
        self._subscribers.append(callback)

    def _notify(self, nsi: Nsi) -> None:
        notice = LifecycleNotice(
            nsi_id=nsi.id, request_id=nsi.request_id, tenant_id=nsi.tenant_id, state=nsi.state
        )
        for callback in self._subscribers:
            callback(notice)

    def nssmf_for(self, domain_name: str) -> Nssmf:
        if domain_name == self.domain.name:
            return self.nssmf
        if domain_name in self.mnos:
            return self.mnos[domain_name].nssmf
        raise ContractViolation(f"{self.domain.name} has no route to domain {domain_name}")

    def mno(self, name: Optional[str]) -> "MnoStub":
        if name is None or name not in self.mnos:
            raise ContractViolation(f"unknown MNO {name!r}")
        return self.mnos[name]

    def constituent_nssis(self, nsi: Nsi) -> List[Nssi]:
        return [
            self.nssmf_for(domain).get(nssi_id)
            for nssi_id, domain in zip(nsi.constituents, nsi.constituent_domains)
        ]

    def plan_subnets(
        self,
        reqs: NetworkSliceRequirements,
        scenario: DeploymentScenario,
        config_type: NsiConfigType,
    ) -> SubnetPlan:
        """One AN, one CN and one DN requirement, each routed to the domain serving it."""
        shareable = config_type is not NsiConfigType.TYPE1 and reqs.allows_sharing

        def local(subnet: SubnetKind, location: LocationRef) -> SubnetRequirement:
            return SubnetRequirement(
                subnet=subnet,
                units_needed=reqs.throughput_units,
                location=location,
                shareable=shareable,
                profile_key=reqs.profile_key,
            )

        home = reqs.home_location
        plan: SubnetPlan = [(local(SubnetKind.AN, home), None), (local(SubnetKind.CN, home), None)]
        if scenario not in EXTERNAL_SCENARIOS:
            plan.append((local(SubnetKind.DN, home), None))
        elif (
            scenario is DeploymentScenario.CLOSED_DEP_B
            and reqs.dep_b_bridge is DepBBridge.MULTI_SITE
        ):
            remote = next(
                (loc for loc in reqs.locations if loc != home and loc.domain == self.domain),
                None,
            )
            if remote is None:
                raise ContractViolation("multi-site deployment B needs a second site")
            plan.append((local(SubnetKind.DN, remote), None))
        else:
            mno = self.mno(reqs.mno)
            external = SubnetRequirement(
                subnet=SubnetKind.DN,
                units_needed=reqs.throughput_units,
                location=mno.location,
                shareable=False,
                profile_key=reqs.profile_key,
            )
            plan.append((external, mno.name))
        return plan

    def _release_all(
        self, nsi_id: str, nssis: Sequence[Nssi], discard: bool
    ) -> Dict[str, ReleaseOutcome]:
        released: Dict[str, ReleaseOutcome] = {}
        for nssi in reversed(nssis):
            owner = self.nssmf_for(nssi.owner_domain.name)
            outcome = owner.release_nssi(nssi, nsi_id, owner.pool_for(nssi.location))
            if outcome is ReleaseOutcome.TERMINATED and discard:
                owner.discard(nssi.id)
            released[nssi.id] = outcome
        return dict(reversed(list(released.items())))

    def new_formation(
        self,
        nsi_id: str,
        request_id: str,
        tenant_id: str,
        scenario: DeploymentScenario,
        config_type: NsiConfigType,
        plan: SubnetPlan,
        home_location: LocationRef,
        serves: Optional[str] = None,
    ) -> NsiFormation:
        """:raises ContractViolation: If ``nsi_id`` is already in use."""
        if nsi_id in self.nsis:
            raise ContractViolation(f"{nsi_id} already exists")
        return NsiFormation(
            nsi_id=nsi_id,
            request_id=request_id,
            tenant_id=tenant_id,
            scenario=scenario,
            config_type=config_type,
            plan=plan,
            home_location=home_location,
            serves=serves,
        )

    def begin_formation(
        self,
        req: SliceRequest,
        reqs: NetworkSliceRequirements,
        approval: ApprovalDecision,
    ) -> NsiFormation:
        """
        Classify an approved request and plan its subnets. Nothing is obtained yet.

        :raises RequestDiscarded: If the request was not approved; nothing changes.
        :raises ContractViolation: If the NSI id is taken or no domain serves a subnet.
        """
        if not approval.approved:
            reason = approval.reason.value if approval.reason else None
            self.logger.warning("{} discarded: {}", req.tenant_slice_id, reason)
            raise RequestDiscarded(f"{req.tenant_slice_id} was not approved", reason=reason)
        scenario = classify_scenario(req)
        config_type = determine_config_type(reqs, scenario)
        serves: Optional[str] = None
        if scenario is DeploymentScenario.MNO_OPEN:
            serves = req.customer_group.mno
        elif scenario is DeploymentScenario.PUBLIC_OPEN:
            serves = "public"
        return self.new_formation(
            nsi_id=f"nsi-{req.tenant_slice_id}",
            request_id=req.tenant_slice_id,
            tenant_id=req.tenant_id,
            scenario=scenario,
            config_type=config_type,
            plan=self.plan_subnets(reqs, scenario, config_type),
            home_location=reqs.home_location,
            serves=serves,
        )

    def records_of(
        self, formation: NsiFormation, local: Optional[bool] = None
    ) -> List[ConstituentRecord]:
        """
        Constituents obtained so far, in plan order.

        :param local: True for the NSSIs of the NSMF's own NSSMF only, False for MNO ones only.
        """
        records: List[ConstituentRecord] = []
        for index in sorted(formation.obtained):
            if local is not None and (formation.plan[index][1] is None) is not local:
                continue
            nssi = formation.obtained[index]
            attached = nssi.id in formation.attached
            pool = self.nssmf_for(nssi.owner_domain.name).pool_for(nssi.location)
            nf_ids = [] if attached else list(nssi.nf_ids)
            records.append(
                ConstituentRecord(
                    nssi_id=nssi.id,
                    subnet=nssi.subnet,
                    domain=nssi.owner_domain,
                    location_id=nssi.location.id,
                    nf_ids=nf_ids,
                    units=sum(pool.resource(nf_id).capacity_units for nf_id in nf_ids),
                    attached=attached,
                    ref_count=nssi.ref_count,
                )
            )
        return records

    def request_local_nssis(self, formation: NsiFormation) -> List[ConstituentRecord]:
        """
        Requisition the subnets the NSMF's own NSSMF serves. A compatible active shared NSSI
        is attached; otherwise a new NSSI is instantiated.

        :raises ContractViolation: If the NSSMF has no pool where a subnet must live.
        """
        with self.tracer.start_as_current_span("request_local_nssis"):
            for index, (sub_req, mno_name) in enumerate(formation.plan):
                if mno_name is not None:
                    continue
                existing = self.nssmf.find_shareable(sub_req) if sub_req.shareable else None
                if existing is not None:
                    self.nssmf.attach_shared(existing, formation.nsi_id, sub_req)
                    formation.attached.append(existing.id)
                    formation.obtained[index] = existing
                else:
                    nssi = self.nssmf.instantiate_nssi(sub_req, formation.nsi_id)
                    formation.obtained[index] = nssi
        return self.records_of(formation, local=True)

    def request_external_nssis(self, formation: NsiFormation) -> List[ConstituentRecord]:
        """
        Requisition the subnets an MNO serves. The MNO hands back an active NSSI.

        :raises MnoUnreachable, GrantRefused, InsufficientResources: From the MNO stub.
        """
        with self.tracer.start_as_current_span("request_external_nssis"):
            for index, (sub_req, mno_name) in enumerate(formation.plan):
                if mno_name is None:
                    continue
                nssi = self.mno(mno_name).mno_provide_nssi(sub_req, formation.nsi_id)
                formation.obtained[index] = nssi
        return self.records_of(formation, local=False)

    def allocate_constituents(self, formation: NsiFormation) -> List[ConstituentRecord]:
        """
        Take NFs for every instantiated constituent, in plan order.

        :raises InsufficientResources: Propagated from the pool of the failing subnet.
        """
        for index in sorted(formation.obtained):
            nssi = formation.obtained[index]
            if nssi.state is LifecycleState.INSTANTIATED:
                owner = self.nssmf_for(nssi.owner_domain.name)
                owner.allocate_nssi(nssi, formation.plan[index][0], owner.pool_for(nssi.location))
        return self.records_of(formation)

    def provide_constituents(self, formation: NsiFormation) -> List[ConstituentRecord]:
        """Activate every constituent that got its NFs."""
        for nssi in formation.nssis():
            if nssi.state is LifecycleState.INSTANTIATED:
                self.nssmf_for(nssi.owner_domain.name).activate_nssi(nssi)
        return self.records_of(formation)

    def compose(self, formation: NsiFormation) -> Nsi:
        """
        Register an Activated NSI over the constituents of ``formation``.

        :raises ContractViolation: If a constituent is missing or inactive, or a Type 3 NSI
            stays inside the home site.
        """
        nssis = formation.nssis()
        inactive = [nssi.id for nssi in nssis if nssi.state is not LifecycleState.ACTIVATED]
        if len(nssis) != len(formation.plan) or inactive:
            raise ContractViolation(
                f"{formation.nsi_id} has {len(nssis)} of {len(formation.plan)} constituents, "
                f"inactive {inactive}"
            )
        spread = aggregate_multi_domain(nssis)
        if formation.config_type is NsiConfigType.TYPE3 and not (
            spread.spans_external or spread.spans_locations
        ):
            raise ContractViolation(
                f"{formation.nsi_id} is Type 3 but stays at {spread.locations}"
            )
        records = self.records_of(formation)
        history = bring_up_history()
        nsi = Nsi(
            id=formation.nsi_id,
            request_id=formation.request_id,
            tenant_id=formation.tenant_id,
            scenario=formation.scenario,
            config_type=formation.config_type,
            constituents=[record.nssi_id for record in records],
            constituent_domains=[record.domain.name for record in records],
            owner_domain=self.domain,
            home_location=formation.home_location,
            state=history[-1],
            history=history,
            serves=formation.serves,
        )
        self.nsis[nsi.id] = nsi
        self.provisioning[nsi.id] = records
        self.shared_attachments += sum(1 for record in records if record.attached)
        self.logger.info(
            "{} activated ({}, {}) from {}",
            nsi.id,
            nsi.scenario.value,
            nsi.config_type.value,
            nsi.constituents,
        )
        self._notify(nsi)
        return nsi

    def abandon_formation(self, formation: NsiFormation) -> None:
        """Give back every NSSI obtained for a formation that cannot complete, newest first."""
        nssis = formation.nssis()
        if nssis:
            self.logger.warning(
                "{}: rolling back {}", formation.nsi_id, [nssi.id for nssi in nssis]
            )
        for nssi in reversed(nssis):
            owner = self.nssmf_for(nssi.owner_domain.name)
            pool = owner.pool_for(nssi.location)
            if nssi.state is LifecycleState.INSTANTIATED:
                owner.abandon_nssi(nssi, pool)
            elif owner.release_nssi(nssi, formation.nsi_id, pool) is ReleaseOutcome.TERMINATED:
                owner.discard(nssi.id)
        formation.obtained.clear()
        formation.attached.clear()

    def form(self, formation: NsiFormation) -> Nsi:
        """
        Run every stage of ``formation`` back to back.

        :raises InsufficientResources, MnoUnreachable, GrantRefused: After full rollback.
        """
        with self.tracer.start_as_current_span("form"):
            try:
                self.request_local_nssis(formation)
                self.request_external_nssis(formation)
                self.allocate_constituents(formation)
                self.provide_constituents(formation)
                return self.compose(formation)
            except MicroSliceError:
                self.abandon_formation(formation)
                raise

    def compose_nsi(
        self,
        nsi_id: str,
        request_id: str,
        tenant_id: str,
        scenario: DeploymentScenario,
        config_type: NsiConfigType,
        plan: SubnetPlan,
        home_location: LocationRef,
        serves: Optional[str] = None,
    ) -> Nsi:
        """
        Obtain every constituent of ``plan`` and register an Activated NSI.

        :raises ContractViolation: If ``nsi_id`` is already in use.
        :raises InsufficientResources, MnoUnreachable, GrantRefused: After rollback.
        """
        formation = self.new_formation(
            nsi_id, request_id, tenant_id, scenario, config_type, plan, home_location, serves
        )
        return self.form(formation)

    def orchestrate_nsi(
        self,
        req: SliceRequest,
        reqs: NetworkSliceRequirements,
        approval: ApprovalDecision,
    ) -> Nsi:
        """
        Form the NSI for an approved request.

        :param req: The tenant request, used for classification and ids.
        :param reqs: Its translation by the CSMF.
        :param approval: The network provider's decision.
        :raises RequestDiscarded: If the request was not approved; nothing changes.
        :raises InsufficientResources, MnoUnreachable, GrantRefused: After full rollback.
        """
        return self.form(self.begin_formation(req, reqs, approval))

    def advance_lifecycle(self, nsi: Nsi, event: LifecycleEvent) -> LifecycleState:
        """
        Apply one lifecycle event. ``terminate`` releases the constituents as well.

        :raises InvalidTransition: If the event is illegal in the NSI's state; the NSI is
            left unchanged.
        """
        if event is LifecycleEvent.TERMINATE:
            self.terminate_nsi(nsi)
            return nsi.state
        nsi.state = next_state(nsi.state, event)
        nsi.history.append(nsi.state)
        self.logger.debug("{} -> {}", nsi.id, nsi.state.value)
        if nsi.state is LifecycleState.DEACTIVATED:
            self._notify(nsi)
        return nsi.state

    def terminate_nsi(self, nsi: Nsi) -> TerminationReport:
        """
        Release every constituent of a deactivated NSI and terminate it.

        :raises InvalidTransition: If the NSI is not Deactivated.
        """
        if nsi.state is not LifecycleState.DEACTIVATED:
            raise InvalidTransition(f"{nsi.id} is {nsi.state.value}, not deactivated")
        nssis = self.constituent_nssis(nsi)
        released = self._release_all(nsi.id, nssis, discard=False)
        freed = [
            nf_id
            for nssi in nssis
            if released[nssi.id] is ReleaseOutcome.TERMINATED
            for nf_id in nssi.nf_ids
        ]
        nsi.state = next_state(nsi.state, LifecycleEvent.TERMINATE)
        nsi.history.append(nsi.state)
        self.logger.info("{} terminated, freed {}", nsi.id, freed)
        self._notify(nsi)
        return TerminationReport(nsi_id=nsi.id, released=released, freed_nf_ids=freed)

    def rollback_nsi(self, nsi: Nsi) -> None:
        """Undo a formation: release and forget the constituents, then forget the NSI."""
        if not nsi.in_service:
            raise ContractViolation(f"cannot roll back {nsi.id} in state {nsi.state.value}")
        self._release_all(nsi.id, self.constituent_nssis(nsi), discard=True)
        self.shared_attachments -= sum(
            1 for record in self.provisioning.pop(nsi.id) if record.attached
        )
        del self.nsis[nsi.id]
        self.logger.warning("{} rolled back", nsi.id)
