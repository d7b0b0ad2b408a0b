"""
This module implements the Communication Service Management Function (CSMF).

The CSMF is the tenant-facing end of the management plane. It validates the request a
tenant embeds everything into, converts the communication requirements into network slice
requirements for the NSMF, and hands the resulting NSI(s) back to the tenant as one
communication service. For mixed option B it manages the micro-operator NSI and the MNO NSI
together as a single service.

Service status follows NSI lifecycle notices published by the NSMF: a service stops being
active as soon as one of its NSIs is deactivated or terminated.
"""
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from microslice.errors import (
    ContractViolation,
    InactiveNsi,
    MalformedRequest,
    ServiceUnavailable,
    TenantMismatch,
)
from microslice.inventory.domain import DomainKind, Identifier, LocationRef
from microslice.management.base import Actor, ManagementFunction
from microslice.management.lifecycle import LifecycleState
from microslice.management.models import (
    CustomerGroup,
    DepBBridge,
    LatencyClass,
    NetworkMode,
    NetworkSliceRequirements,
    Nsi,
    SharingAgreement,
    SliceRequest,
)
from microslice.management.nsmf import LifecycleNotice

DEFAULT_STRICT_LATENCY_MS = 10.0


class RawSliceRequest(BaseModel):
    """A request record as written in a scenario file; locations are given by id."""

    model_config = ConfigDict(extra="forbid")

    tenant_slice_id: Identifier
    tenant_id: Identifier
    latency_ms: float = Field(gt=0)
    throughput_units: int = Field(ge=1)
    duration_ticks: int = Field(ge=1)
    mobility: bool = False
    customer_group: CustomerGroup
    sharing_agreement: SharingAgreement = SharingAgreement.NONE
    share_with_locations: List[Identifier] = []
    home_location: Identifier
    needs_mno_wide_area: bool = False
    mno_needs_uo_access: bool = False
    network_mode: Optional[NetworkMode] = None
    dep_b_bridge: DepBBridge = DepBBridge.MNO
    mno: Optional[Identifier] = None
    profile_key: Optional[Identifier] = None


def _diagnostics(exc: ValidationError) -> List[Tuple[str, str]]:
    return [
        (".".join(str(part) for part in error["loc"]) or "<record>", error["msg"])
        for error in exc.errors()
    ]


def ingest_request(
    raw: Mapping[str, Any],
    locations: Mapping[str, LocationRef],
    mnos: Sequence[str] = (),
) -> SliceRequest:
    """
    Validate a raw tenant request and resolve its references.

    :param raw: The request record.
    :param locations: Every location of the scenario, by id.
    :param mnos: Names of the MNOs of the scenario.
    :return: The validated request. ``network_mode`` defaults to ``closed`` for closed
        groups and ``open`` otherwise; ``mno`` defaults to the group's MNO, then to the
        lexicographically first MNO.
    :raises MalformedRequest: With one diagnostic per failing field.
    """
    try:
        record = RawSliceRequest.model_validate(raw)
    except ValidationError as exc:
        slice_id = raw.get("tenant_slice_id", "<unnamed>")
        raise MalformedRequest(f"request {slice_id} is malformed", _diagnostics(exc)) from None

    diagnostics: List[Tuple[str, str]] = []
    group = record.customer_group

    def resolve(field: str, location_id: str) -> Optional[LocationRef]:
        if location_id not in locations:
            diagnostics.append((field, f"unknown location {location_id!r}"))
            return None
        return locations[location_id]

    home = resolve("home_location", record.home_location)
    if home is not None and home.domain.kind is not DomainKind.MICRO_OPERATOR:
        diagnostics.append(("home_location", f"{home.id} is not a micro-operator location"))
    shared = [
        loc
        for index, location_id in enumerate(record.share_with_locations)
        if (loc := resolve(f"share_with_locations.{index}", location_id)) is not None
    ]
    mno = group.mno or record.mno or (min(mnos) if mnos else None)
    if mno is not None and mno not in mnos:
        diagnostics.append(("mno", f"unknown MNO {mno!r}"))
    if (
        record.dep_b_bridge is DepBBridge.MULTI_SITE
        and not group.is_open
        and home is not None
        and not any(loc != home and loc.domain == home.domain for loc in shared)
    ):
        diagnostics.append(
            ("share_with_locations", "multi-site deployment B needs a second micro-operator site")
        )
    if diagnostics or home is None:
        raise MalformedRequest(f"request {record.tenant_slice_id} is malformed", diagnostics)

    mode = record.network_mode or (NetworkMode.OPEN if group.is_open else NetworkMode.CLOSED)
    try:
        return SliceRequest(
            tenant_slice_id=record.tenant_slice_id,
            tenant_id=record.tenant_id,
            latency_ms=record.latency_ms,
            throughput_units=record.throughput_units,
            duration_ticks=record.duration_ticks,
            mobility=record.mobility,
            customer_group=group,
            sharing_agreement=record.sharing_agreement,
            share_with_locations=tuple(shared),
            home_location=home,
            needs_mno_wide_area=record.needs_mno_wide_area,
            mno_needs_uo_access=record.mno_needs_uo_access,
            network_mode=mode,
            dep_b_bridge=record.dep_b_bridge,
            mno=mno,
            profile_key=record.profile_key,
        )
    except ValidationError as exc:
        raise MalformedRequest(
            f"request {record.tenant_slice_id} is malformed", _diagnostics(exc)
        ) from None


def translate_request(
    req: SliceRequest, strict_latency_ms: float = DEFAULT_STRICT_LATENCY_MS
) -> NetworkSliceRequirements:
    """
    Convert a tenant request into network slice requirements.

    Latency is Strict iff ``latency_ms <= strict_latency_ms``. The profile key defaults to
    ``<latency class>-<throughput units>``.
    """
    latency_class = (
        LatencyClass.STRICT if req.latency_ms <= strict_latency_ms else LatencyClass.RELAXED
    )
    return NetworkSliceRequirements(
        latency_class=latency_class,
        throughput_units=req.throughput_units,
        sharing=req.sharing_agreement,
        mobility=req.mobility,
        locations=req.locations,
        duration_ticks=req.duration_ticks,
        external_access=req.needs_mno_wide_area,
        customer_group=req.customer_group,
        home_location=req.home_location,
        profile_key=req.profile_key or f"{latency_class.value}-{req.throughput_units}",
        dep_b_bridge=req.dep_b_bridge,
        mno=req.mno,
    )


class ServiceStatus(str, Enum):
    ACTIVE = "active"
    TERMINATED = "terminated"


class CommunicationService(BaseModel):
    """
    One tenant's communication service.

    :param nsi_ids: One NSI, or the micro-operator and MNO NSIs for mixed option B.
    :param owner_domains: Owning domain of each NSI, in ``nsi_ids`` order.
    """

    id: Identifier
    tenant_id: Identifier
    request_id: Identifier
    nsi_ids: List[Identifier] = Field(min_length=1, max_length=2)
    owner_domains: List[Identifier]
    status: ServiceStatus = ServiceStatus.ACTIVE

    @property
    def active(self) -> bool:
        return self.status is ServiceStatus.ACTIVE


class DeliveryEvent(BaseModel):
    """Result of handing a service to its tenant; ``first`` is False on repeats."""

    model_config = ConfigDict(frozen=True)

    service_id: str
    tenant_id: str
    first: bool


class Csmf(ManagementFunction):
    """
    The communication service management function of the micro-operator.

    :param provider_role: Who operates the communication service provider, the
        micro-operator itself or a slice broker. A label only.
    :param strict_latency_ms: Threshold used by `translate`.

    ``services``, ``served`` and ``ue_attachments`` are history tables keyed by service id.
    A terminated service keeps its entries for reports; only `discard_service` removes them.
    """

    role = "csmf"
    description = "Translates tenant requirements and delivers NSIs as communication services"
    actor = Actor.CSMF

    def __init__(
        self,
        provider_role: str = "micro_operator",
        strict_latency_ms: float = DEFAULT_STRICT_LATENCY_MS,
    ):
        super().__init__()
        self.provider_role = provider_role
        self.strict_latency_ms = strict_latency_ms
        self.services: Dict[str, CommunicationService] = {}
        self.served: Dict[str, int] = {}
        self.ue_attachments: Dict[str, int] = {}
        self._service_of_nsi: Dict[str, str] = {}

    def translate(self, req: SliceRequest) -> NetworkSliceRequirements:
        return translate_request(req, self.strict_latency_ms)

    def service_for(self, request_id: str) -> Optional[CommunicationService]:
        return self.services.get(f"cs-{request_id}")

    def assemble_service(self, nsis: Sequence[Nsi], tenant_id: str) -> CommunicationService:
        """
        Wrap the NSI(s) formed for one request into a communication service.

        :raises TenantMismatch: If an NSI belongs to another tenant.
        :raises InactiveNsi: If an NSI is not in service.
        :raises ContractViolation: On zero or more than two NSIs, two NSIs of one domain,
            or a service that already exists.
        """
        if not 1 <= len(nsis) <= 2:
            raise ContractViolation(f"a service holds one or two NSIs, got {len(nsis)}")
        for nsi in nsis:
            if nsi.tenant_id != tenant_id:
                raise TenantMismatch(f"{nsi.id} belongs to {nsi.tenant_id}, not {tenant_id}")
            if not nsi.in_service:
                raise InactiveNsi(f"{nsi.id} is {nsi.state.value}")
        domains = [nsi.owner_domain.name for nsi in nsis]
        if len(set(domains)) != len(domains):
            raise ContractViolation(f"NSIs {[nsi.id for nsi in nsis]} share a domain")
        service_id = f"cs-{nsis[0].request_id}"
        if service_id in self.services:
            raise ContractViolation(f"{service_id} already exists")
        service = CommunicationService(
            id=service_id,
            tenant_id=tenant_id,
            request_id=nsis[0].request_id,
            nsi_ids=[nsi.id for nsi in nsis],
            owner_domains=domains,
        )
        self.services[service_id] = service
        for nsi in nsis:
            self._service_of_nsi[nsi.id] = service_id
        self.logger.info("{} assembled for {} from {}", service_id, tenant_id, service.nsi_ids)
        return service

    def notify_tenant(self, service: CommunicationService) -> DeliveryEvent:
        """Deliver an active service to its tenant. Repeated calls only report again."""
        if not service.active:
            raise ServiceUnavailable(f"{service.id} is {service.status.value}")
        count = self.served.get(service.id, 0)
        self.served[service.id] = count + 1
        return DeliveryEvent(service_id=service.id, tenant_id=service.tenant_id, first=count == 0)

    def connect_ue(self, service_id: str) -> CommunicationService:
        """
        Attach a UE of the tenant to its service.

        :raises ServiceUnavailable: If the service is unknown, undelivered or terminated.
        """
        service = self.services.get(service_id)
        if service is None or not service.active or service_id not in self.served:
            raise ServiceUnavailable(f"UE cannot attach to {service_id}")
        self.ue_attachments[service_id] = self.ue_attachments.get(service_id, 0) + 1
        return service

    def on_lifecycle(self, notice: LifecycleNotice) -> None:
        if notice.state not in (LifecycleState.DEACTIVATED, LifecycleState.TERMINATED):
            return
        service_id = self._service_of_nsi.get(notice.nsi_id)
        if service_id is None:
            return
        service = self.services[service_id]
        if service.active:
            service.status = ServiceStatus.TERMINATED
            self.logger.info(
                "{} terminated after {} went {}", service_id, notice.nsi_id, notice.state.value
            )

    def discard_service(self, service_id: str) -> None:
        """Forget a service whose formation failed after assembly."""
        service = self.services.pop(service_id)
        for nsi_id in service.nsi_ids:
            self._service_of_nsi.pop(nsi_id, None)
        self.served.pop(service_id, None)
        self.ue_attachments.pop(service_id, None)
