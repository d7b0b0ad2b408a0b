"""
Records exchanged between the management functions.

`SliceRequest` is what a tenant embeds in its request, `NetworkSliceRequirements` what the
CSMF hands to the NSMF after translation, and `Nsi` the end-to-end slice instance the NSMF
composes. The enumerations cover the deployment scenarios of a micro-operator (closed
deployments A and B, MNO open, public open, mixed options A and B) and the three NSI
configuration types.
"""
from enum import Enum
from typing import Any, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from microslice.inventory.domain import DomainKind, DomainRef, Identifier, LocationRef
from microslice.management.lifecycle import IN_SERVICE, LifecycleState


class DeploymentScenario(str, Enum):
    CLOSED_DEP_A = "closed_dep_a"
    CLOSED_DEP_B = "closed_dep_b"
    MNO_OPEN = "mno_open"
    PUBLIC_OPEN = "public_open"
    MIXED_OPTION_A = "mixed_option_a"
    MIXED_OPTION_B = "mixed_option_b"


class NsiConfigType(str, Enum):
    """
    NSI configuration types.

    :param TYPE1: No constituent is shared with another slice.
    :param TYPE2: Constituent NSSIs may be shared between compatible tenants.
    :param TYPE3: At least one constituent comes from outside the home site of the slice.
    """

    TYPE1 = "type1"
    TYPE2 = "type2"
    TYPE3 = "type3"


class LatencyClass(str, Enum):
    STRICT = "strict"
    RELAXED = "relaxed"


class SharingAgreement(str, Enum):
    NONE = "none"
    WITHIN_LOCATION = "within_location"
    CROSS_LOCATION = "cross_location"


class NetworkMode(str, Enum):
    """How the micro-operator network a request arrives at is deployed."""

    CLOSED = "closed"
    OPEN = "open"
    MIXED = "mixed"


class DepBBridge(str, Enum):
    """How a closed deployment B connects its sites."""

    MNO = "mno"
    MULTI_SITE = "multi_site"


class GroupKind(str, Enum):
    CLOSED = "closed"
    OPEN_MNO_SUBSCRIBERS = "open_mno_subscribers"
    OPEN_PUBLIC = "open_public"


class CustomerGroup(BaseModel):
    """
    The user group a slice serves.

    :param kind: Closed tenant users, subscribers of one MNO, or the general public.
    :param mno: The MNO whose subscribers are served, for ``open_mno_subscribers``.
    :param subscriber_group: Policy key checked with the MNO; defaults to
        ``<mno>-subscribers``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: GroupKind
    mno: Optional[Identifier] = None
    subscriber_group: Optional[Identifier] = None

    @model_validator(mode="before")
    @classmethod
    def _from_string(cls, data: Any) -> Any:
        if isinstance(data, str):
            data = {"kind": data}
        if (
            isinstance(data, dict)
            and data.get("kind") == GroupKind.OPEN_MNO_SUBSCRIBERS.value
            and data.get("mno")
            and not data.get("subscriber_group")
        ):
            data = {**data, "subscriber_group": f"{data['mno']}-subscribers"}
        return data

    @model_validator(mode="after")
    def _check_mno(self) -> "CustomerGroup":
        if self.kind is GroupKind.OPEN_MNO_SUBSCRIBERS:
            if self.mno is None:
                raise ValueError("open_mno_subscribers requires 'mno'")
        elif self.mno is not None or self.subscriber_group is not None:
            raise ValueError("'mno' and 'subscriber_group' only apply to MNO subscribers")
        return self

    @property
    def is_open(self) -> bool:
        return self.kind is not GroupKind.CLOSED


class SliceRequest(BaseModel):
    """
    A validated tenant slice request with locations resolved against the scenario.

    Only `ingest_request` in the CSMF should build these from raw records.
    """

    model_config = ConfigDict(frozen=True)

    tenant_slice_id: Identifier
    tenant_id: Identifier
    latency_ms: float = Field(gt=0)
    throughput_units: int = Field(ge=1)
    duration_ticks: int = Field(ge=1)
    mobility: bool = False
    customer_group: CustomerGroup
    sharing_agreement: SharingAgreement = SharingAgreement.NONE
    share_with_locations: Tuple[LocationRef, ...] = ()
    home_location: LocationRef
    needs_mno_wide_area: bool = False
    mno_needs_uo_access: bool = False
    network_mode: NetworkMode
    dep_b_bridge: DepBBridge = DepBBridge.MNO
    mno: Optional[Identifier] = None
    profile_key: Optional[Identifier] = None

    @model_validator(mode="after")
    def _check_sharing(self) -> "SliceRequest":
        if (
            self.sharing_agreement is SharingAgreement.CROSS_LOCATION
            and not self.share_with_locations
        ):
            raise ValueError("cross_location sharing needs share_with_locations")
        return self

    @property
    def locations(self) -> Tuple[LocationRef, ...]:
        """Home location first, then the other locations in id order."""
        others = sorted(
            {loc for loc in self.share_with_locations if loc != self.home_location},
            key=lambda loc: loc.id,
        )
        return (self.home_location, *others)


class NetworkSliceRequirements(BaseModel):
    """
    Network-level requirements the CSMF derives from a slice request.

    The first fields are the translated requirements; the remaining ones are carried over
    unchanged so the NSMF can place subnets without going back to the request.
    """

    model_config = ConfigDict(frozen=True)

    latency_class: LatencyClass
    throughput_units: int = Field(ge=1)
    sharing: SharingAgreement
    mobility: bool
    locations: Tuple[LocationRef, ...] = Field(min_length=1)
    duration_ticks: int = Field(ge=1)
    external_access: bool
    customer_group: CustomerGroup
    home_location: LocationRef
    profile_key: Identifier
    dep_b_bridge: DepBBridge = DepBBridge.MNO
    mno: Optional[Identifier] = None

    @property
    def allows_sharing(self) -> bool:
        return (
            self.sharing is not SharingAgreement.NONE
            and self.latency_class is LatencyClass.RELAXED
        )


class Nsi(BaseModel):
    """
    An end-to-end network slice instance.

    :param id: ``nsi-<tenant_slice_id>``, or ``nsi-<tenant_slice_id>-<mno>`` for the MNO side
        of a mixed option B service.
    :param request_id: The tenant slice id the NSI was formed for.
    :param constituents: NSSI ids in AN, CN, DN order.
    :param owner_domain: The domain whose NSMF manages the NSI.
    :param serves: The MNO (or ``public``) an open-scenario NSI serves.
    :param history: Every state the NSI has been in, oldest first.
    """

    id: Identifier
    request_id: Identifier
    tenant_id: Identifier
    scenario: DeploymentScenario
    config_type: NsiConfigType
    constituents: List[Identifier] = Field(min_length=1)
    constituent_domains: List[Identifier] = Field(min_length=1)
    owner_domain: DomainRef
    home_location: LocationRef
    state: LifecycleState
    history: List[LifecycleState]
    serves: Optional[str] = None

    @property
    def in_service(self) -> bool:
        return self.state in IN_SERVICE

    @property
    def is_external_owned(self) -> bool:
        return self.owner_domain.kind is DomainKind.MNO


class Verdict(str, Enum):
    APPROVED = "approved"
    REJECTED = "rejected"


class RejectionReason(str, Enum):
    """Why the network provider refused a slice, in check order."""

    NO_AGREEMENT = "no_agreement"
    NOT_YET_VALID = "not_yet_valid"
    EXPIRED = "expired"
    SCENARIO_NOT_ALLOWED = "scenario_not_allowed"
    CHARGING = "charging"
    SUBSCRIPTION = "subscription"
    SHARING_FORBIDDEN = "sharing_forbidden"
    MNO_POLICY_DENIED = "mno_policy_denied"
    MNO_UNREACHABLE = "mno_unreachable"


class ApprovalDecision(BaseModel):
    """
    The network provider's single decision on a request.

    :param reason: Set iff the verdict is ``rejected``.
    """

    model_config = ConfigDict(frozen=True)

    request_id: Identifier
    verdict: Verdict
    reason: Optional[RejectionReason] = None
    decided_at_tick: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_reason(self) -> "ApprovalDecision":
        if (self.verdict is Verdict.REJECTED) != (self.reason is not None):
            raise ValueError("a reason is required exactly for rejections")
        return self

    @property
    def approved(self) -> bool:
        return self.verdict is Verdict.APPROVED
