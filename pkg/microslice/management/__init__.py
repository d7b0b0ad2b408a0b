"""
This package contains the management functions of the micro-operator slicing architecture.

- `Csmf`: tenant-facing translation and communication service delivery.
- `NetworkProvider`: approval gate over service agreements.
- `Nsmf`: scenario classification, NSI composition and lifecycle.
- `Nssmf`: NSSI provisioning, sharing and release on top of the NF pools.
- `MnoStub`: the simulated external MNO domain.

All of them derive from `ManagementFunction`, which gives each a role, a trace actor, a
logger and a tracer.
"""
from microslice.management.base import Actor, ManagementFunction
from microslice.management.csmf import (
    CommunicationService,
    Csmf,
    DeliveryEvent,
    RawSliceRequest,
    ServiceStatus,
    ingest_request,
    translate_request,
)
from microslice.management.lifecycle import (
    LifecycleEvent,
    LifecycleState,
    is_legal_path,
    next_state,
)
from microslice.management.mno import MnoDomain, MnoNsmf, MnoNssmf, MnoStub, PolicyVerdict
from microslice.management.models import (
    ApprovalDecision,
    CustomerGroup,
    DepBBridge,
    DeploymentScenario,
    GroupKind,
    LatencyClass,
    NetworkMode,
    NetworkSliceRequirements,
    Nsi,
    NsiConfigType,
    RejectionReason,
    SharingAgreement,
    SliceRequest,
    Verdict,
)
from microslice.management.nsmf import (
    ConstituentRecord,
    LifecycleNotice,
    NsiFormation,
    Nsmf,
    TerminationReport,
    classify_scenario,
    determine_config_type,
)
from microslice.management.nssmf import (
    AggregatedConstituents,
    Nssi,
    Nssmf,
    ReleaseOutcome,
    SubnetRequirement,
    aggregate_multi_domain,
)
from microslice.management.provider import (
    NetworkProvider,
    ServiceAgreement,
    SubscriberPolicy,
    approve_request,
    confirm_subscriber_policy,
)

__all__ = [
    "Actor",
    "AggregatedConstituents",
    "ApprovalDecision",
    "CommunicationService",
    "ConstituentRecord",
    "Csmf",
    "CustomerGroup",
    "DeliveryEvent",
    "DepBBridge",
    "DeploymentScenario",
    "GroupKind",
    "LatencyClass",
    "LifecycleEvent",
    "LifecycleNotice",
    "LifecycleState",
    "ManagementFunction",
    "MnoDomain",
    "MnoNsmf",
    "MnoNssmf",
    "MnoStub",
    "NetworkMode",
    "NetworkProvider",
    "NetworkSliceRequirements",
    "Nsi",
    "NsiConfigType",
    "NsiFormation",
    "Nsmf",
    "Nssi",
    "Nssmf",
    "PolicyVerdict",
    "RawSliceRequest",
    "RejectionReason",
    "ReleaseOutcome",
    "ServiceAgreement",
    "ServiceStatus",
    "SharingAgreement",
    "SliceRequest",
    "SubnetRequirement",
    "SubscriberPolicy",
    "TerminationReport",
    "Verdict",
    "aggregate_multi_domain",
    "approve_request",
    "classify_scenario",
    "confirm_subscriber_policy",
    "determine_config_type",
    "ingest_request",
    "is_legal_path",
    "next_state",
    "translate_request",
]
