"""
The network-provider approval gate.

Before anything is provisioned the micro-operator, acting as network provider, checks the
tenant's service agreement together with its policy, charging, subscription and sharing
information. For MNO open networks it also asks the MNO to confirm its subscriber policy.
The first failing check names the rejection reason, in this order: validity, scenario,
charging, subscription, sharing, then MNO subscriber policy.
"""
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from microslice.errors import ContractViolation, MnoUnreachable, NoAgreementOnFile
from microslice.inventory.domain import Identifier
from microslice.management.base import Actor, ManagementFunction
from microslice.management.mno import MnoStub, PolicyVerdict
from microslice.management.models import (
    ApprovalDecision,
    DeploymentScenario,
    RejectionReason,
    SharingAgreement,
    SliceRequest,
    Verdict,
)


class ServiceAgreement(BaseModel):
    """
    A tenant's service agreement with the micro-operator.

    :param valid_from_tick: First tick the agreement covers.
    :param valid_until_tick: Last tick the agreement covers, inclusive.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    tenant_id: Identifier
    valid_from_tick: int = Field(default=0, ge=0)
    valid_until_tick: int
    allowed_scenarios: FrozenSet[DeploymentScenario]
    sharing_permitted: bool = False
    charging_ok: bool = True
    subscription_ok: bool = True

    @model_validator(mode="after")
    def _check_window(self) -> "ServiceAgreement":
        if self.valid_from_tick > self.valid_until_tick:
            raise ValueError("valid_from_tick must not be after valid_until_tick")
        return self


class SubscriberPolicy(str, Enum):
    CONFIRMED = "confirmed"
    DENIED = "denied"


def _decision(
    req: SliceRequest, now_tick: int, reason: Optional[RejectionReason] = None
) -> ApprovalDecision:
    return ApprovalDecision(
        request_id=req.tenant_slice_id,
        verdict=Verdict.APPROVED if reason is None else Verdict.REJECTED,
        reason=reason,
        decided_at_tick=now_tick,
    )


def approve_request(
    req: SliceRequest,
    agreement: ServiceAgreement,
    now_tick: int,
    scenario: DeploymentScenario,
) -> ApprovalDecision:
    """Decide a request against its tenant's agreement; the first failing check wins."""
    if now_tick < agreement.valid_from_tick:
        return _decision(req, now_tick, RejectionReason.NOT_YET_VALID)
    if now_tick > agreement.valid_until_tick:
        return _decision(req, now_tick, RejectionReason.EXPIRED)
    if scenario not in agreement.allowed_scenarios:
        return _decision(req, now_tick, RejectionReason.SCENARIO_NOT_ALLOWED)
    if not agreement.charging_ok:
        return _decision(req, now_tick, RejectionReason.CHARGING)
    if not agreement.subscription_ok:
        return _decision(req, now_tick, RejectionReason.SUBSCRIPTION)
    if req.sharing_agreement is not SharingAgreement.NONE and not agreement.sharing_permitted:
        return _decision(req, now_tick, RejectionReason.SHARING_FORBIDDEN)
    return _decision(req, now_tick)


def confirm_subscriber_policy(mno: MnoStub, subscriber_group: str) -> SubscriberPolicy:
    """
    Ask an MNO whether its subscriber group may use the micro-operator network.

    :raises MnoUnreachable: If the MNO stub is unreachable.
    """
    if mno.mno_confirm_policy(subscriber_group) is PolicyVerdict.ALLOW:
        return SubscriberPolicy.CONFIRMED
    return SubscriberPolicy.DENIED


class NetworkProvider(ManagementFunction):
    """
    Keeps the agreements on file and records exactly one decision per request.

    :param agreements: At most one agreement per tenant.
    :param mnos: MNO stubs, by name, for subscriber-policy confirmation.
    """

    role = "network_provider"
    description = "Approves or rejects slice creation against service agreements"
    actor = Actor.NETWORK_PROVIDER

    def __init__(self, agreements: Iterable[ServiceAgreement], mnos: Mapping[str, MnoStub]):
        super().__init__()
        self.agreements: Dict[str, ServiceAgreement] = {}
        for agreement in agreements:
            if agreement.tenant_id in self.agreements:
                raise ContractViolation(f"two agreements for tenant {agreement.tenant_id}")
            self.agreements[agreement.tenant_id] = agreement
        self.mnos = dict(mnos)
        self.decisions: Dict[str, ApprovalDecision] = {}

    def lookup_agreement(self, tenant_id: str) -> ServiceAgreement:
        try:
            return self.agreements[tenant_id]
        except KeyError:
            raise NoAgreementOnFile(f"no agreement on file for {tenant_id}") from None

    def _check_subscriber_policy(self, req: SliceRequest) -> Optional[RejectionReason]:
        group = req.customer_group
        mno = self.mnos.get(group.mno or "")
        if mno is None:
            return RejectionReason.MNO_UNREACHABLE
        try:
            answer = confirm_subscriber_policy(mno, group.subscriber_group or "")
        except MnoUnreachable:
            return RejectionReason.MNO_UNREACHABLE
        if answer is SubscriberPolicy.DENIED:
            return RejectionReason.MNO_POLICY_DENIED
        return None

    def decide(
        self, req: SliceRequest, scenario: DeploymentScenario, now_tick: int
    ) -> ApprovalDecision:
        """
        Record the single decision for ``req``.

        :raises ContractViolation: If the request was already decided.
        """
        if req.tenant_slice_id in self.decisions:
            raise ContractViolation(f"{req.tenant_slice_id} was already decided")
        with self.tracer.start_as_current_span("decide"):
            try:
                agreement = self.lookup_agreement(req.tenant_id)
            except NoAgreementOnFile:
                decision = _decision(req, now_tick, RejectionReason.NO_AGREEMENT)
            else:
                decision = approve_request(req, agreement, now_tick, scenario)
                if decision.approved and scenario is DeploymentScenario.MNO_OPEN:
                    refusal = self._check_subscriber_policy(req)
                    if refusal is not None:
                        decision = _decision(req, now_tick, refusal)
        self.decisions[req.tenant_slice_id] = decision
        if decision.approved:
            self.logger.info("{} approved at tick {}", req.tenant_slice_id, now_tick)
        else:
            reason = decision.reason.value if decision.reason else "?"
            self.logger.warning("{} rejected: {}", req.tenant_slice_id, reason)
        return decision
