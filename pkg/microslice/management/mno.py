"""
A simulated external MNO domain.

The stub exposes the three things a micro-operator asks of an MNO: an NSSI for closed
deployment B and mixed option A, a complete NSI for mixed option B, and subscriber-policy
answers for MNO open networks. Failure modes are scripted through `MnoDomain`
(``reachable``, ``grant_nssi`` and an empty or small pool).
"""
from enum import Enum
from typing import Dict

from pydantic import BaseModel, model_validator

from microslice.errors import GrantRefused, MnoUnreachable
from microslice.inventory.domain import DomainKind, DomainRef, LocationRef
from microslice.inventory.pool import NfPool, SubnetKind
from microslice.management.base import Actor, ManagementFunction
from microslice.management.models import (
    DeploymentScenario,
    NetworkSliceRequirements,
    Nsi,
    NsiConfigType,
)
from microslice.management.nsmf import Nsmf, SubnetPlan
from microslice.management.nssmf import Nssi, Nssmf, SubnetRequirement


class PolicyVerdict(str, Enum):
    ALLOW = "allow"
    DENY = "deny"


class MnoDomain(BaseModel):
    """
    Configuration of one MNO stub.

    :param policy_table: Subscriber group to verdict; groups not listed are denied.
    :param reachable: False makes every call raise `MnoUnreachable`.
    :param grant_nssi: False makes NSSI requests raise `GrantRefused`.
    """

    domain: DomainRef
    pool: NfPool
    policy_table: Dict[str, PolicyVerdict] = {}
    reachable: bool = True
    grant_nssi: bool = True

    @model_validator(mode="after")
    def _check_domain(self) -> "MnoDomain":
        if self.domain.kind is not DomainKind.MNO:
            raise ValueError(f"{self.domain.name} is not an MNO domain")
        if self.pool.location.domain != self.domain:
            raise ValueError(f"pool {self.pool.pool_id} is outside {self.domain.name}")
        return self


class MnoNssmf(Nssmf):
    role = "mno_nssmf"
    description = "NSSMF of an external MNO domain"
    actor = Actor.MNO_NSSMF


class MnoNsmf(Nsmf):
    role = "mno_nsmf"
    description = "NSMF of an external MNO domain"
    actor = Actor.MNO_NSMF


class MnoStub(ManagementFunction):
    """
    The MNO as seen from the micro-operator.

    NSSIs come from the MNO pool under the same NSSMF rules as on the micro-operator side;
    MNO-side NSSIs are never shared.
    """

    role = "mno"
    description = "Simulated MNO answering NSSI, NSI and subscriber-policy requests"
    actor = Actor.MNO_NSMF

    def __init__(self, config: MnoDomain):
        super().__init__()
        self.config = config
        self.nssmf = MnoNssmf(config.domain, [config.pool])
        self.nsmf = MnoNsmf(self.nssmf)

    @property
    def name(self) -> str:
        return self.config.domain.name

    @property
    def domain(self) -> DomainRef:
        return self.config.domain

    @property
    def location(self) -> LocationRef:
        return self.config.pool.location

    @property
    def pool(self) -> NfPool:
        return self.config.pool

    def _ensure_reachable(self) -> None:
        if not self.config.reachable:
            raise MnoUnreachable(f"MNO {self.name} is unreachable")

    def mno_provide_nssi(self, req: SubnetRequirement, holder_nsi: str) -> Nssi:
        """
        Provision an exclusive MNO-owned NSSI for a micro-operator NSI.

        :raises MnoUnreachable, GrantRefused, InsufficientResources: Nothing is allocated.
        """
        self._ensure_reachable()
        if not self.config.grant_nssi:
            raise GrantRefused(f"MNO {self.name} refused an NSSI for {holder_nsi}")
        exclusive = req.model_copy(update={"shareable": False})
        return self.nssmf.provision_nssi(exclusive, self.pool, holder_nsi)

    def mno_provide_nsi(
        self, reqs: NetworkSliceRequirements, request_id: str, tenant_id: str
    ) -> Nsi:
        """
        Form a complete MNO-owned NSI (AN, CN and DN from the MNO pool) for mixed option B.

        :raises MnoUnreachable: Nothing is allocated.
        :raises InsufficientResources: After the MNO rolled back its partial NSI.
        """
        self._ensure_reachable()
        plan: SubnetPlan = [
            (
                SubnetRequirement(
                    subnet=subnet,
                    units_needed=reqs.throughput_units,
                    location=self.location,
                    profile_key=reqs.profile_key,
                ),
                None,
            )
            for subnet in (SubnetKind.AN, SubnetKind.CN, SubnetKind.DN)
        ]
        return self.nsmf.compose_nsi(
            nsi_id=f"nsi-{request_id}-{self.name}",
            request_id=request_id,
            tenant_id=tenant_id,
            scenario=DeploymentScenario.MIXED_OPTION_B,
            config_type=NsiConfigType.TYPE1,
            plan=plan,
            home_location=self.location,
        )

    def mno_confirm_policy(self, subscriber_group: str) -> PolicyVerdict:
        self._ensure_reachable()
        verdict = self.config.policy_table.get(subscriber_group, PolicyVerdict.DENY)
        self.logger.debug("{} policy for {}: {}", self.name, subscriber_group, verdict.value)
        return verdict
