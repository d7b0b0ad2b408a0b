"""
The scenario file schema.

A scenario describes one micro-operator deployment as data: its domains and locations with
their NF pools, the MNO stubs and their failure modes, the tenants and their service
agreements, and the ordered tenant requests. Optional parts script run-time lifecycle actions,
a final teardown, expected outcomes and seeded synthetic requests.

Unknown fields are errors at every level. Requests stay raw records here because malformed
requests are part of what scenarios exercise; the CSMF validates them during formation.
"""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from microslice.inventory.domain import Identifier
from microslice.inventory.pool import NetworkFunctionResource
from microslice.management.lifecycle import LifecycleEvent
from microslice.management.mno import PolicyVerdict
from microslice.management.models import DeploymentScenario, NsiConfigType
from microslice.management.provider import ServiceAgreement


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ScenarioSettings(_Strict):
    strict_latency_ms: Optional[float] = Field(default=None, gt=0)


class MicroOperatorSpec(_Strict):
    name: Identifier
    provider_role: str = "micro_operator"


class MnoSpec(_Strict):
    """
    One MNO stub.

    :param location: The location holding the MNO pool.
    :param policy: Subscriber group to verdict.
    """

    name: Identifier
    location: Identifier
    policy: Dict[str, PolicyVerdict] = {}
    reachable: bool = True
    grant_nssi: bool = True


class DomainsSpec(_Strict):
    micro_operator: MicroOperatorSpec
    mnos: List[MnoSpec] = []


class NfSpec(NetworkFunctionResource):
    model_config = ConfigDict(frozen=True, extra="forbid")


class LocationSpec(_Strict):
    """A site and its NF pool; ``domain`` names the micro-operator or an MNO."""

    id: Identifier
    domain: Identifier
    nfs: List[NfSpec] = []


class TenantSpec(_Strict):
    id: Identifier
    description: str = ""


class Expectation(_Strict):
    """
    Expected result of one request.

    :param outcome: ``served``, ``rejected``, ``failed`` or a specific
        ``<kind>:<reason>``.
    """

    request_id: Identifier
    outcome: str
    classification: Optional[DeploymentScenario] = None
    config_type: Optional[NsiConfigType] = None


class LifecycleAction(_Strict):
    request_id: Identifier
    event: LifecycleEvent


class SyntheticSpec(_Strict):
    """Seeded extra requests drawn from the scenario's tenants and locations."""

    count: int = Field(ge=1, le=100)
    max_throughput: int = Field(default=3, ge=1)


class ScenarioSpec(_Strict):
    name: Identifier
    description: str = ""
    seed: int = 0
    settings: ScenarioSettings = ScenarioSettings()
    domains: DomainsSpec
    locations: List[LocationSpec] = Field(min_length=1)
    agreements: List[ServiceAgreement] = []
    tenants: List[TenantSpec] = []
    requests: List[Dict[str, Any]] = []
    expectations: List[Expectation] = []
    lifecycle: List[LifecycleAction] = []
    teardown: bool = False
    synthetic: Optional[SyntheticSpec] = None

    def location(self, location_id: str) -> Optional[LocationSpec]:
        return next((loc for loc in self.locations if loc.id == location_id), None)

    def mno_names(self) -> List[str]:
        return sorted(mno.name for mno in self.domains.mnos)
