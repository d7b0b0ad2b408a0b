"""
The complete engine state of one simulation run.

A `World` wires the management functions of a scenario together: one micro-operator NSSMF
and NSMF over the micro-operator pools, one stub per MNO, the CSMF (subscribed to NSI
lifecycle notices of every NSMF) and the network provider with the agreements on file.
"""
import hashlib
import json
from typing import Any, Dict, Iterable, List, Optional

from microslice.config import SimulationConfig
from microslice.errors import ContractViolation
from microslice.inventory.domain import DomainKind, DomainRef, LocationRef
from microslice.inventory.pool import NfPool, PoolSnapshot, pool_snapshot
from microslice.management.csmf import Csmf
from microslice.management.mno import MnoDomain, MnoStub
from microslice.management.models import Nsi
from microslice.management.nsmf import Nsmf
from microslice.management.nssmf import Nssi, Nssmf
from microslice.management.provider import NetworkProvider, ServiceAgreement
from microslice.scenario.schema import ScenarioSpec


class World:
    """
    :param micro_operator: The single micro-operator domain.
    :param pools: The micro-operator pools, one per location.
    :param mnos: The MNO stub configurations.
    :param agreements: Service agreements on file.
    :param config: Per-run values.
    :param locations: Every location of the simulation, MNO sites included.
    """

    def __init__(
        self,
        micro_operator: DomainRef,
        pools: Iterable[NfPool],
        mnos: Iterable[MnoDomain],
        agreements: Iterable[ServiceAgreement],
        config: SimulationConfig,
        locations: Optional[Iterable[LocationRef]] = None,
        provider_role: str = "micro_operator",
    ):
        if micro_operator.kind is not DomainKind.MICRO_OPERATOR:
            raise ContractViolation(f"{micro_operator.name} is not a micro-operator domain")
        self.config = config
        self.domain = micro_operator
        self.mnos: Dict[str, MnoStub] = {
            mno.domain.name: MnoStub(mno) for mno in sorted(mnos, key=lambda m: m.domain.name)
        }
        self.nssmf = Nssmf(micro_operator, pools)
        self.nsmf = Nsmf(self.nssmf, self.mnos)
        self.csmf = Csmf(provider_role, config.strict_latency_ms)
        self.provider = NetworkProvider(agreements, self.mnos)
        self.nsmf.subscribe(self.csmf.on_lifecycle)
        for stub in self.mnos.values():
            stub.nsmf.subscribe(self.csmf.on_lifecycle)
        known = list(locations) if locations is not None else [
            pool.location for pool in self.all_pools()
        ]
        self.locations: Dict[str, LocationRef] = {loc.id: loc for loc in known}

    @classmethod
    def from_scenario(
        cls, spec: ScenarioSpec, config: Optional[SimulationConfig] = None
    ) -> "World":
        """
        Build the initial state of a scenario.

        :param config: Defaults to the scenario's own threshold and seed.
        """
        if config is None:
            config = SimulationConfig(seed=spec.seed)
            if spec.settings.strict_latency_ms is not None:
                config = config.model_copy(
                    update={"strict_latency_ms": spec.settings.strict_latency_ms}
                )
        micro_operator = DomainRef(
            kind=DomainKind.MICRO_OPERATOR, name=spec.domains.micro_operator.name
        )
        domains = {micro_operator.name: micro_operator}
        for mno in spec.domains.mnos:
            domains[mno.name] = DomainRef(kind=DomainKind.MNO, name=mno.name)
        pools: Dict[str, NfPool] = {}
        for loc in spec.locations:
            if loc.domain not in domains:
                raise ContractViolation(f"location {loc.id} names unknown domain {loc.domain}")
            location = LocationRef(id=loc.id, domain=domains[loc.domain])
            pools[loc.id] = NfPool.build(location, loc.nfs)
        mnos = [
            MnoDomain(
                domain=domains[mno.name],
                pool=pools[mno.location],
                policy_table=mno.policy,
                reachable=mno.reachable,
                grant_nssi=mno.grant_nssi,
            )
            for mno in spec.domains.mnos
        ]
        return cls(
            micro_operator=micro_operator,
            pools=[pool for pool in pools.values() if pool.location.domain == micro_operator],
            mnos=mnos,
            agreements=spec.agreements,
            config=config,
            locations=[pool.location for pool in pools.values()],
            provider_role=spec.domains.micro_operator.provider_role,
        )

    @property
    def mno_names(self) -> List[str]:
        return sorted(self.mnos)

    def nssmfs(self) -> List[Nssmf]:
        return [self.nssmf, *(self.mnos[name].nssmf for name in self.mno_names)]

    def nsmfs(self) -> List[Nsmf]:
        return [self.nsmf, *(self.mnos[name].nsmf for name in self.mno_names)]

    def all_pools(self) -> List[NfPool]:
        return [pool for nssmf in self.nssmfs() for _, pool in sorted(nssmf.pools.items())]

    def snapshots(self) -> Dict[str, PoolSnapshot]:
        return {pool.pool_id: pool_snapshot(pool) for pool in self.all_pools()}

    def live_nssis(self) -> List[Nssi]:
        return [nssi for nssmf in self.nssmfs() for nssi in nssmf.live_nssis()]

    def nsis(self) -> List[Nsi]:
        """Every NSI ever composed and not rolled back, terminated ones included."""
        return [nsmf.nsis[nsi_id] for nsmf in self.nsmfs() for nsi_id in sorted(nsmf.nsis)]

    def nsis_of(self, request_id: str) -> List[Nsi]:
        return [nsi for nsi in self.nsis() if nsi.request_id == request_id]

    def nsmf_owning(self, nsi: Nsi) -> Nsmf:
        for nsmf in self.nsmfs():
            if nsmf.nsis.get(nsi.id) is nsi:
                return nsmf
        raise ContractViolation(f"no NSMF owns {nsi.id}")

    def nssi_of(self, domain_name: str, nssi_id: str) -> Nssi:
        return self.nsmf.nssmf_for(domain_name).get(nssi_id)

    def state_digest(self) -> Dict[str, Any]:
        """JSON-ready view of pools, NSSIs, NSIs and services, for state comparison."""
        return {
            "pools": {
                pool_id: snap.model_dump(mode="json")
                for pool_id, snap in self.snapshots().items()
            },
            "nssis": {
                nssi_id: nssmf.nssis[nssi_id].model_dump(mode="json")
                for nssmf in self.nssmfs()
                for nssi_id in sorted(nssmf.nssis)
            },
            "nsis": {nsi.id: nsi.model_dump(mode="json") for nsi in self.nsis()},
            "services": {
                service_id: self.csmf.services[service_id].model_dump(mode="json")
                for service_id in sorted(self.csmf.services)
            },
        }

    def state_fingerprint(self) -> str:
        """SHA-256 of `state_digest`, stable across processes."""
        canonical = json.dumps(self.state_digest(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
