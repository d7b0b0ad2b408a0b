"""
This module implements the Network Slice Subnet Management Function (NSSMF).

An NSSMF manages the NSSIs of one domain: it provisions AN, CN and DN subnets from the NF
pools of its locations, lets compatible slices share an NSSI through reference counting,
and returns NFs to their pool when the last slice lets go of an NSSI.

Sharing compatibility is the equality of ``profile_key``, subnet kind and location. NF-level
sharing is never done directly: pools allocate every NF to exactly one NSSI, and slices
share NFs only by sharing the NSSI that holds them.

Provisioning is staged. `instantiate_nssi` registers an NSSI without NFs; `allocate_nssi`
then `activate_nssi` complete it. `provision_nssi` runs the stages back to back.

``Nssmf.nssis`` is a history table: terminated NSSIs stay in it for reports and state
digests, and only the rollback of a failed formation forgets an NSSI.

Classes:
    SubnetRequirement: What the NSMF asks for per subnet.
    Nssi: A network slice subnet instance.
    Nssmf: The management function itself.
"""
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field

from microslice.errors import (
    ContractViolation,
    IncompatibleProfile,
    InsufficientResources,
    NotShareable,
    UnknownHolder,
)
from microslice.inventory.domain import DomainRef, Identifier, LocationRef
from microslice.inventory.pool import NfPool, SubnetKind, allocate_nfs, release_nfs
from microslice.management.base import Actor, ManagementFunction
from microslice.management.lifecycle import BRING_UP, LifecycleEvent, LifecycleState, next_state


class SubnetRequirement(BaseModel):
    """
    Requirement for one subnet of a slice.

    :param subnet: AN, CN or DN.
    :param units_needed: Capacity units, at least 1.
    :param location: Where the NSSI must live.
    :param shareable: Whether the resulting NSSI may be shared with other slices.
    :param profile_key: Equivalence class for sharing compatibility.
    """

    model_config = ConfigDict(frozen=True)

    subnet: SubnetKind
    units_needed: int = Field(ge=1)
    location: LocationRef
    shareable: bool = False
    profile_key: Identifier


class Nssi(BaseModel):
    """
    A network slice subnet instance.

    ``holders`` lists the NSIs referencing the NSSI in attach order; ``ref_count`` is its
    length. An exclusive NSSI never has more than one holder.
    """

    id: Identifier
    subnet: SubnetKind
    owner_domain: DomainRef
    location: LocationRef
    nf_ids: List[str]
    shared: bool
    holders: List[str]
    profile_key: Identifier
    state: LifecycleState
    history: List[LifecycleState]

    @property
    def ref_count(self) -> int:
        return len(self.holders)


class ReleaseOutcome(str, Enum):
    DECREMENTED = "decremented"
    TERMINATED = "terminated"


class AggregatedConstituents(BaseModel):
    """
    Constituent NSSIs of one slice grouped by owning domain.

    :param spans_external: True when at least one NSSI is owned by an MNO.
    :param spans_locations: True when the NSSIs live at more than one location.
    """

    model_config = ConfigDict(frozen=True)

    nssi_ids: List[str]
    by_domain: Dict[str, List[str]]
    locations: List[str]
    spans_multiple_domains: bool
    spans_external: bool
    spans_locations: bool


def aggregate_multi_domain(nssis: Sequence[Nssi]) -> AggregatedConstituents:
    """
    Group constituents by domain and flag whether the set leaves the micro-operator.

    :raises ContractViolation: If ``nssis`` is empty.
    """
    if not nssis:
        raise ContractViolation("cannot aggregate an empty constituent list")
    by_domain: Dict[str, List[str]] = {}
    for nssi in nssis:
        by_domain.setdefault(nssi.owner_domain.name, []).append(nssi.id)
    locations = sorted({nssi.location.id for nssi in nssis})
    return AggregatedConstituents(
        nssi_ids=[nssi.id for nssi in nssis],
        by_domain=by_domain,
        locations=locations,
        spans_multiple_domains=len(by_domain) > 1,
        spans_external=any(nssi.owner_domain.is_external for nssi in nssis),
        spans_locations=len(locations) > 1,
    )


class Nssmf(ManagementFunction):
    """
    NSSI lifecycle management for one domain.

    :param domain: The domain whose NSSIs this function manages.
    :param pools: One NF pool per location of the domain.
    """

    role = "nssmf"
    description = "Provisions, shares and releases the NSSIs of one domain"
    actor = Actor.UO_NSSMF

    def __init__(self, domain: DomainRef, pools: Iterable[NfPool]):
        super().__init__()
        self.domain = domain
        self.pools: Dict[str, NfPool] = {}
        for pool in pools:
            if pool.location.domain != domain:
                raise ContractViolation(
                    f"pool {pool.pool_id} belongs to {pool.location.domain.name}, "
                    f"not {domain.name}"
                )
            self.pools[pool.pool_id] = pool
        self.nssis: Dict[str, Nssi] = {}
        self._minted = 0

    def pool_for(self, location: LocationRef) -> NfPool:
        try:
            return self.pools[location.id]
        except KeyError:
            raise ContractViolation(
                f"{self.domain.name} has no pool at {location.id}"
            ) from None

    def get(self, nssi_id: str) -> Nssi:
        return self.nssis[nssi_id]

    def instantiate_nssi(self, req: SubnetRequirement, holder_nsi: str) -> Nssi:
        """
        Register a new NSSI for ``holder_nsi`` before any resource is committed to it.

        :return: The NSSI, Instantiated and without NFs until `allocate_nssi`.
        :raises ContractViolation: If the domain has no pool at the requirement's location.
        """
        self.pool_for(req.location)
        self._minted += 1
        nssi = Nssi(
            id=f"nssi-{self.domain.name}-{self._minted:03d}",
            subnet=req.subnet,
            owner_domain=self.domain,
            location=req.location,
            nf_ids=[],
            shared=req.shareable,
            holders=[holder_nsi],
            profile_key=req.profile_key,
            state=LifecycleState.INSTANTIATED,
            history=[LifecycleState.INSTANTIATED],
        )
        self.nssis[nssi.id] = nssi
        self.logger.debug(
            "instantiated {} ({} at {}) for {}",
            nssi.id,
            req.subnet.value,
            req.location.id,
            holder_nsi,
        )
        return nssi

    def allocate_nssi(self, nssi: Nssi, req: SubnetRequirement, pool: NfPool) -> List[str]:
        """
        Take NFs for an Instantiated NSSI from ``pool``.

        :raises ContractViolation: If the NSSI already holds NFs or ``pool`` is foreign.
        :raises InsufficientResources: Propagated from the pool, which stays unchanged.
        """
        if nssi.state is not LifecycleState.INSTANTIATED or nssi.nf_ids:
            raise ContractViolation(f"{nssi.id} is {nssi.state.value} with {nssi.nf_ids}")
        if pool.location != nssi.location or pool.pool_id not in self.pools:
            raise ContractViolation(f"pool {pool.pool_id} cannot serve {nssi.id}")
        nssi.nf_ids = allocate_nfs(pool, req.subnet, req.units_needed, nssi.id)
        self.logger.debug("{} allocated {} from {}", nssi.id, nssi.nf_ids, pool.pool_id)
        return nssi.nf_ids

    def activate_nssi(self, nssi: Nssi) -> Nssi:
        """
        Configure and activate an NSSI whose NFs are allocated.

        :raises ContractViolation: If it holds no NF.
        :raises InvalidTransition: If it is not Instantiated.
        """
        if not nssi.nf_ids:
            raise ContractViolation(f"{nssi.id} holds no NF")
        for event in BRING_UP:
            nssi.state = next_state(nssi.state, event)
            nssi.history.append(nssi.state)
        return nssi

    def abandon_nssi(self, nssi: Nssi, pool: NfPool) -> None:
        """
        Drop an NSSI that never got activated. Its NFs go back to ``pool`` and, when it is the
        newest NSSI, its id is minted again.
        """
        if nssi.state is not LifecycleState.INSTANTIATED:
            raise ContractViolation(f"cannot abandon {nssi.id} in state {nssi.state.value}")
        release_nfs(pool, nssi.id)
        del self.nssis[nssi.id]
        if nssi.id == f"nssi-{self.domain.name}-{self._minted:03d}":
            self._minted -= 1
        self.logger.debug("abandoned {}", nssi.id)

    def provision_nssi(
        self, req: SubnetRequirement, pool: NfPool, holder_nsi: str
    ) -> Nssi:
        """
        Build a new NSSI from free NFs of ``pool`` in one go.

        :return: The NSSI, Activated, with ``holder_nsi`` as its only holder.
        :raises ContractViolation: If the pool is not at the requirement's location.
        :raises InsufficientResources: Propagated from the pool, which stays unchanged.
        """
        if pool.location != req.location:
            raise ContractViolation(
                f"pool {pool.pool_id} does not serve location {req.location.id}"
            )
        if pool.pool_id not in self.pools:
            raise ContractViolation(f"pool {pool.pool_id} is not managed by {self.domain.name}")
        with self.tracer.start_as_current_span("provision_nssi"):
            nssi = self.instantiate_nssi(req, holder_nsi)
            try:
                self.allocate_nssi(nssi, req, pool)
            except InsufficientResources:
                self.abandon_nssi(nssi, pool)
                raise
            return self.activate_nssi(nssi)

    def attach_shared(
        self, existing: Nssi, holder_nsi: str, req: SubnetRequirement
    ) -> Nssi:
        """
        Add ``holder_nsi`` as a holder of a shared NSSI. No NF is allocated.

        :raises NotShareable: If the NSSI is exclusive.
        :raises IncompatibleProfile: If profile, subnet or location differ.
        :raises ContractViolation: If the NSSI is not active or already held by the NSI.
        """
        if not existing.shared:
            raise NotShareable(f"{existing.id} is exclusive")
        if (
            existing.profile_key != req.profile_key
            or existing.subnet is not req.subnet
            or existing.location != req.location
        ):
            raise IncompatibleProfile(
                f"{existing.id} ({existing.profile_key}/{existing.subnet.value}/"
                f"{existing.location.id}) does not match {req.profile_key}/"
                f"{req.subnet.value}/{req.location.id}"
            )
        if existing.state is not LifecycleState.ACTIVATED:
            raise ContractViolation(f"{existing.id} is {existing.state.value}")
        if holder_nsi in existing.holders:
            raise ContractViolation(f"{holder_nsi} already holds {existing.id}")
        existing.holders.append(holder_nsi)
        self.logger.debug(
            "{} attached to shared {} (ref {})", holder_nsi, existing.id, existing.ref_count
        )
        return existing

    def find_shareable(self, req: SubnetRequirement) -> Optional[Nssi]:
        """Lowest-id active shared NSSI compatible with ``req``, if any."""
        for nssi_id in sorted(self.nssis):
            nssi = self.nssis[nssi_id]
            if (
                nssi.shared
                and nssi.state is LifecycleState.ACTIVATED
                and nssi.profile_key == req.profile_key
                and nssi.subnet is req.subnet
                and nssi.location == req.location
            ):
                return nssi
        return None

    def release_nssi(self, nssi: Nssi, holder_nsi: str, pool: NfPool) -> ReleaseOutcome:
        """
        Drop one holder. The last holder terminates the NSSI and frees its NFs.

        :raises UnknownHolder: If ``holder_nsi`` does not reference the NSSI.
        """
        if holder_nsi not in nssi.holders:
            raise UnknownHolder(f"{holder_nsi} does not hold {nssi.id}")
        nssi.holders.remove(holder_nsi)
        if nssi.holders:
            self.logger.debug(
                "{} released {} (ref {})", holder_nsi, nssi.id, nssi.ref_count
            )
            return ReleaseOutcome.DECREMENTED
        for event in (LifecycleEvent.DEACTIVATE, LifecycleEvent.TERMINATE):
            nssi.state = next_state(nssi.state, event)
            nssi.history.append(nssi.state)
        release_nfs(pool, nssi.id)
        self.logger.debug("{} terminated, NFs {} back in {}", nssi.id, nssi.nf_ids, pool.pool_id)
        return ReleaseOutcome.TERMINATED

    def discard(self, nssi_id: str) -> None:
        """Forget a terminated NSSI; used when a failed formation is rolled back."""
        nssi = self.nssis[nssi_id]
        if nssi.state is not LifecycleState.TERMINATED:
            raise ContractViolation(f"cannot discard {nssi_id} in state {nssi.state.value}")
        del self.nssis[nssi_id]

    def manage_nssis(self, nssis: Sequence[Nssi]) -> List[str]:
        """
        Management and control of the NSSIs handed to the NSMF. Nothing changes state; the
        call only marks the point where the NSSMF hands its subnets over.
        """
        foreign = [nssi.id for nssi in nssis if nssi.owner_domain != self.domain]
        if foreign:
            raise ContractViolation(f"{self.domain.name} does not manage {foreign}")
        return [nssi.id for nssi in nssis]

    def live_nssis(self) -> List[Nssi]:
        return [
            self.nssis[nssi_id]
            for nssi_id in sorted(self.nssis)
            if self.nssis[nssi_id].state is not LifecycleState.TERMINATED
        ]
