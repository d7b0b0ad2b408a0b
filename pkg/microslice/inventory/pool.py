"""
This module implements the capacity-accounted NF inventory.

An `NfPool` holds the VNF/PNF resources of one location together with an allocation map
from NF id to the NSSI currently holding it. `allocate_nfs` and `release_nfs` are the only
mutators; `pool_snapshot` produces an immutable accounting record per subnet kind.

Selection is deterministic: free NFs of the requested subnet are scanned in ascending id
order (natural order, so ``nf2`` sorts before ``nf10``) until their capacity covers the need,
then NFs whose capacity turns out not to be needed are dropped, lowest id first. The result is
the same for the same call sequence and no proper subset of it covers the need.

Example:
    pool = NfPool.build(location, [NetworkFunctionResource(id="nf1", ...), ...])
    held = allocate_nfs(pool, SubnetKind.AN, 2, holder="nssi-uo-001")
    release_nfs(pool, "nssi-uo-001")
"""
import re
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from microslice.errors import ContractViolation, InsufficientResources
from microslice.inventory.domain import Identifier, LocationRef


class NfKind(str, Enum):
    VNF = "vnf"
    PNF = "pnf"


class SubnetKind(str, Enum):
    """
    Subnet kinds an NSSI can realize.

    :param AN: Access network.
    :param CN: Core network.
    :param DN: Data network.
    """

    AN = "an"
    CN = "cn"
    DN = "dn"


def nf_sort_key(nf_id: str) -> Tuple:
    """Natural sort key: digit runs compare numerically."""
    return tuple(
        (0, int(part), "") if part.isdigit() else (1, 0, part)
        for part in re.split(r"(\d+)", nf_id)
        if part
    )


class NetworkFunctionResource(BaseModel):
    """
    One virtual or physical network function.

    :param id: NF id, unique within its pool.
    :param kind: VNF or PNF.
    :param subnet_affinity: The only subnet kind this NF can serve.
    :param capacity_units: Integer capacity, at least 1.
    """

    model_config = ConfigDict(frozen=True)

    id: Identifier
    kind: NfKind = NfKind.VNF
    subnet_affinity: SubnetKind
    capacity_units: int = Field(ge=1)


class SubnetAccounting(BaseModel):
    """NF counts and capacity units of one subnet kind in one pool."""

    model_config = ConfigDict(frozen=True)

    total: int
    allocated: int
    free: int
    total_units: int
    allocated_units: int
    free_units: int


class PoolSnapshot(BaseModel):
    """
    Immutable accounting record of a pool.

    :param pool_id: The location id of the pool.
    :param subnets: Accounting per subnet kind, always listing AN, CN and DN.
    :param allocations: NF id to holder, free NFs omitted, in NF order.
    """

    model_config = ConfigDict(frozen=True)

    pool_id: str
    subnets: Dict[SubnetKind, SubnetAccounting]
    allocations: Dict[str, str]

    @property
    def total(self) -> int:
        return sum(acc.total for acc in self.subnets.values())

    @property
    def allocated(self) -> int:
        return sum(acc.allocated for acc in self.subnets.values())

    @property
    def free(self) -> int:
        return sum(acc.free for acc in self.subnets.values())

    @property
    def allocated_units(self) -> int:
        return sum(acc.allocated_units for acc in self.subnets.values())


class NfPool(BaseModel):
    """
    NF inventory of one location.

    :param location: Where the pool lives; its domain owns every NF in it.
    :param resources: The NFs, kept in ascending id order.
    :param allocations: NF id to holder NSSI id, ``None`` when free.
    """

    location: LocationRef
    resources: List[NetworkFunctionResource]
    allocations: Dict[str, Optional[str]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _normalise(self) -> "NfPool":
        ids = [nf.id for nf in self.resources]
        if len(ids) != len(set(ids)):
            raise ValueError(f"duplicate NF ids in pool {self.location.id}")
        self.resources = sorted(self.resources, key=lambda nf: nf_sort_key(nf.id))
        unknown = set(self.allocations) - set(ids)
        if unknown:
            raise ValueError(f"allocations reference unknown NFs: {sorted(unknown)}")
        for nf_id in ids:
            self.allocations.setdefault(nf_id, None)
        return self

    @classmethod
    def build(
        cls, location: LocationRef, resources: Iterable[NetworkFunctionResource]
    ) -> "NfPool":
        """Create a pool with every NF free."""
        return cls(location=location, resources=list(resources))

    @property
    def pool_id(self) -> str:
        return self.location.id

    def resource(self, nf_id: str) -> NetworkFunctionResource:
        for nf in self.resources:
            if nf.id == nf_id:
                return nf
        raise KeyError(nf_id)

    def held_by(self, holder: str) -> List[str]:
        """NF ids currently allocated to ``holder``, in NF order."""
        return [nf.id for nf in self.resources if self.allocations[nf.id] == holder]

    def free_resources(self, subnet: SubnetKind) -> List[NetworkFunctionResource]:
        return [
            nf
            for nf in self.resources
            if nf.subnet_affinity is subnet and self.allocations[nf.id] is None
        ]


def _select(free: List[NetworkFunctionResource], units_needed: int) -> List[str]:
    chosen: List[NetworkFunctionResource] = []
    covered = 0
    for nf in free:
        if covered >= units_needed:
            break
        chosen.append(nf)
        covered += nf.capacity_units
    if covered < units_needed:
        return []
    kept: List[NetworkFunctionResource] = []
    for nf in chosen:
        if covered - nf.capacity_units >= units_needed:
            covered -= nf.capacity_units
            continue
        kept.append(nf)
    return [nf.id for nf in kept]


def allocate_nfs(
    pool: NfPool, subnet: SubnetKind, units_needed: int, holder: str
) -> List[str]:
    """
    Allocate NFs of one subnet kind to a holder, all or nothing.

    :param pool: The pool to draw from.
    :param subnet: Subnet kind the NFs must serve.
    :param units_needed: Capacity to cover, at least 1.
    :param holder: The NSSI id that will hold the NFs.
    :return: The allocated NF ids in ascending order.
    :raises ContractViolation: If ``units_needed < 1`` or the holder already holds NFs of
        this subnet kind in the pool.
    :raises InsufficientResources: If the free capacity of the subnet is below the need.
        The pool is left untouched.
    """
    if units_needed < 1:
        raise ContractViolation(f"units_needed must be >= 1, got {units_needed}")
    if any(
        pool.resource(nf_id).subnet_affinity is subnet
        for nf_id in pool.held_by(holder)
    ):
        raise ContractViolation(
            f"{holder} already holds {subnet.value} NFs in pool {pool.pool_id}"
        )
    free = pool.free_resources(subnet)
    selected = _select(free, units_needed)
    if not selected:
        available = sum(nf.capacity_units for nf in free)
        logger.debug(
            "pool {} cannot cover {} {} units ({} free)",
            pool.pool_id,
            units_needed,
            subnet.value,
            available,
        )
        raise InsufficientResources(
            f"pool {pool.pool_id}: {subnet.value} needs {units_needed} units, "
            f"{available} free"
        )
    for nf_id in selected:
        pool.allocations[nf_id] = holder
    logger.debug("pool {} allocated {} to {}", pool.pool_id, selected, holder)
    return selected


def release_nfs(pool: NfPool, holder: str) -> List[str]:
    """
    Free every NF held by ``holder``. Releasing a holder with nothing allocated is a no-op.

    :return: The freed NF ids in ascending order.
    """
    released = pool.held_by(holder)
    for nf_id in released:
        pool.allocations[nf_id] = None
    if released:
        logger.debug("pool {} released {} from {}", pool.pool_id, released, holder)
    return released


def pool_snapshot(pool: NfPool) -> PoolSnapshot:
    """Account the pool per subnet kind; ``total = allocated + free`` by construction."""
    subnets: Dict[SubnetKind, SubnetAccounting] = {}
    for subnet in SubnetKind:
        members = [nf for nf in pool.resources if nf.subnet_affinity is subnet]
        held = [nf for nf in members if pool.allocations[nf.id] is not None]
        total_units = sum(nf.capacity_units for nf in members)
        held_units = sum(nf.capacity_units for nf in held)
        subnets[subnet] = SubnetAccounting(
            total=len(members),
            allocated=len(held),
            free=len(members) - len(held),
            total_units=total_units,
            allocated_units=held_units,
            free_units=total_units - held_units,
        )
    allocations = {
        nf.id: holder
        for nf in pool.resources
        if (holder := pool.allocations[nf.id]) is not None
    }
    return PoolSnapshot(pool_id=pool.pool_id, subnets=subnets, allocations=allocations)
