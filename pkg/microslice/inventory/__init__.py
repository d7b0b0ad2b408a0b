"""
This package holds the NF inventory: domains, locations and capacity-accounted NF pools.

Classes:
    DomainRef, LocationRef: Administrative domain and site references.
    NetworkFunctionResource: One VNF or PNF with a subnet affinity and integer capacity.
    NfPool: The NFs of one location and their allocation map.
    PoolSnapshot: Immutable per-subnet accounting record.

Functions:
    allocate_nfs, release_nfs, pool_snapshot: The pool operations.
"""
from microslice.inventory.domain import DomainKind, DomainRef, Identifier, LocationRef
from microslice.inventory.pool import (
    NetworkFunctionResource,
    NfKind,
    NfPool,
    PoolSnapshot,
    SubnetAccounting,
    SubnetKind,
    allocate_nfs,
    nf_sort_key,
    pool_snapshot,
    release_nfs,
)

__all__ = [
    "DomainKind",
    "DomainRef",
    "Identifier",
    "LocationRef",
    "NetworkFunctionResource",
    "NfKind",
    "NfPool",
    "PoolSnapshot",
    "SubnetAccounting",
    "SubnetKind",
    "allocate_nfs",
    "nf_sort_key",
    "pool_snapshot",
    "release_nfs",
]
