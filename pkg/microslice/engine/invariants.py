"""
The invariant suite run after every engine event.

Each check looks at the whole `World` by brute force, independently of the bookkeeping the
management functions keep, and returns the problems it finds. `InvariantSuite.check` raises
`InvariantViolation` on the first event where any check fails; a failing invariant always
means a simulator bug.
"""
from itertools import combinations
from typing import Callable, Dict, List, Set, Tuple

from loguru import logger
from pydantic import BaseModel

from microslice.engine.trace import TraceEvent
from microslice.engine.world import World
from microslice.errors import InvariantViolation
from microslice.inventory.pool import SubnetKind, pool_snapshot
from microslice.management.lifecycle import LifecycleState
from microslice.management.models import DeploymentScenario, NsiConfigType

# An NF is identified by its pool and its id.
NfKey = Tuple[str, str]

Check = Callable[[World], List[str]]


def check_pool_conservation(world: World) -> List[str]:
    problems = []
    for pool in world.all_pools():
        snap = pool_snapshot(pool)
        for subnet in SubnetKind:
            members = [nf for nf in pool.resources if nf.subnet_affinity is subnet]
            held = [nf for nf in members if pool.allocations.get(nf.id) is not None]
            acc = snap.subnets[subnet]
            if (acc.total, acc.allocated, acc.free) != (
                len(members),
                len(held),
                len(members) - len(held),
            ):
                problems.append(f"pool {pool.pool_id} {subnet.value}: count mismatch {acc}")
            if acc.allocated_units + acc.free_units != acc.total_units:
                problems.append(f"pool {pool.pool_id} {subnet.value}: unit mismatch {acc}")
        if set(pool.allocations) != {nf.id for nf in pool.resources}:
            problems.append(f"pool {pool.pool_id}: allocation map does not cover the pool")
    return problems


def check_pool_exclusivity(world: World) -> List[str]:
    """Every held NF belongs to exactly the live NSSI holding it, and vice versa."""
    problems = []
    owner: Dict[NfKey, str] = {}
    for nssi in world.live_nssis():
        for nf_id in nssi.nf_ids:
            owner[(nssi.location.id, nf_id)] = nssi.id
    for pool in world.all_pools():
        for nf_id, holder in pool.allocations.items():
            expected = owner.pop((pool.pool_id, nf_id), None)
            if holder != expected:
                problems.append(
                    f"pool {pool.pool_id}: {nf_id} held by {holder}, NSSIs say {expected}"
                )
    for (pool_id, nf_id), nssi_id in sorted(owner.items()):
        problems.append(f"{nssi_id} lists {nf_id} missing from pool {pool_id}")
    return problems


def check_nssi_refcounts(world: World) -> List[str]:
    problems = []
    for nssmf in world.nssmfs():
        for nssi in nssmf.nssis.values():
            if nssi.state is LifecycleState.TERMINATED:
                if nssi.ref_count:
                    problems.append(f"{nssi.id} is terminated with ref {nssi.ref_count}")
                continue
            if nssi.ref_count < 1:
                problems.append(f"{nssi.id} is {nssi.state.value} with no holder")
            if not nssi.shared and nssi.ref_count != 1:
                problems.append(f"exclusive {nssi.id} has ref {nssi.ref_count}")
            if not nssi.nf_ids and nssi.state is not LifecycleState.INSTANTIATED:
                problems.append(f"{nssi.id} is {nssi.state.value} and holds no NF")
            if len(set(nssi.holders)) != len(nssi.holders):
                problems.append(f"{nssi.id} lists a holder twice: {nssi.holders}")
    return problems


def check_nf_disjointness(world: World) -> List[str]:
    problems = []
    for left, right in combinations(world.live_nssis(), 2):
        if left.location != right.location:
            continue
        shared = set(left.nf_ids) & set(right.nf_ids)
        if shared:
            problems.append(f"{left.id} and {right.id} both hold {sorted(shared)}")
    return problems


def _live_nsi_nfs(world: World) -> Dict[str, Tuple[Set[NfKey], Set[str]]]:
    footprint: Dict[str, Tuple[Set[NfKey], Set[str]]] = {}
    for nsi in world.nsis():
        if nsi.state is LifecycleState.TERMINATED:
            continue
        nfs: Set[NfKey] = set()
        for nssi_id, domain in zip(nsi.constituents, nsi.constituent_domains):
            nssi = world.nssi_of(domain, nssi_id)
            nfs.update((nssi.location.id, nf_id) for nf_id in nssi.nf_ids)
        footprint[nsi.id] = (nfs, set(nsi.constituents))
    return footprint


def check_type1_isolation(world: World) -> List[str]:
    problems = []
    footprint = _live_nsi_nfs(world)
    for nsi in world.nsis():
        if nsi.config_type is not NsiConfigType.TYPE1 or nsi.id not in footprint:
            continue
        nfs, nssis = footprint[nsi.id]
        for nssi_id, domain in zip(nsi.constituents, nsi.constituent_domains):
            if world.nssi_of(domain, nssi_id).shared:
                problems.append(f"Type 1 {nsi.id} has shared constituent {nssi_id}")
        for other_id, (other_nfs, other_nssis) in footprint.items():
            if other_id == nsi.id:
                continue
            if nfs & other_nfs:
                problems.append(f"Type 1 {nsi.id} shares NFs with {other_id}")
            if nssis & other_nssis:
                problems.append(f"Type 1 {nsi.id} shares NSSIs with {other_id}")
    return problems


def check_type3_witness(world: World) -> List[str]:
    problems = []
    for nsi in world.nsis():
        if nsi.config_type is not NsiConfigType.TYPE3 or nsi.state is LifecycleState.TERMINATED:
            continue
        nssis = [
            world.nssi_of(domain, nssi_id)
            for nssi_id, domain in zip(nsi.constituents, nsi.constituent_domains)
        ]
        if not any(
            nssi.owner_domain != nsi.owner_domain or nssi.location != nsi.home_location
            for nssi in nssis
        ):
            problems.append(f"Type 3 {nsi.id} has no external or remote constituent")
    return problems


def check_dep_a_coherence(world: World) -> List[str]:
    return [
        f"deployment A {nsi.id} references MNO NSSIs"
        for nsi in world.nsis()
        if nsi.scenario is DeploymentScenario.CLOSED_DEP_A
        and any(domain in world.mnos for domain in nsi.constituent_domains)
    ]


def check_nsi_constituents(world: World) -> List[str]:
    problems = []
    for nsi in world.nsis():
        if nsi.state is LifecycleState.TERMINATED:
            continue
        for nssi_id, domain in zip(nsi.constituents, nsi.constituent_domains):
            nssi = world.nssi_of(domain, nssi_id)
            if nsi.id not in nssi.holders:
                problems.append(f"{nsi.id} is not a holder of its constituent {nssi_id}")
    return problems


def check_service_coherence(world: World) -> List[str]:
    problems = []
    nsis = {nsi.id: nsi for nsi in world.nsis()}
    for service in world.csmf.services.values():
        if not service.active:
            continue
        for nsi_id in service.nsi_ids:
            nsi = nsis.get(nsi_id)
            if nsi is None:
                problems.append(f"{service.id} references unknown {nsi_id}")
            elif not nsi.in_service:
                problems.append(f"active {service.id} references {nsi_id} in {nsi.state.value}")
            elif nsi.tenant_id != service.tenant_id:
                problems.append(f"{service.id} of {service.tenant_id} holds {nsi_id}")
        if len(set(service.owner_domains)) != len(service.owner_domains):
            problems.append(f"{service.id} holds two NSIs of one domain")
    return problems


DEFAULT_CHECKS: Tuple[Check, ...] = (
    check_pool_conservation,
    check_pool_exclusivity,
    check_nssi_refcounts,
    check_nf_disjointness,
    check_type1_isolation,
    check_type3_witness,
    check_dep_a_coherence,
    check_nsi_constituents,
    check_service_coherence,
)


class InvariantSummary(BaseModel):
    checks: List[str]
    evaluations: int
    passed: bool


class InvariantSuite:
    """
    Runs every check against a world; usable as an engine hook.

    :param world: The state to check.
    :param checks: Defaults to the full suite.
    """

    def __init__(self, world: World, checks: Tuple[Check, ...] = DEFAULT_CHECKS):
        self.world = world
        self.checks = checks
        self.evaluations = 0

    def violations(self) -> List[str]:
        return [
            f"{check.__name__}: {problem}"
            for check in self.checks
            for problem in check(self.world)
        ]

    def check(self, context: str = "") -> None:
        """:raises InvariantViolation: Listing every broken invariant."""
        self.evaluations += 1
        problems = self.violations()
        if problems:
            logger.error("invariants broken {}: {}", context, problems)
            raise InvariantViolation(f"invariants broken {context}: " + "; ".join(problems))

    def __call__(self, event: TraceEvent) -> None:
        self.check(f"after event {event.seq_no} of {event.request_id} (step {event.step.value})")

    def summary(self) -> InvariantSummary:
        return InvariantSummary(
            checks=[check.__name__ for check in self.checks],
            evaluations=self.evaluations,
            passed=not self.violations(),
        )
