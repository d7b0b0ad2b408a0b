"""
Formation sequence steps and their dependency graph.

Steps run from 0 (UEs waiting on their tenant) to 15 (UE connectivity). The dependency
edges put every step in a pipeline except 5 and 6, the micro-operator and MNO NSSI
requisitions, which may interleave. Step 6 is optional: it only occurs when MNO NSSIs are
drawn.
"""
from enum import IntEnum
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from microslice.errors import ContractViolation
from microslice.management.base import Actor


class Step(IntEnum):
    UE_WAITING = 0
    SLICE_REQUEST = 1
    REQUEST_ROUTING = 2
    REQUIREMENT_TRANSLATION = 3
    APPROVAL = 4
    UO_NSSI_REQUEST = 5
    MNO_NSSI_REQUEST = 6
    NF_ALLOCATION = 7
    NSSI_PROVIDED = 8
    NSSI_MANAGEMENT = 9
    NSI_COMPOSITION = 10
    NSI_ATTRIBUTION = 11
    SERVICE_ASSEMBLY = 12
    SERVICE_MANAGEMENT = 13
    SERVICE_DELIVERY = 14
    UE_CONNECTIVITY = 15


STEP_EDGES: Tuple[Tuple[Step, Step], ...] = (
    (Step.UE_WAITING, Step.SLICE_REQUEST),
    (Step.SLICE_REQUEST, Step.REQUEST_ROUTING),
    (Step.SLICE_REQUEST, Step.REQUIREMENT_TRANSLATION),
    (Step.REQUEST_ROUTING, Step.APPROVAL),
    (Step.REQUIREMENT_TRANSLATION, Step.UO_NSSI_REQUEST),
    (Step.APPROVAL, Step.UO_NSSI_REQUEST),
    (Step.REQUIREMENT_TRANSLATION, Step.MNO_NSSI_REQUEST),
    (Step.APPROVAL, Step.MNO_NSSI_REQUEST),
    (Step.UO_NSSI_REQUEST, Step.NF_ALLOCATION),
    (Step.MNO_NSSI_REQUEST, Step.NF_ALLOCATION),
    (Step.NF_ALLOCATION, Step.NSSI_PROVIDED),
    (Step.NSSI_PROVIDED, Step.NSSI_MANAGEMENT),
    (Step.NSSI_MANAGEMENT, Step.NSI_COMPOSITION),
    (Step.NSI_COMPOSITION, Step.NSI_ATTRIBUTION),
    (Step.NSI_ATTRIBUTION, Step.SERVICE_ASSEMBLY),
    (Step.SERVICE_ASSEMBLY, Step.SERVICE_MANAGEMENT),
    (Step.SERVICE_MANAGEMENT, Step.SERVICE_DELIVERY),
    (Step.SERVICE_DELIVERY, Step.UE_CONNECTIVITY),
)

OPTIONAL_STEPS: FrozenSet[Step] = frozenset({Step.MNO_NSSI_REQUEST})

# Steps a served trace must contain.
SERVED_STEPS: FrozenSet[Step] = frozenset(set(Step) - OPTIONAL_STEPS)

# Actor of each step with a fixed owner; steps 5, 6, 9 and 10 name the domain acting.
STEP_ACTORS: Dict[Step, Actor] = {
    Step.UE_WAITING: Actor.UE,
    Step.SLICE_REQUEST: Actor.TENANT,
    Step.REQUEST_ROUTING: Actor.COMM_SERVICE_PROVIDER,
    Step.REQUIREMENT_TRANSLATION: Actor.CSMF,
    Step.APPROVAL: Actor.NETWORK_PROVIDER,
    Step.UO_NSSI_REQUEST: Actor.UO_NSSMF,
    Step.MNO_NSSI_REQUEST: Actor.MNO_NSSMF,
    Step.NF_ALLOCATION: Actor.NF,
    Step.NSSI_PROVIDED: Actor.NF,
    Step.NSI_ATTRIBUTION: Actor.NSMF,
    Step.SERVICE_ASSEMBLY: Actor.CSMF,
    Step.SERVICE_MANAGEMENT: Actor.CSMF,
    Step.SERVICE_DELIVERY: Actor.COMM_SERVICE_PROVIDER,
    Step.UE_CONNECTIVITY: Actor.UE,
}


class StepDependencyGraph:
    """
    The step ordering as a directed acyclic graph.

    :param edges: Dependency edges; defaults to the formation sequence.
    :raises ContractViolation: If the edges contain a cycle.
    """

    def __init__(self, edges: Optional[Iterable[Tuple[Step, Step]]] = None):
        self.graph = nx.DiGraph()
        self.graph.add_nodes_from(Step)
        self.graph.add_edges_from(STEP_EDGES if edges is None else edges)
        if not nx.is_directed_acyclic_graph(self.graph):
            raise ContractViolation(f"step graph has a cycle: {nx.find_cycle(self.graph)}")
        self._closure = nx.transitive_closure_dag(self.graph)

    def edges(self) -> List[Tuple[Step, Step]]:
        return sorted((Step(u), Step(v)) for u, v in self.graph.edges)

    def execution_order(self) -> List[Step]:
        """Topological order, ties broken by step number."""
        return [Step(step) for step in nx.lexicographical_topological_sort(self.graph)]

    def must_precede(self, earlier: Step, later: Step) -> bool:
        """True if ``later`` depends, directly or not, on ``earlier``."""
        return self._closure.has_edge(earlier, later)

    def ordered_pairs(self, present: Set[Step]) -> List[Tuple[Step, Step]]:
        """Every dependent pair among ``present`` steps, in step order."""
        return sorted(
            (Step(u), Step(v))
            for u, v in self._closure.edges
            if u in present and v in present
        )
