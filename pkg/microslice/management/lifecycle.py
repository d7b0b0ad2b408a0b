"""
The slice lifecycle state machine shared by NSIs and NSSIs.

States follow the three lifecycle stages: instantiation, configuration and activation; a
run-time period of supervision and modification; deactivation and termination. The
transition table below is the complete graph; anything not listed is illegal and
``Terminated`` has no outgoing edges.
"""
from enum import Enum
from typing import Dict, FrozenSet, List, Sequence, Tuple

from microslice.errors import InvalidTransition


class LifecycleState(str, Enum):
    INSTANTIATED = "instantiated"
    CONFIGURED = "configured"
    ACTIVATED = "activated"
    SUPERVISED = "supervised"
    MODIFIED = "modified"
    DEACTIVATED = "deactivated"
    TERMINATED = "terminated"


class LifecycleEvent(str, Enum):
    CONFIGURE = "configure"
    ACTIVATE = "activate"
    SUPERVISE = "supervise"
    MODIFY = "modify"
    DEACTIVATE = "deactivate"
    TERMINATE = "terminate"


TRANSITIONS: Dict[Tuple[LifecycleState, LifecycleEvent], LifecycleState] = {
    (LifecycleState.INSTANTIATED, LifecycleEvent.CONFIGURE): LifecycleState.CONFIGURED,
    (LifecycleState.CONFIGURED, LifecycleEvent.ACTIVATE): LifecycleState.ACTIVATED,
    (LifecycleState.ACTIVATED, LifecycleEvent.SUPERVISE): LifecycleState.SUPERVISED,
    (LifecycleState.ACTIVATED, LifecycleEvent.DEACTIVATE): LifecycleState.DEACTIVATED,
    (LifecycleState.SUPERVISED, LifecycleEvent.SUPERVISE): LifecycleState.SUPERVISED,
    (LifecycleState.SUPERVISED, LifecycleEvent.MODIFY): LifecycleState.MODIFIED,
    (LifecycleState.SUPERVISED, LifecycleEvent.DEACTIVATE): LifecycleState.DEACTIVATED,
    (LifecycleState.MODIFIED, LifecycleEvent.SUPERVISE): LifecycleState.SUPERVISED,
    (LifecycleState.DEACTIVATED, LifecycleEvent.TERMINATE): LifecycleState.TERMINATED,
}

# States in which a slice carries traffic.
IN_SERVICE: FrozenSet[LifecycleState] = frozenset(
    {LifecycleState.ACTIVATED, LifecycleState.SUPERVISED, LifecycleState.MODIFIED}
)

BRING_UP: Tuple[LifecycleEvent, ...] = (LifecycleEvent.CONFIGURE, LifecycleEvent.ACTIVATE)


def next_state(state: LifecycleState, event: LifecycleEvent) -> LifecycleState:
    """
    Apply one event to a state.

    :raises InvalidTransition: If the graph has no edge for ``(state, event)``.
    """
    try:
        return TRANSITIONS[(state, event)]
    except KeyError:
        raise InvalidTransition(
            f"{event.value} is not allowed in state {state.value}"
        ) from None


def is_legal_path(states: Sequence[LifecycleState]) -> bool:
    """True if every consecutive pair of ``states`` is an edge of the graph."""
    edges = {(src, dst) for (src, _), dst in TRANSITIONS.items()}
    return all((a, b) in edges for a, b in zip(states, states[1:]))


def bring_up_history() -> List[LifecycleState]:
    """State history of a slice from instantiation to activation."""
    history = [LifecycleState.INSTANTIATED]
    for event in BRING_UP:
        history.append(next_state(history[-1], event))
    return history
