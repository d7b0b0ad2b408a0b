"""
The discrete-event engine running slice formation sequences.

- `World`: the complete state of one run.
- `FormationEngine`: executes steps 0 to 15 per request and records `FormationTrace` values.
- `validate_trace`: checks a trace against the step graph and the scenario rules.
- `InvariantSuite`: brute-force state checks, run after every event.
- `replay`: re-executes a run and fails on the first divergent event.

Example:
    >>> world = World.from_scenario(spec)
    >>> engine = FormationEngine(world, hooks=[InvariantSuite(world)])
    >>> trace = engine.run_formation_sequence(spec.requests[0])
    >>> validate_trace(trace).conformant
    True
"""
from microslice.engine.invariants import InvariantSuite, InvariantSummary
from microslice.engine.replay import compare_traces, replay
from microslice.engine.sequence import (
    FormationEngine,
    FormationResult,
    LifecycleResult,
)
from microslice.engine.steps import STEP_EDGES, Step, StepDependencyGraph
from microslice.engine.trace import FormationTrace, Outcome, OutcomeKind, TraceEvent
from microslice.engine.validator import ConformanceReport, Violation, validate_trace
from microslice.engine.world import World


__all__ = [
    "ConformanceReport",
    "FormationEngine",
    "FormationResult",
    "FormationTrace",
    "InvariantSuite",
    "InvariantSummary",
    "LifecycleResult",
    "Outcome",
    "OutcomeKind",
    "STEP_EDGES",
    "Step",
    "StepDependencyGraph",
    "TraceEvent",
    "Violation",
    "World",
    "compare_traces",
    "replay",
    "validate_trace",
]
