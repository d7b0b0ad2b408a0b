"""
Deterministic replay of a recorded run.

`replay` rebuilds the initial world of a scenario, feeds it the same requests in the same
order and compares every produced event with the recorded one, then the final state with
the recorded fingerprint. Since nothing in the engine depends on wall-clock time or unseeded
randomness, any difference is a determinism bug.
"""
from itertools import zip_longest
from typing import Optional, Sequence

from loguru import logger

from microslice.config import SimulationConfig
from microslice.engine.sequence import FormationEngine
from microslice.engine.trace import FormationTrace
from microslice.engine.world import World
from microslice.errors import ReplayDivergence
from microslice.scenario.schema import ScenarioSpec
from microslice.scenario.synthetic import scenario_requests


def compare_traces(original: FormationTrace, replayed: FormationTrace) -> None:
    """:raises ReplayDivergence: At the first event, or the outcome, that differs."""
    if original.request_id != replayed.request_id:
        raise ReplayDivergence(
            f"expected a trace of {original.request_id}, replay produced {replayed.request_id}"
        )
    pairs = zip_longest(original.events, replayed.events)
    for index, (recorded, produced) in enumerate(pairs):
        if recorded != produced:
            before = recorded.to_line() if recorded is not None else "<none>"
            after = produced.to_line() if produced is not None else "<none>"
            raise ReplayDivergence(
                f"{original.request_id}: event {index} differs: "
                f"recorded {before!r}, replayed {after!r}"
            )
    if original.outcome != replayed.outcome:
        raise ReplayDivergence(
            f"{original.request_id}: outcome {original.outcome} replayed as {replayed.outcome}"
        )


def replay(
    traces: Sequence[FormationTrace],
    spec: ScenarioSpec,
    config: Optional[SimulationConfig] = None,
    expected_state: Optional[str] = None,
) -> World:
    """
    Re-execute a run and check it reproduces ``traces``.

    :param traces: The traces of the original run, in execution order.
    :param spec: The scenario the run was made from.
    :param config: The configuration of the original run; defaults to the scenario's.
    :param expected_state: `World.state_fingerprint` of the original run's final world.
        Without it only the traces are compared.
    :return: The final world, after the scenario's lifecycle actions and teardown.
    :raises ReplayDivergence: If a trace differs, the number of requests does not match,
        or the final pools, NSSIs, NSIs and services differ from ``expected_state``.
    """
    world = World.from_scenario(spec, config)
    engine = FormationEngine(world)
    requests = scenario_requests(spec, world.config.seed)
    if len(requests) != len(traces):
        raise ReplayDivergence(
            f"{spec.name} has {len(requests)} requests, the run recorded {len(traces)} traces"
        )
    for raw, original in zip(requests, traces):
        compare_traces(original, engine.run_formation_sequence(raw))
    engine.apply_actions(spec.lifecycle)
    if spec.teardown:
        engine.teardown()
    if expected_state:
        final_state = world.state_fingerprint()
        if final_state != expected_state:
            raise ReplayDivergence(
                f"{spec.name}: final state {final_state[:12]} differs from the recorded "
                f"{expected_state[:12]}"
            )
    logger.info("replayed {} traces of {} without divergence", len(traces), spec.name)
    return world
