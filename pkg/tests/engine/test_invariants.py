# pylint: disable-all
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from microslice.engine import FormationEngine, InvariantSuite, World
from microslice.engine.invariants import (
    DEFAULT_CHECKS,
    check_nf_disjointness,
    check_pool_conservation,
    check_type1_isolation,
)
from microslice.errors import InvariantViolation
from microslice.management import LifecycleEvent, LifecycleState
from microslice.scenario import LifecycleAction, list_bundled, load_bundled, random_scenario


def run_checked(spec):
    world = World.from_scenario(spec)
    suite = InvariantSuite(world)
    engine = FormationEngine(world, hooks=[suite])
    traces = [engine.run_formation_sequence(raw) for raw in spec.requests]
    return world, suite, engine, traces


@pytest.mark.parametrize("name", list_bundled())
def test_invariants_hold_through_every_bundled_scenario(name):
    spec = load_bundled(name)
    world, suite, engine, traces = run_checked(spec)
    assert suite.evaluations == sum(len(trace.events) for trace in traces)
    engine.apply_actions(spec.lifecycle)
    engine.teardown()
    suite.check("after teardown")
    summary = suite.summary()
    assert summary.passed
    assert summary.checks == [check.__name__ for check in DEFAULT_CHECKS]
    assert world.snapshots() == World.from_scenario(spec).snapshots()


def test_stolen_nf_is_detected():
    world, suite, _, _ = run_checked(load_bundled("closed_dep_a"))
    pool = world.all_pools()[0]
    assert pool.allocations["nf2"] is None
    pool.allocations["nf2"] = "nssi-uo-999"
    problems = suite.violations()
    assert problems == [
        "check_pool_exclusivity: pool L1: nf2 held by nssi-uo-999, NSSIs say None"
    ]
    with pytest.raises(InvariantViolation, match="invariants broken after tampering"):
        suite.check("after tampering")
    assert not suite.summary().passed


def test_service_over_a_dead_nsi_is_detected():
    world, suite, _, _ = run_checked(load_bundled("closed_dep_a"))
    world.nsis()[0].state = LifecycleState.DEACTIVATED
    assert any(
        problem.startswith("check_service_coherence: active cs-t1-s1")
        for problem in suite.violations()
    )


def test_hook_failure_stops_the_formation():
    def always_broken(world):
        return ["broken on purpose"]

    spec = load_bundled("closed_dep_a")
    world = World.from_scenario(spec)
    engine = FormationEngine(world, hooks=[InvariantSuite(world, checks=(always_broken,))])
    with pytest.raises(InvariantViolation, match="always_broken: broken on purpose") as info:
        engine.run_formation_sequence(spec.requests[0])
    assert "after event 0 of t1-s1 (step 0)" in str(info.value)


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_random_scenarios_keep_invariants_and_restore_pools(seed):
    spec = random_scenario(seed)
    world, suite, engine, traces = run_checked(spec)
    expected_ids = [raw["tenant_slice_id"] for raw in spec.requests]
    assert [trace.request_id for trace in traces] == expected_ids
    engine.teardown()
    suite.check("after teardown")
    assert world.snapshots() == World.from_scenario(spec).snapshots()
    assert all(nsi.state is LifecycleState.TERMINATED for nsi in world.nsis())


@settings(max_examples=40, deadline=None)
@given(
    actions=st.lists(
        st.tuples(
            st.sampled_from(["t1-s1", "t2-s1", "t1-s2"]),
            st.sampled_from(list(LifecycleEvent)),
        ),
        max_size=12,
    )
)
def test_lifecycle_fuzz_keeps_invariants(actions):
    spec = load_bundled("mno_open")
    world, suite, engine, _ = run_checked(spec)
    results = engine.apply_actions(
        [LifecycleAction(request_id=rid, event=event) for rid, event in actions]
    )
    assert len(results) == len(actions)
    for result in results:
        assert (result.state is None) != (result.error is None)
    suite.check("after lifecycle actions")
    engine.teardown()
    suite.check("after teardown")
    assert world.snapshots() == World.from_scenario(spec).snapshots()


def test_type1_isolation_over_a_thousand_random_scenarios():
    for seed in range(1000):
        spec = random_scenario(seed)
        assert sum(len(loc.nfs) for loc in spec.locations) <= 20
        assert len(spec.requests) <= 6
        world = World.from_scenario(spec)
        engine = FormationEngine(world)
        for raw in spec.requests:
            engine.run_formation_sequence(raw)
        assert check_type1_isolation(world) == [], seed
        assert check_nf_disjointness(world) == [], seed
        assert check_pool_conservation(world) == [], seed
