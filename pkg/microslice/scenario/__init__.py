"""
Scenario files: the data a simulation run is made from.

Example:
    >>> from microslice.scenario import resolve_scenario
    >>> spec = resolve_scenario("closed_dep_a")
    >>> [request["tenant_slice_id"] for request in spec.requests]
    ['t1-s1']

Available:
    - `ScenarioSpec`: the strict scenario schema.
    - `load_scenario`, `parse_scenario`, `resolve_scenario`: loading with diagnostics.
    - `list_bundled`, `load_bundled`: the scenarios shipped with the package.
    - `scenario_requests`, `random_scenario`: seeded request and scenario generation.
"""
from microslice.scenario.loader import (
    check_references,
    list_bundled,
    load_bundled,
    load_scenario,
    parse_scenario,
    resolve_scenario,
)
from microslice.scenario.schema import Expectation, LifecycleAction, ScenarioSpec
from microslice.scenario.synthetic import generate_requests, random_scenario, scenario_requests


__all__ = [
    "Expectation",
    "LifecycleAction",
    "ScenarioSpec",
    "check_references",
    "generate_requests",
    "list_bundled",
    "load_bundled",
    "load_scenario",
    "parse_scenario",
    "random_scenario",
    "resolve_scenario",
    "scenario_requests",
]
