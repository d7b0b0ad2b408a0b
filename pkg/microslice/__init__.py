"""
This package simulates the network slicing management plane of a micro-operator.

A micro-operator runs its own small 5G network at one or more local sites and serves
vertical tenants with network slices. Slices are formed by a fixed sequence of management
messages between the tenant, the communication service provider, the CSMF, the NSMF and the
NSSMFs of the micro-operator and of partner mobile network operators. Every run is a
deterministic discrete-event simulation over a scenario file and produces one trace per
request.

The package includes the following key components:
- `ScenarioSpec`: a validated scenario, usually obtained with `resolve_scenario`.
- `World`: the complete state of a run, built from a scenario.
- `FormationEngine`: takes requests through the formation sequence and records traces.
- `validate_trace`: checks a trace against the sequence rules of its deployment scenario.
- `run_scenario`: runs a whole scenario and condenses it into a `RunReport`.
- `SimulationConfig` and `Settings`: per-run and environment configuration.

Examples:
    >>> from microslice import resolve_scenario, run_scenario
    >>> report, traces = run_scenario(resolve_scenario("closed_dep_a"))
    >>> report.requests[0].outcome
    'served'
"""
import sys

from microslice._version import __version__
from microslice.config import Settings, SimulationConfig
from microslice.engine import FormationEngine, FormationTrace, World, validate_trace
from microslice.runner.run import RunReport, run_scenario
from microslice.scenario import ScenarioSpec, resolve_scenario

# Checking version
if sys.version_info < (3, 10, 11):
    raise RuntimeError("This project requires Python 3.10.11 or higher.")


__all__ = [
    "FormationEngine",
    "FormationTrace",
    "RunReport",
    "ScenarioSpec",
    "Settings",
    "SimulationConfig",
    "World",
    "__version__",
    "resolve_scenario",
    "run_scenario",
    "validate_trace",
]
