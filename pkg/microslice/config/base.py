"""
This module defines configuration models for the simulator.

`Settings` reads the process environment (prefix ``MICROSLICE_``) through pydantic-settings,
while `SimulationConfig` is the plain, explicit set of values a single run works with. The
engine only ever receives a `SimulationConfig`; the environment is read once, at the edge.

Classes:
    Settings: Environment-backed defaults for the command line and library users.
    SimulationConfig: Per-run values handed to the engine.

Usage:
    # Defaults from the environment, with a CLI override for the seed
    settings = Settings()
    config = settings.simulation_config(seed=7)
"""
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class SimulationConfig(BaseModel):
    """
    Values one simulation run depends on.

    Attributes:
        strict_latency_ms (float): Requests with a latency requirement at or below this value
            are treated as strict-latency tenants.
        check_invariants (bool): Run the invariant suite after every engine event.
        seed (int): Seed for synthetic request generation. Nothing else is randomized.
    """

    strict_latency_ms: float = Field(default=10.0, gt=0)
    check_invariants: bool = True
    seed: int = 0


class Settings(BaseSettings):
    """
    Environment configuration, e.g. ``MICROSLICE_OUTPUT_DIR=/tmp/runs``.

    Attributes:
        strict_latency_ms (float): Default latency threshold in milliseconds.
        output_dir (Path): Default output directory of the ``run`` command.
        log_level (str): Loguru level of the command line sink.
        check_invariants (bool): Default for the per-event invariant suite.
        otel_console (bool): Export OpenTelemetry spans to stdout.
    """

    model_config = SettingsConfigDict(env_prefix="MICROSLICE_")

    strict_latency_ms: float = Field(default=10.0, gt=0)
    output_dir: Path = Path("out")
    log_level: str = "INFO"
    check_invariants: bool = True
    otel_console: bool = False

    def simulation_config(
        self, seed: int = 0, strict_latency_ms: Optional[float] = None
    ) -> SimulationConfig:
        """
        Build the per-run configuration.

        :param seed: Seed for synthetic requests.
        :param strict_latency_ms: Scenario-level override of the latency threshold.
        :return: The configuration handed to the engine.
        """
        return SimulationConfig(
            strict_latency_ms=(
                strict_latency_ms
                if strict_latency_ms is not None
                else self.strict_latency_ms
            ),
            check_invariants=self.check_invariants,
            seed=seed,
        )
