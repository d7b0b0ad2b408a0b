"""
This module serves as the entry point for the `microslice.config` package. It re-exports
the `Settings` and `SimulationConfig` classes from the `microslice.config.base` module.

Example:
    from microslice.config import Settings

    config = Settings().simulation_config(seed=3)

Available Classes:
    - `Settings`: Environment-backed defaults (prefix ``MICROSLICE_``).
    - `SimulationConfig`: The values a single run depends on.
"""
from microslice.config.base import Settings, SimulationConfig


__all__ = ["Settings", "SimulationConfig"]
