# pylint: disable-all
from pathlib import Path

import pytest
from pydantic import ValidationError

from microslice.config import Settings, SimulationConfig


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in (
        "MICROSLICE_STRICT_LATENCY_MS",
        "MICROSLICE_OUTPUT_DIR",
        "MICROSLICE_LOG_LEVEL",
        "MICROSLICE_CHECK_INVARIANTS",
        "MICROSLICE_OTEL_CONSOLE",
    ):
        monkeypatch.delenv(name, raising=False)


def test_simulation_config_defaults():
    config = SimulationConfig()
    assert config.strict_latency_ms == 10.0
    assert config.check_invariants is True
    assert config.seed == 0


def test_simulation_config_rejects_non_positive_threshold():
    with pytest.raises(ValidationError):
        SimulationConfig(strict_latency_ms=0)


def test_settings_defaults():
    settings = Settings()
    assert settings.output_dir == Path("out")
    assert settings.log_level == "INFO"
    assert settings.otel_console is False
    assert settings.simulation_config() == SimulationConfig()


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("MICROSLICE_STRICT_LATENCY_MS", "15")
    monkeypatch.setenv("MICROSLICE_OUTPUT_DIR", "/tmp/runs")
    monkeypatch.setenv("MICROSLICE_CHECK_INVARIANTS", "false")
    monkeypatch.setenv("MICROSLICE_LOG_LEVEL", "debug")
    settings = Settings()
    assert settings.strict_latency_ms == 15.0
    assert settings.output_dir == Path("/tmp/runs")
    assert settings.log_level == "debug"
    config = settings.simulation_config(seed=4)
    assert config == SimulationConfig(strict_latency_ms=15.0, check_invariants=False, seed=4)


@pytest.mark.parametrize(
    "override, expected",
    [
        (None, 10.0),
        (3.5, 3.5),
    ],
)
def test_scenario_threshold_overrides_the_environment(override, expected):
    config = Settings().simulation_config(seed=1, strict_latency_ms=override)
    assert config.strict_latency_ms == expected
    assert config.seed == 1


def test_invalid_environment_value(monkeypatch):
    monkeypatch.setenv("MICROSLICE_STRICT_LATENCY_MS", "-1")
    with pytest.raises(ValidationError):
        Settings()
