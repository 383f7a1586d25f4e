from pathlib import Path

import pytest
from hypothesis import HealthCheck
from hypothesis import settings as hypothesis_settings

from team_variance.benchmarks.microgrid import build_microgrid
from team_variance.settings import get_settings, reset_settings
from tests.factories import malformed_scenario_text, scenario_text, toy_game

# Settings reset per test is function scoped; property tests tolerate it.
hypothesis_settings.register_profile(
    "team-variance",
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
hypothesis_settings.load_profile("team-variance")


@pytest.fixture(autouse=True)
def clean_settings():
    """Every test starts from default settings."""
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def settings():
    return get_settings()


@pytest.fixture
def toy():
    return toy_game()


@pytest.fixture(scope="session")
def microgrid():
    return build_microgrid()


@pytest.fixture
def toy_scenario_file(tmp_path: Path) -> Path:
    path = tmp_path / "toy.json"
    path.write_text(scenario_text(), encoding="utf-8")
    return path


@pytest.fixture
def malformed_scenario_file(tmp_path: Path) -> Path:
    path = tmp_path / "broken.json"
    path.write_text(malformed_scenario_text(), encoding="utf-8")
    return path
