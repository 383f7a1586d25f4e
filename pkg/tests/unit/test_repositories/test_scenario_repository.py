"""Tests for scenario files."""

import json

import numpy as np
import pytest

from team_variance.exceptions import ScenarioParseError
from team_variance.repositories.scenario_repository import (
    ScenarioRepository,
    game_to_document,
    get_scenario_repository,
)
from tests.factories import scenario_text


def _assert_same_game(a, b):
    assert a.name == b.name
    assert a.n_players == b.n_players
    for pa, pb in zip(a.players, b.players):
        assert pa.admissible == pb.admissible
        assert pa.state_labels == pb.state_labels
        assert pa.action_labels == pb.action_labels
        for s, acts in enumerate(pa.admissible):
            for act in acts:
                np.testing.assert_array_equal(pa.row(s, act), pb.row(s, act))
                assert pa.reward_of(s, act) == pb.reward_of(s, act)


class TestScenarioRoundTrip:
    """Test build, serialize, load."""

    def test_microgrid_round_trip(self, microgrid, tmp_path):
        """Test the builtin microgrid survives save and load."""
        repository = get_scenario_repository()
        path = repository.save(microgrid, tmp_path / "nested" / "microgrid.json")
        _assert_same_game(microgrid, repository.load(path))

    def test_get_builtin_and_file(self, toy, toy_scenario_file):
        """Test get resolves builtin names and file paths."""
        repository = get_scenario_repository()
        assert repository.get("microgrid").n_players == 3
        _assert_same_game(toy, repository.get(str(toy_scenario_file)))

    def test_document_layout(self, toy):
        """Test the document lists actions with rows and rewards."""
        document = game_to_document(toy)
        assert document.name == "toy"
        entry = document.players[1].states[0].actions[0]
        assert (entry.action, entry.transition, entry.reward) == (0, [1.0], 3.0)


class TestScenarioParseErrors:
    """Test malformed scenario files."""

    def test_invalid_json_reports_line(self, settings):
        """Test JSON syntax errors carry the line number."""
        text = scenario_text().replace('"players"', "players", 1)
        with pytest.raises(ScenarioParseError) as exc_info:
            ScenarioRepository(settings).parse(text)
        assert exc_info.value.line == 3
        assert exc_info.value.exit_code == 2

    def test_schema_error_reports_field(self, settings):
        """Test a missing key names its field path."""
        raw = json.loads(scenario_text())
        del raw["players"][0]["states"][0]["actions"][0]["reward"]
        with pytest.raises(ScenarioParseError) as exc_info:
            ScenarioRepository(settings).parse(json.dumps(raw))
        assert exc_info.value.field == "players[0].states[0].actions[0].reward"

    def test_bad_row_sum_names_player_and_state(self, settings, malformed_scenario_file):
        """Test a row that does not sum to one is refused with context."""
        with pytest.raises(ScenarioParseError) as exc_info:
            ScenarioRepository(settings).load(malformed_scenario_file)
        assert "player 1, state 0, action 0" in exc_info.value.detail
        assert "sums to 0.7" in exc_info.value.detail
        assert exc_info.value.field == "players[1].states[0].actions[0].transition"

    def test_wrong_row_length(self, settings):
        """Test a row over the wrong number of states."""
        raw = json.loads(scenario_text())
        raw["players"][0]["states"][0]["actions"][1]["transition"] = [0.5, 0.5]
        with pytest.raises(ScenarioParseError) as exc_info:
            ScenarioRepository(settings).parse(json.dumps(raw))
        assert "expected 1" in exc_info.value.detail

    def test_rounded_rows_are_renormalized(self, settings):
        """Test rows within the load tolerance are accepted and rescaled."""
        raw = json.loads(scenario_text())
        raw["players"][0]["states"][0]["actions"][0]["transition"] = [1.0 + 1e-10]
        game = ScenarioRepository(settings).parse(json.dumps(raw))
        assert game.players[0].row(0, 0).tolist() == [1.0]

    def test_player_errors_are_wrapped(self, settings):
        """Test model-level errors become parse errors."""
        raw = json.loads(scenario_text())
        raw["players"][0]["states"][0]["actions"][1]["action"] = 0
        with pytest.raises(ScenarioParseError) as exc_info:
            ScenarioRepository(settings).parse(json.dumps(raw))
        assert exc_info.value.field == "players[0]"

    def test_missing_file(self, settings, tmp_path):
        """Test unreadable paths are parse errors."""
        with pytest.raises(ScenarioParseError):
            ScenarioRepository(settings).load(tmp_path / "absent.json")
