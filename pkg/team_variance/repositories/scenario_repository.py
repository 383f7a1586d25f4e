import json
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np
from pydantic import ValidationError

from team_variance.benchmarks.microgrid import build_microgrid
from team_variance.exceptions import BadParamsError, ScenarioParseError
from team_variance.models.game import GameModel, PlayerModel
from team_variance.schemas.scenario import (
    ActionEntry,
    PlayerEntry,
    ScenarioDocument,
    StateEntry,
)
from team_variance.settings import Settings, get_settings
from team_variance.utils.logging import get_logger

logger = get_logger(__name__)

BUILTIN_SCENARIOS: dict[str, Callable[[], GameModel]] = {
    "microgrid": build_microgrid,
}


def _field_path(loc) -> str:
    path = ""
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else part)
    return path


def game_to_document(game: GameModel) -> ScenarioDocument:
    return ScenarioDocument(
        name=game.name,
        players=[
            PlayerEntry(
                name=player.name,
                state_labels=list(player.state_labels),
                action_labels=list(player.action_labels),
                states=[
                    StateEntry(
                        actions=[
                            ActionEntry(
                                action=a,
                                transition=player.row(s, a).tolist(),
                                reward=player.reward_of(s, a),
                            )
                            for a in player.admissible[s]
                        ]
                    )
                    for s in range(player.n_states)
                ],
            )
            for player in game.players
        ],
    )


def document_to_game(
    document: ScenarioDocument, settings: Optional[Settings] = None
) -> GameModel:
    settings = settings or get_settings()
    players = []
    for i, entry in enumerate(document.players):
        n = len(entry.states)
        admissible, transition, reward = [], {}, {}
        for s, state in enumerate(entry.states):
            actions = []
            for k, action in enumerate(state.actions):
                field = f"players[{i}].states[{s}].actions[{k}]"
                row = np.asarray(action.transition, dtype=float)
                if row.shape != (n,):
                    raise ScenarioParseError(
                        f"player {i}, state {s}: transition row has {row.size} entries, "
                        f"expected {n}",
                        field=f"{field}.transition",
                    )
                total = float(row.sum())
                if np.any(row < 0.0) or abs(total - 1.0) > settings.load_row_sum_tol:
                    raise ScenarioParseError(
                        f"player {i}, state {s}, action {action.action}: "
                        f"transition row sums to {total!r}",
                        field=f"{field}.transition",
                    )
                if abs(total - 1.0) > settings.row_sum_tol:
                    row = row / total
                actions.append(action.action)
                transition[(s, action.action)] = row
                reward[(s, action.action)] = action.reward
            admissible.append(tuple(actions))
        try:
            players.append(
                PlayerModel(
                    admissible=tuple(admissible),
                    transition=transition,
                    reward=reward,
                    name=entry.name,
                    state_labels=tuple(entry.state_labels),
                    action_labels=tuple(entry.action_labels),
                    row_sum_tol=settings.row_sum_tol,
                )
            )
        except BadParamsError as e:
            raise ScenarioParseError(e.detail, field=f"players[{i}]") from None
    return GameModel(players=tuple(players), name=document.name)


class ScenarioRepository:
    def __init__(self, settings: Settings):
        self.settings = settings

    def parse(self, text: str) -> GameModel:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioParseError(f"invalid JSON: {e.msg}", line=e.lineno) from None
        try:
            document = ScenarioDocument.model_validate(raw)
        except ValidationError as e:
            error = e.errors()[0]
            raise ScenarioParseError(
                error["msg"], field=_field_path(error["loc"])
            ) from None
        return document_to_game(document, self.settings)

    def load(self, path: Union[str, Path]) -> GameModel:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ScenarioParseError(f"cannot read scenario {path}: {e.strerror}") from None
        game = self.parse(text)
        logger.debug("Loaded scenario", path=str(path), players=game.n_players)
        return game

    def get(self, source: str) -> GameModel:
        """Builtin scenario by name, otherwise a scenario file path."""
        if source in BUILTIN_SCENARIOS:
            return BUILTIN_SCENARIOS[source]()
        return self.load(source)

    def dumps(self, game: GameModel) -> str:
        return game_to_document(game).model_dump_json(indent=2)

    def save(self, game: GameModel, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(game), encoding="utf-8")
        return path


def get_scenario_repository(settings: Optional[Settings] = None) -> ScenarioRepository:
    return ScenarioRepository(settings=settings or get_settings())
