"""Three-microgrid energy management benchmark.

Each microgrid owns a wind turbine and a battery. Its state is the pair
(wind level G, battery level B); the action a discharges (a > 0) or charges
(a < 0) the battery, the next battery level is B - a, and wind evolves on its
own Markov chain. The reward is the power exchanged with the main grid,
G + a - D, with sales capped by wind abandonment.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from team_variance.exceptions import BadParamsError
from team_variance.models.chain import validate_transition_matrix
from team_variance.models.game import GameModel, PlayerModel
from team_variance.settings import Settings, get_settings

WIND_MATRIX_1 = (
    (0.53, 0.18, 0.19, 0.04, 0.01, 0.05),
    (0.51, 0.08, 0.20, 0.08, 0.02, 0.11),
    (0.35, 0.11, 0.19, 0.11, 0.03, 0.21),
    (0.27, 0.15, 0.15, 0.14, 0.03, 0.26),
    (0.14, 0.11, 0.13, 0.15, 0.05, 0.42),
    (0.09, 0.03, 0.06, 0.06, 0.03, 0.73),
)

# stronger wind profile
WIND_MATRIX_2 = (
    (0.33, 0.18, 0.19, 0.04, 0.01, 0.25),
    (0.31, 0.08, 0.20, 0.08, 0.02, 0.31),
    (0.15, 0.11, 0.19, 0.11, 0.03, 0.41),
    (0.17, 0.15, 0.15, 0.14, 0.03, 0.36),
    (0.04, 0.11, 0.13, 0.15, 0.05, 0.52),
    (0.07, 0.03, 0.06, 0.06, 0.03, 0.75),
)

# weaker wind profile
WIND_MATRIX_3 = (
    (0.53, 0.18, 0.19, 0.04, 0.01, 0.05),
    (0.51, 0.08, 0.20, 0.08, 0.02, 0.11),
    (0.45, 0.11, 0.19, 0.11, 0.03, 0.11),
    (0.37, 0.15, 0.15, 0.14, 0.03, 0.16),
    (0.34, 0.11, 0.13, 0.15, 0.05, 0.22),
    (0.49, 0.03, 0.06, 0.06, 0.03, 0.33),
)


class MicrogridParams(BaseModel):
    n: int = Field(default=3, ge=1)
    B_max: int = 5
    C_min: int = -2
    C_max: int = 2
    wind_levels: list[float] = Field(default_factory=lambda: [0, 1, 2, 3, 4, 5])
    battery_levels: list[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4, 5])
    wind_matrices: list[list[list[float]]] = Field(
        default_factory=lambda: [
            [list(row) for row in m]
            for m in (WIND_MATRIX_1, WIND_MATRIX_2, WIND_MATRIX_3)
        ]
    )
    demands: list[float] = Field(default_factory=lambda: [2.0, 2.5, 2.0])
    sell_cap: float = 2.0

    @model_validator(mode="after")
    def _check(self) -> "MicrogridParams":
        if self.B_max <= 0:
            raise ValueError("B_max must be positive")
        if not (self.C_min <= 0 <= self.C_max):
            raise ValueError("charge bounds must satisfy C_min <= 0 <= C_max")
        if self.battery_levels != list(range(self.B_max + 1)):
            raise ValueError("battery levels must be the integers 0..B_max")
        if len(self.wind_matrices) != self.n or len(self.demands) != self.n:
            raise ValueError("need one wind matrix and one demand per microgrid")
        for matrix in self.wind_matrices:
            if len(matrix) != len(self.wind_levels):
                raise ValueError("wind matrix size must match the wind levels")
        return self

    @property
    def actions(self) -> list[int]:
        return list(range(self.C_min, self.C_max + 1))


@dataclass(frozen=True)
class MicrogridState:
    G: int
    B: int

    def index(self, n_battery: int) -> int:
        return self.G * n_battery + self.B

    @classmethod
    def from_index(cls, index: int, n_battery: int) -> "MicrogridState":
        return cls(G=index // n_battery, B=index % n_battery)


def make_params(**overrides) -> MicrogridParams:
    try:
        return MicrogridParams(**overrides)
    except ValidationError as e:
        raise BadParamsError(f"invalid microgrid parameters: {e.errors()[0]['msg']}")


def admissible_actions(params: MicrogridParams, B: int) -> list[int]:
    """Physical actions a with max(C_min, B - B_max) <= a <= min(C_max, B)."""
    low = max(params.C_min, B - params.B_max)
    high = min(params.C_max, B)
    return list(range(low, high + 1))


def _build_player(
    params: MicrogridParams, i: int, settings: Settings
) -> PlayerModel:
    try:
        wind = validate_transition_matrix(params.wind_matrices[i], tol=settings.row_sum_tol)
    except BadParamsError as e:
        raise BadParamsError(f"microgrid {i + 1}: {e.detail}") from None

    n_G = len(params.wind_levels)
    n_B = len(params.battery_levels)
    actions = params.actions
    action_index = {a: k for k, a in enumerate(actions)}

    admissible, transition, reward, labels = [], {}, {}, []
    for s in range(n_G * n_B):
        state = MicrogridState.from_index(s, n_B)
        G = params.wind_levels[state.G]
        B = params.battery_levels[state.B]
        labels.append(f"G={G:g},B={B}")
        feasible = admissible_actions(params, B)
        if not feasible:
            raise BadParamsError(
                f"microgrid {i + 1}: state (G={G:g}, B={B}) has no admissible action"
            )
        admissible.append(tuple(action_index[a] for a in feasible))
        for a in feasible:
            row = np.zeros(n_G * n_B)
            next_B = B - a
            for next_G in range(n_G):
                row[MicrogridState(next_G, next_B).index(n_B)] = wind[state.G, next_G]
            transition[(s, action_index[a])] = row
            reward[(s, action_index[a])] = min(G + a - params.demands[i], params.sell_cap)

    return PlayerModel(
        admissible=tuple(admissible),
        transition=transition,
        reward=reward,
        name=f"microgrid-{i + 1}",
        state_labels=tuple(labels),
        action_labels=tuple(f"{a:+d}" if a else "0" for a in actions),
        row_sum_tol=settings.row_sum_tol,
    )


def build_microgrid(
    params: Optional[MicrogridParams] = None, settings: Optional[Settings] = None
) -> GameModel:
    """Benchmark game: one player per microgrid, |G| x |B| states each."""
    settings = settings or get_settings()
    params = params or MicrogridParams()
    return GameModel(
        players=tuple(_build_player(params, i, settings) for i in range(params.n)),
        name="microgrid",
    )
