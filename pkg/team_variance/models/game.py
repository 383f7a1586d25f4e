"""Separately controlled stochastic games and their stationary policies."""

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from team_variance.exceptions import (
    BadParamsError,
    InadmissibleActionError,
    InvalidArgumentError,
)
from team_variance.utils.decorators.validators import validate_args

ActionMap = Sequence[int]


@dataclass(frozen=True, eq=False)
class PlayerModel:
    """One player's local MDP: its own states, actions, kernel and rewards.

    Actions are dense integer indices into ``action_labels``; the kernel and
    reward only ever see this player's state and action.
    """

    admissible: tuple[tuple[int, ...], ...]
    transition: Mapping[tuple[int, int], Sequence[float]]
    reward: Mapping[tuple[int, int], float]
    name: str = ""
    state_labels: tuple[str, ...] = ()
    action_labels: tuple[str, ...] = ()
    row_sum_tol: float = 1e-12
    _rows: dict = field(default_factory=dict, init=False, repr=False)
    _rewards: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        admissible = tuple(tuple(int(a) for a in acts) for acts in self.admissible)
        object.__setattr__(self, "admissible", admissible)
        n = len(admissible)
        if n == 0:
            raise BadParamsError(f"player {self.name!r} has no states")
        if not self.state_labels:
            object.__setattr__(
                self, "state_labels", tuple(str(s) for s in range(n))
            )
        if len(self.state_labels) != n:
            raise BadParamsError(
                f"player {self.name!r}: {len(self.state_labels)} state labels for {n} states"
            )
        n_actions = 1 + max((max(acts) for acts in admissible if acts), default=-1)
        if not self.action_labels:
            object.__setattr__(
                self, "action_labels", tuple(str(a) for a in range(n_actions))
            )

        for s, acts in enumerate(admissible):
            if not acts:
                raise BadParamsError(
                    f"player {self.name!r}: state {s} has no admissible action"
                )
            if len(set(acts)) != len(acts):
                raise BadParamsError(
                    f"player {self.name!r}: state {s} lists an action twice"
                )
            for a in acts:
                if a < 0 or a >= len(self.action_labels):
                    raise BadParamsError(
                        f"player {self.name!r}: action {a} has no label"
                    )
                if (s, a) not in self.transition or (s, a) not in self.reward:
                    raise BadParamsError(
                        f"player {self.name!r}: missing data for (state {s}, action {a})"
                    )
                row = np.array(self.transition[(s, a)], dtype=float)
                if row.shape != (n,):
                    raise BadParamsError(
                        f"player {self.name!r}: transition row for (state {s}, action {a}) "
                        f"has length {row.size}, expected {n}"
                    )
                if np.any(row < 0.0) or abs(row.sum() - 1.0) > self.row_sum_tol:
                    raise BadParamsError(
                        f"player {self.name!r}: transition row for (state {s}, action {a}) "
                        f"sums to {row.sum()!r}"
                    )
                r = float(self.reward[(s, a)])
                if not math.isfinite(r):
                    raise BadParamsError(
                        f"player {self.name!r}: reward for (state {s}, action {a}) is not finite"
                    )
                row.setflags(write=False)
                self._rows[(s, a)] = row
                self._rewards[(s, a)] = r

    @property
    def n_states(self) -> int:
        return len(self.admissible)

    def row(self, state: int, action: int) -> np.ndarray:
        return self._rows[(state, action)]

    def reward_of(self, state: int, action: int) -> float:
        return self._rewards[(state, action)]

    def candidates(self, state: int) -> tuple[tuple[int, ...], np.ndarray, np.ndarray]:
        """Admissible actions at ``state`` with their stacked rows and rewards."""
        acts = self.admissible[state]
        rows = np.vstack([self._rows[(state, a)] for a in acts])
        rewards = np.array([self._rewards[(state, a)] for a in acts])
        return acts, rows, rewards

    def action_label(self, action: int) -> str:
        return self.action_labels[action]


@dataclass(frozen=True, eq=False)
class GameModel:
    players: tuple[PlayerModel, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(self.players))
        if len(self.players) < 1:
            raise BadParamsError("a game needs at least one player")

    @property
    def n_players(self) -> int:
        return len(self.players)

    def validate_policy(self, policy: "DeterministicPolicy") -> None:
        if len(policy.actions) != self.n_players:
            raise InvalidArgumentError(
                f"policy covers {len(policy.actions)} players, game has {self.n_players}"
            )
        for i, (player, u_i) in enumerate(zip(self.players, policy.actions)):
            check_action_map(player, u_i, player_index=i)


@dataclass(frozen=True)
class DeterministicPolicy:
    """Stationary deterministic joint policy: one action per (player, state)."""

    actions: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "actions", tuple(tuple(int(a) for a in u_i) for u_i in self.actions)
        )

    def __getitem__(self, player: int) -> tuple[int, ...]:
        return self.actions[player]

    def __len__(self) -> int:
        return len(self.actions)

    def replace_player(self, player: int, u_i: ActionMap) -> "DeterministicPolicy":
        actions = list(self.actions)
        actions[player] = tuple(u_i)
        return DeterministicPolicy(tuple(actions))

    def with_decision(self, player: int, state: int, action: int) -> "DeterministicPolicy":
        """Single-decision deviation."""
        u_i = list(self.actions[player])
        u_i[state] = action
        return self.replace_player(player, u_i)

    def count_changes(self, other: "DeterministicPolicy") -> int:
        return sum(
            a != b
            for u_i, v_i in zip(self.actions, other.actions)
            for a, b in zip(u_i, v_i)
        )

    def to_list(self) -> list[list[int]]:
        return [list(u_i) for u_i in self.actions]


@dataclass(frozen=True)
class PolicyMixture:
    """Per-step randomized blend: direction with probability delta, else base."""

    base: DeterministicPolicy
    direction: DeterministicPolicy
    delta: float

    def __post_init__(self):
        if not (0.0 <= self.delta <= 1.0):
            raise InvalidArgumentError(f"delta must be in [0, 1], got {self.delta}")
        if len(self.base) != len(self.direction):
            raise InvalidArgumentError("base and direction cover different players")

    def restrict(self, player: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.base[player], self.direction[player]


@dataclass(frozen=True, eq=False)
class CostMixer:
    """Blends any pair of per-policy cost vectors with the mixture weights."""

    delta: float

    def blend(self, base_cost: np.ndarray, direction_cost: np.ndarray) -> np.ndarray:
        return (1.0 - self.delta) * np.asarray(base_cost) + self.delta * np.asarray(
            direction_cost
        )


def check_action_map(
    player: PlayerModel, u_i: ActionMap, player_index: Optional[int] = None
) -> None:
    if len(u_i) != player.n_states:
        raise InvalidArgumentError(
            f"action map has {len(u_i)} entries, player has {player.n_states} states"
        )
    for s, a in enumerate(u_i):
        if a not in player.admissible[s]:
            raise InadmissibleActionError(player_index, s, a)


def induced_chain(
    player: PlayerModel, u_i: ActionMap, player_index: Optional[int] = None
) -> tuple[np.ndarray, np.ndarray]:
    """Transition matrix and reward vector of ``player`` under ``u_i``."""
    check_action_map(player, u_i, player_index)
    P = np.vstack([player.row(s, a) for s, a in enumerate(u_i)])
    r = np.array([player.reward_of(s, a) for s, a in enumerate(u_i)])
    return P, r


@validate_args(
    {
        "delta": {
            "required": True,
            "min": {"value": 0.0, "message": "delta must be in [0, 1]"},
            "max": {"value": 1.0, "message": "delta must be in [0, 1]"},
        }
    }
)
def induced_mixed_chain(
    player: PlayerModel,
    base_i: ActionMap,
    direction_i: ActionMap,
    delta: float,
    player_index: Optional[int] = None,
) -> tuple[np.ndarray, CostMixer]:
    P_base, _ = induced_chain(player, base_i, player_index)
    P_dir, _ = induced_chain(player, direction_i, player_index)
    return (1.0 - delta) * P_base + delta * P_dir, CostMixer(delta=delta)


def policy_space_size(game: GameModel) -> int:
    return math.prod(
        len(acts) for player in game.players for acts in player.admissible
    )


def iter_policies(game: GameModel) -> Iterator[DeterministicPolicy]:
    """Every joint stationary deterministic policy, lexicographically."""
    per_player = [
        list(itertools.product(*player.admissible)) for player in game.players
    ]
    for combo in itertools.product(*per_player):
        yield DeterministicPolicy(combo)


def random_policy(game: GameModel, rng: np.random.Generator) -> DeterministicPolicy:
    """Uniform over admissible actions, independently per (player, state)."""
    return DeterministicPolicy(
        tuple(
            tuple(int(acts[rng.integers(len(acts))]) for acts in player.admissible)
            for player in game.players
        )
    )
