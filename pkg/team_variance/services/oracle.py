"""Ground truth for small games: exhaustive enumeration and seeded simulation."""

import bisect
from typing import Optional, Union

import numpy as np

from team_variance.exceptions import (
    EnumerationTooLargeError,
    MultichainError,
    TeamVarianceError,
)
from team_variance.models.game import (
    DeterministicPolicy,
    GameModel,
    PolicyMixture,
    iter_policies,
    policy_space_size,
)
from team_variance.schemas.report import (
    EnumerationResult,
    PolicyValue,
    SimulationEstimate,
)
from team_variance.services.variance_metrics import team_metrics
from team_variance.settings import Settings, get_settings
from team_variance.utils.decorators.validators import validate_args
from team_variance.utils.logging import get_logger

logger = get_logger(__name__)


@validate_args({"cap": {"min": {"value": 1}}})
def brute_force(
    game: GameModel,
    cap: Optional[int] = None,
    keep_table: bool = True,
    settings: Optional[Settings] = None,
) -> EnumerationResult:
    """Evaluate every joint stationary deterministic policy."""
    settings = settings or get_settings()
    if cap is None:
        cap = settings.enumeration_cap
    size = policy_space_size(game)
    if size > cap:
        raise EnumerationTooLargeError(size, cap)

    table: list[PolicyValue] = []
    skipped = 0
    best = float("inf")
    argmin: list[list[list[int]]] = []
    for policy in iter_policies(game):
        try:
            value = team_metrics(game, policy, settings).team_variance
        except MultichainError:
            skipped += 1
            continue
        if keep_table:
            table.append(PolicyValue(policy=policy.to_list(), team_variance=value))
        if value < best:
            best = value
            argmin = [policy.to_list()]
        elif value == best:
            argmin.append(policy.to_list())

    if not argmin:
        raise TeamVarianceError("no evaluable policy: every policy is multichain")
    logger.debug(
        "Enumeration finished", evaluated=size - skipped, skipped_multichain=skipped
    )
    return EnumerationResult(
        global_min_value=best,
        argmin=argmin,
        table=table if keep_table else None,
        evaluated=size - skipped,
        skipped_multichain=skipped,
    )


def _batch_se(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(values.size))


@validate_args(
    {
        "T": {"required": True, "min": {"value": 1, "message": "horizon must be >= 1"}},
    }
)
def simulate(
    game: GameModel,
    policy: Union[DeterministicPolicy, PolicyMixture],
    T: int,
    seed: int,
    settings: Optional[Settings] = None,
) -> SimulationEstimate:
    """Empirical team mean and variance from seeded trajectories.

    Player i runs on child i of ``SeedSequence(seed)``. Each step draws an
    action coin and a transition uniform, so a mixture with delta = 0 replays
    the base policy's trajectory exactly.
    """
    settings = settings or get_settings()
    if isinstance(policy, DeterministicPolicy):
        mixture = PolicyMixture(base=policy, direction=policy, delta=0.0)
    else:
        mixture = policy
    game.validate_policy(mixture.base)
    game.validate_policy(mixture.direction)

    streams = np.random.SeedSequence(seed).spawn(game.n_players)
    rewards = np.empty((game.n_players, T))
    for i, player in enumerate(game.players):
        rng = np.random.default_rng(streams[i])
        base_i, direction_i = mixture.restrict(i)
        cumulative = {
            (s, a): np.cumsum(player.row(s, a)).tolist()
            for s in range(player.n_states)
            for a in {base_i[s], direction_i[s]}
        }
        state = int(rng.integers(player.n_states))
        total = settings.burn_in + T
        coins = rng.random(total)
        moves = rng.random(total)
        for t in range(total):
            a = direction_i[state] if coins[t] < mixture.delta else base_i[state]
            if t >= settings.burn_in:
                rewards[i, t - settings.burn_in] = player.reward_of(state, a)
            row = cumulative[(state, a)]
            state = min(bisect.bisect_right(row, moves[t]), player.n_states - 1)

    per_player_mean = rewards.mean(axis=1)
    team_mean = float(per_player_mean.mean())
    squared = ((rewards - team_mean) ** 2).sum(axis=0)
    team_variance = float(squared.mean())

    n_batches = min(settings.n_batches, T)
    usable = (T // n_batches) * n_batches
    batch_means = rewards[:, :usable].mean(axis=0).reshape(n_batches, -1).mean(axis=1)
    batch_variances = squared[:usable].reshape(n_batches, -1).mean(axis=1)
    logger.debug("Simulation finished", seed=seed, horizon=T)

    return SimulationEstimate(
        horizon=T,
        seed=seed,
        burn_in=settings.burn_in,
        team_mean=team_mean,
        team_variance=team_variance,
        per_player_mean=per_player_mean.tolist(),
        team_mean_se=_batch_se(batch_means),
        team_variance_se=_batch_se(batch_variances),
    )
