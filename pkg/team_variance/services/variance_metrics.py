"""Variance-family metrics and the two sensitivity formulas.

Team variance decomposes as the within-player sum of variances plus the
between-player sum of squared mean gaps. Replacing the team mean by a constant
``y`` gives the pseudo variance, which decouples across players and is what the
difference and derivative formulas differentiate.
"""

from typing import Iterable, Optional, Sequence

import numpy as np

from team_variance.exceptions import (
    AnalysisMismatchError,
    InvalidArgumentError,
    MultichainError,
)
from team_variance.models.chain import ChainAnalysis
from team_variance.models.game import (
    ActionMap,
    DeterministicPolicy,
    GameModel,
    PlayerModel,
    PolicyMixture,
    induced_chain,
    induced_mixed_chain,
)
from team_variance.schemas.report import VarianceReport
from team_variance.services.chain_analysis import (
    solve_poisson,
    stationary_distribution,
)
from team_variance.settings import Settings, get_settings
from team_variance.utils.decorators.validators import validate_args


def _stationary(
    P: np.ndarray, settings: Settings, player_index: Optional[int]
) -> np.ndarray:
    try:
        return stationary_distribution(P, settings)
    except MultichainError as e:
        raise e.attribute(player=player_index) from None


def player_potential(
    player: PlayerModel,
    u_i: ActionMap,
    y: float,
    settings: Optional[Settings] = None,
    player_index: Optional[int] = None,
) -> ChainAnalysis:
    """Potential of the squared-deviation cost (r - y)^2 under ``u_i``."""
    settings = settings or get_settings()
    P, r = induced_chain(player, u_i, player_index)
    try:
        return solve_poisson(P, (r - y) ** 2, settings)
    except MultichainError as e:
        raise e.attribute(player=player_index) from None


def player_metrics(
    player: PlayerModel,
    u_i: ActionMap,
    settings: Optional[Settings] = None,
    player_index: Optional[int] = None,
) -> tuple[float, float]:
    """Long-run mean and variance of one player's reward."""
    settings = settings or get_settings()
    P, r = induced_chain(player, u_i, player_index)
    pi = _stationary(P, settings, player_index)
    mean = float(pi @ r)
    return mean, float(pi @ (r - mean) ** 2)


def pseudo_player_variance(
    player: PlayerModel,
    u_i: ActionMap,
    y: float,
    settings: Optional[Settings] = None,
    player_index: Optional[int] = None,
) -> float:
    settings = settings or get_settings()
    P, r = induced_chain(player, u_i, player_index)
    pi = _stationary(P, settings, player_index)
    return float(pi @ (r - y) ** 2)


def build_report(means: Sequence[float], variances: Sequence[float]) -> VarianceReport:
    means = np.asarray(means, dtype=float)
    variances = np.asarray(variances, dtype=float)
    team_mean = float(means.mean())
    within = float(variances.sum())
    between = float(np.sum((means - team_mean) ** 2))
    return VarianceReport(
        per_player_mean=means.tolist(),
        per_player_variance=variances.tolist(),
        team_mean=team_mean,
        team_variance=within + between,
        within_sum=within,
        between_sum=between,
    )


def team_metrics(
    game: GameModel, policy: DeterministicPolicy, settings: Optional[Settings] = None
) -> VarianceReport:
    settings = settings or get_settings()
    stats = [
        player_metrics(player, policy[i], settings, player_index=i)
        for i, player in enumerate(game.players)
    ]
    return build_report([m for m, _ in stats], [v for _, v in stats])


def pseudo_team_variance(
    game: GameModel,
    policy: DeterministicPolicy,
    y: float,
    settings: Optional[Settings] = None,
) -> float:
    settings = settings or get_settings()
    return float(
        sum(
            pseudo_player_variance(player, policy[i], y, settings, player_index=i)
            for i, player in enumerate(game.players)
        )
    )


def pseudo_variance_curve(
    game: GameModel,
    policy: DeterministicPolicy,
    ys: Iterable[float],
    settings: Optional[Settings] = None,
) -> list[float]:
    return [pseudo_team_variance(game, policy, y, settings) for y in ys]


def player_difference(
    player: PlayerModel,
    u_i: ActionMap,
    u_new_i: ActionMap,
    y: float,
    analysis_at_u: ChainAnalysis,
    settings: Optional[Settings] = None,
    player_index: Optional[int] = None,
) -> float:
    """Pseudo-variance change of one player, from quantities at ``u_i`` and pi at ``u_new_i``."""
    settings = settings or get_settings()
    if analysis_at_u.n_states != player.n_states:
        raise AnalysisMismatchError(
            f"analysis covers {analysis_at_u.n_states} states, "
            f"player has {player.n_states}"
        )
    P, r = induced_chain(player, u_i, player_index)
    P_new, r_new = induced_chain(player, u_new_i, player_index)
    pi_new = _stationary(P_new, settings, player_index)
    g = analysis_at_u.potential
    return float(pi_new @ ((P_new - P) @ g + (r_new - y) ** 2 - (r - y) ** 2))


def team_difference(
    game: GameModel,
    u: DeterministicPolicy,
    u_new: DeterministicPolicy,
    settings: Optional[Settings] = None,
    potential_shifts: Optional[Sequence[float]] = None,
) -> float:
    """J_sigma(u_new) - J_sigma(u) evaluated through the difference formula."""
    settings = settings or get_settings()
    mu = team_metrics(game, u, settings).team_mean
    mu_new = team_metrics(game, u_new, settings).team_mean
    total = 0.0
    for i, player in enumerate(game.players):
        analysis = player_potential(player, u[i], mu, settings, player_index=i)
        if potential_shifts is not None:
            analysis = analysis.shifted(potential_shifts[i])
        total += player_difference(
            player, u[i], u_new[i], mu, analysis, settings, player_index=i
        )
    return total - game.n_players * (mu_new - mu) ** 2


def player_derivative_terms(
    player: PlayerModel,
    u_i: ActionMap,
    y: float,
    analysis_at_u: ChainAnalysis,
    player_index: Optional[int] = None,
) -> dict[tuple[int, int], float]:
    """Per (state, action) bracket of the derivative formula, before weighting by pi.

    Entry (s, a) is the change of P g + (r - y)^2 at state s when u_i(s) is
    replaced by a. A fixed point needs all of them >= 0.
    """
    P, r = induced_chain(player, u_i, player_index)
    g = analysis_at_u.potential
    current = P @ g + (r - y) ** 2
    terms = {}
    for s in range(player.n_states):
        acts, rows, rewards = player.candidates(s)
        values = rows @ g + (rewards - y) ** 2
        for a, value in zip(acts, values):
            terms[(s, a)] = float(value - current[s])
    return terms


def team_derivative(
    game: GameModel,
    u: DeterministicPolicy,
    u_new: DeterministicPolicy,
    settings: Optional[Settings] = None,
) -> float:
    """d J_sigma / d delta at delta = 0 along the per-step mixture u -> u_new."""
    settings = settings or get_settings()
    mu = team_metrics(game, u, settings).team_mean
    total = 0.0
    for i, player in enumerate(game.players):
        analysis = player_potential(player, u[i], mu, settings, player_index=i)
        P, r = induced_chain(player, u[i], i)
        P_new, r_new = induced_chain(player, u_new[i], i)
        g = analysis.potential
        total += float(
            analysis.pi @ ((P_new - P) @ g + (r_new - mu) ** 2 - (r - mu) ** 2)
        )
    return total


def mixture_metrics(
    game: GameModel, mixture: PolicyMixture, settings: Optional[Settings] = None
) -> VarianceReport:
    """Exact report of the per-step randomized policy (no simulation)."""
    settings = settings or get_settings()
    means, variances = [], []
    for i, player in enumerate(game.players):
        base_i, direction_i = mixture.restrict(i)
        P_mix, mixer = induced_mixed_chain(
            player, base_i, direction_i, mixture.delta, player_index=i
        )
        _, r = induced_chain(player, base_i, i)
        _, r_new = induced_chain(player, direction_i, i)
        pi = _stationary(P_mix, settings, i)
        mean = float(pi @ mixer.blend(r, r_new))
        # the reward is random in the action too
        second = float(pi @ mixer.blend((r - mean) ** 2, (r_new - mean) ** 2))
        means.append(mean)
        variances.append(second)
    return build_report(means, variances)


@validate_args(
    {
        "h": {
            "required": True,
            "validate": lambda h: 0.0 < h <= 0.5 or "h must be in (0, 0.5]",
        }
    }
)
def finite_difference_derivative(
    game: GameModel,
    u: DeterministicPolicy,
    u_new: DeterministicPolicy,
    h: float = 1e-5,
    settings: Optional[Settings] = None,
) -> float:
    """Richardson-extrapolated forward difference of J_sigma along the mixture.

    Mixtures are undefined for delta < 0, so only forward steps h and 2h are
    used: 2 D(h) - D(2h) with D(t) = (J(t) - J(0)) / t.
    """
    settings = settings or get_settings()
    if len(u) != len(u_new):
        raise InvalidArgumentError("policies cover different players")

    def value(delta: float) -> float:
        return mixture_metrics(
            game, PolicyMixture(base=u, direction=u_new, delta=delta), settings
        ).team_variance

    j0 = value(0.0)
    d_h = (value(h) - j0) / h
    d_2h = (value(2.0 * h) - j0) / (2.0 * h)
    return 2.0 * d_h - d_2h
