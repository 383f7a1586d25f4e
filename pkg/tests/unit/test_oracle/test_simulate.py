"""Tests for seeded Monte Carlo estimates."""

import pytest

from team_variance.exceptions import InvalidArgumentError
from team_variance.models.game import DeterministicPolicy, GameModel, PolicyMixture
from team_variance.services.oracle import simulate
from team_variance.services.variance_metrics import mixture_metrics, team_metrics
from team_variance.settings import configure_settings, get_settings
from tests.factories import chain_player, constant_player, random_game, random_pair


class TestSimulate:
    """Test simulation against exact values."""

    def test_constant_rewards(self):
        """Test constant players give exact mean and zero variance."""
        game = GameModel(players=(constant_player(5.0),))
        estimate = simulate(game, DeterministicPolicy(((0, 0),)), T=500, seed=1)
        assert estimate.team_mean == pytest.approx(5.0)
        assert estimate.team_variance == pytest.approx(0.0)
        assert estimate.burn_in == 1000

    def test_symmetric_chain_within_standard_errors(self):
        """Test rewards [1, 3] on the mixing chain: mean 2, variance 1."""
        game = GameModel(players=(chain_player([[0.5, 0.5], [0.5, 0.5]], [1, 3]),))
        estimate = simulate(game, DeterministicPolicy(((0, 0),)), T=200_000, seed=3)
        assert abs(estimate.team_mean - 2.0) <= 4 * estimate.team_mean_se
        assert abs(estimate.team_variance - 1.0) <= 4 * estimate.team_variance_se
        assert 0.0 < estimate.team_mean_se < 0.05

    def test_random_game_matches_exact_values(self):
        """Test a random ergodic game against its analytic report."""
        game = random_game(17, n_players=2, n_states=3, n_actions=2)
        u, _ = random_pair(game, 17)
        exact = team_metrics(game, u)
        estimate = simulate(game, u, T=200_000, seed=5)
        assert abs(estimate.team_mean - exact.team_mean) <= 4 * estimate.team_mean_se
        assert abs(estimate.team_variance - exact.team_variance) <= (
            4 * estimate.team_variance_se
        )

    def test_mixture_matches_exact_values(self, toy):
        """Test a per-step randomized policy against mixture_metrics."""
        mixture = PolicyMixture(
            base=DeterministicPolicy(((0,), (0,))),
            direction=DeterministicPolicy(((1,), (1,))),
            delta=0.3,
        )
        exact = mixture_metrics(toy, mixture)
        estimate = simulate(toy, mixture, T=200_000, seed=8)
        assert abs(estimate.team_variance - exact.team_variance) <= (
            4 * estimate.team_variance_se
        )

    def test_zero_delta_replays_base_trajectory(self):
        """Test delta = 0 ignores the direction policy step for step."""
        game = random_game(2, n_players=2, n_states=3, n_actions=2)
        u, v = random_pair(game, 2)
        base = simulate(game, u, T=5_000, seed=11)
        mixed = simulate(game, PolicyMixture(base=u, direction=v, delta=0.0), T=5_000, seed=11)
        assert mixed == base

    def test_seed_reproducibility(self, toy):
        """Test equal seeds give equal estimates."""
        u = DeterministicPolicy(((0,), (1,)))
        assert simulate(toy, u, T=1_000, seed=4) == simulate(toy, u, T=1_000, seed=4)

    def test_configured_burn_in(self, toy):
        """Test burn-in comes from settings."""
        configure_settings(burn_in=10)
        estimate = simulate(toy, DeterministicPolicy(((0,), (1,))), 100, 0, get_settings())
        assert estimate.burn_in == 10

    def test_horizon_must_be_positive(self, toy):
        """Test T = 0 is refused."""
        with pytest.raises(InvalidArgumentError) as exc_info:
            simulate(toy, DeterministicPolicy(((0,), (1,))), T=0, seed=0)
        assert "horizon must be >= 1" in exc_info.value.detail


@pytest.mark.slow
class TestLongSimulations:
    """Test million-step runs against the analytic team variance."""

    @pytest.mark.parametrize("seed", range(10))
    def test_random_game_within_three_standard_errors(self, seed):
        """Test T = 10^6 after the default burn-in on a random three-player game."""
        game = random_game(seed, n_players=3, n_states=4, n_actions=3)
        u, _ = random_pair(game, seed)
        exact = team_metrics(game, u)
        estimate = simulate(game, u, T=1_000_000, seed=seed)
        assert estimate.burn_in == 1000
        assert abs(estimate.team_variance - exact.team_variance) <= (
            3 * estimate.team_variance_se
        )
