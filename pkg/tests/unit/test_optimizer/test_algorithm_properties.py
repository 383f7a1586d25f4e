"""Property tests for policy iteration on small enumerable games."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from team_variance.models.game import DeterministicPolicy, policy_space_size
from team_variance.services.optimizer import check_necessary_condition, run_algorithm1
from team_variance.services.oracle import brute_force
from team_variance.services.variance_metrics import team_metrics
from tests.factories import random_game, random_pair

seeds = st.integers(min_value=0, max_value=2**32 - 1)
# at most 64 joint policies
small_shapes = st.sampled_from([(1, 2, 2), (2, 1, 2), (2, 2, 2), (3, 2, 2), (2, 3, 2), (2, 1, 4)])


class TestPolicyIterationProperties:
    """Test fixed points, monotonicity and dominance by enumeration."""

    @given(seed=seeds, shape=small_shapes)
    def test_run_decreases_and_certifies(self, seed, shape):
        """Test strictly decreasing trace and a clean certificate at the fixed point."""
        game = random_game(seed, *shape)
        assert policy_space_size(game) <= 64
        init, _ = random_pair(game, seed)
        result = run_algorithm1(game, init, max_iters=200)

        assert result.converged
        values = [r.team_variance for r in result.records]
        assert all(later < earlier for earlier, later in zip(values, values[1:]))
        assert result.certificate.violations == []
        assert result.certificate == check_necessary_condition(game, result.policy)

    @given(seed=seeds, shape=small_shapes)
    def test_enumeration_dominates_every_run(self, seed, shape):
        """Test the global minimum is at most any fixed point's value."""
        game = random_game(seed, *shape)
        init, _ = random_pair(game, seed)
        result = run_algorithm1(game, init, max_iters=200)
        oracle = brute_force(game, keep_table=False)
        assert oracle.skipped_multichain == 0
        assert oracle.global_min_value <= result.report.team_variance + 1e-12

    @given(seed=seeds, shape=small_shapes)
    def test_global_minimum_is_a_fixed_point(self, seed, shape):
        """Test policy iteration started at the enumerated minimum does not move."""
        game = random_game(seed, *shape)
        oracle = brute_force(game, keep_table=False)
        u_star = DeterministicPolicy(tuple(map(tuple, oracle.argmin[0])))
        result = run_algorithm1(game, u_star, max_iters=200)
        assert result.report.team_variance == pytest.approx(oracle.global_min_value)
        assert result.iterations == 0

    @given(seed=seeds, shape=small_shapes)
    def test_terminates_within_policy_space_size(self, seed, shape):
        """Test max_iters = |U| always leaves room to reach a fixed point."""
        game = random_game(seed, *shape)
        init, _ = random_pair(game, seed)
        result = run_algorithm1(game, init, max_iters=policy_space_size(game))
        assert result.converged
        assert len(result.records) <= policy_space_size(game)

    @given(seed=seeds, shape=small_shapes)
    def test_signal_is_the_evaluated_team_mean(self, seed, shape):
        """Test every record's mean is exactly the evaluated team mean of its policy."""
        game = random_game(seed, *shape)
        init, _ = random_pair(game, seed)
        result = run_algorithm1(game, init, max_iters=200)
        for record in result.records:
            policy = DeterministicPolicy(tuple(map(tuple, record.policy)))
            assert record.team_mean == team_metrics(game, policy).team_mean
            assert sum(record.per_player_pseudo_variance) == pytest.approx(
                record.team_variance, rel=0.0, abs=1e-10
            )

    @given(seed=seeds, shape=small_shapes)
    def test_enumerated_minimum_passes_the_elementwise_check(self, seed, shape):
        """Test every global argmin is a stationary pure equilibrium."""
        game = random_game(seed, *shape)
        oracle = brute_force(game, keep_table=False)
        for argmin in oracle.argmin:
            u_star = DeterministicPolicy(tuple(map(tuple, argmin)))
            assert check_necessary_condition(game, u_star).violations == []
