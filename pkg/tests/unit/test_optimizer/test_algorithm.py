"""Tests for the improvement step, policy iteration and the convergence certificate."""

import math

import pytest

from team_variance.exceptions import (
    InvalidArgumentError,
    MaxIterationsError,
    MultichainError,
)
from team_variance.models.game import DeterministicPolicy, GameModel, PlayerModel
from team_variance.schemas.report import CertificateClass
from team_variance.services.optimizer import (
    check_necessary_condition,
    improve_player,
    inner_problem_value,
    run_algorithm1,
    solve_pseudo_mdp,
)
from team_variance.services.variance_metrics import team_metrics
from team_variance.settings import configure_settings, get_settings
from tests.factories import chain_player, one_state_player


def _sticky_player() -> PlayerModel:
    """Two states; action 0 stays, action 1 moves to the other state."""
    return PlayerModel(
        admissible=((0, 1), (0, 1)),
        transition={
            (0, 0): [1.0, 0.0],
            (0, 1): [0.0, 1.0],
            (1, 0): [0.0, 1.0],
            (1, 1): [1.0, 0.0],
        },
        reward={(0, 0): 0.0, (0, 1): 0.0, (1, 0): 4.0, (1, 1): 4.0},
    )


class TestImprovePlayer:
    """Test one player's improvement step."""

    def test_picks_reward_closest_to_signal(self):
        """Test costs (0 - 1)^2 and (1 - 1)^2 select the reward-1 action."""
        assert improve_player(one_state_player([0, 1]), (0,), 1.0) == (1,)

    def test_fixed_point_is_kept(self):
        """Test an already optimal policy comes back unchanged."""
        assert improve_player(one_state_player([0, 1]), (1,), 1.0) == (1,)

    def test_tie_keeps_current_action(self):
        """Test equal costs keep the incumbent."""
        assert improve_player(one_state_player([1, 2]), (0,), 1.5) == (0,)

    def test_tie_prefers_lowest_index(self):
        """Test equal costs without the incumbent pick the lowest index."""
        player = one_state_player([5, 1, 2])
        assert improve_player(player, (0,), 1.5) == (1,)


class TestRunPolicyIteration:
    """Test the evaluate/improve loop."""

    def test_toy_reaches_global_minimum(self, toy):
        """Test (1, 3) moves to (2, 2) and stops."""
        result = run_algorithm1(toy, DeterministicPolicy(((0,), (0,))))
        assert result.converged
        assert result.policy == DeterministicPolicy(((1,), (1,)))
        assert [r.team_variance for r in result.records] == pytest.approx([2.0, 0.0])
        assert [r.decisions_changed for r in result.records] == [2, 0]
        assert result.iterations == 1
        assert result.initial_team_variance == pytest.approx(2.0)

    def test_fixed_point_start(self, toy):
        """Test a fixed point needs one evaluation and no change."""
        result = run_algorithm1(toy, DeterministicPolicy(((1,), (1,))))
        assert len(result.records) == 1
        assert result.records[0].decisions_changed == 0

    def test_local_fixed_point(self, toy):
        """Test (1, 2) is a fixed point with a flat direction."""
        result = run_algorithm1(toy, DeterministicPolicy(((0,), (1,))))
        assert result.converged
        assert result.report.team_variance == pytest.approx(0.5)
        assert result.certificate.classification == CertificateClass.FIRST_ORDER_STATIONARY
        assert result.certificate.n_violations == 0

    def test_records_carry_per_player_values(self, toy):
        """Test the trace exposes means and pseudo variances."""
        record = run_algorithm1(toy, DeterministicPolicy(((0,), (0,)))).records[0]
        assert record.per_player_mean == [1.0, 3.0]
        assert record.per_player_pseudo_variance == pytest.approx([1.0, 1.0])
        assert record.policy == [[0], [0]]

    def test_max_iters_counts_evaluations(self, toy):
        """Test one evaluation is not enough to confirm convergence."""
        with pytest.raises(MaxIterationsError) as exc_info:
            run_algorithm1(toy, DeterministicPolicy(((0,), (0,))), max_iters=1)
        assert exc_info.value.exit_code == 4
        partial = exc_info.value.result
        assert not partial.converged
        assert len(partial.records) == 1

    def test_multichain_start_is_attributed(self):
        """Test a multichain initial policy names the player and iteration."""
        game = GameModel(players=(one_state_player([0, 1]), _sticky_player()))
        with pytest.raises(MultichainError) as exc_info:
            run_algorithm1(game, DeterministicPolicy(((0,), (0, 0))))
        assert exc_info.value.player == 1
        assert exc_info.value.iteration == 0

    def test_transient_only_change_is_tolerated(self):
        """Test a flat step is fine when the changed decision is transient."""
        # state 0 drains into absorbing state 1; the action at state 0 only
        # changes what the transient visit pays
        player = PlayerModel(
            admissible=((0, 1), (0,)),
            transition={(0, 0): [0.0, 1.0], (0, 1): [0.0, 1.0], (1, 0): [0.0, 1.0]},
            reward={(0, 0): 9.0, (0, 1): 3.0, (1, 0): 3.0},
        )
        game = GameModel(players=(player,))
        result = run_algorithm1(game, DeterministicPolicy(((0, 0),)))
        assert result.converged
        assert result.policy == DeterministicPolicy(((1, 0),))
        assert result.report.team_variance == pytest.approx(0.0)

    @pytest.mark.parametrize("max_iters", [0, -3])
    def test_rejects_non_positive_max_iters(self, toy, max_iters):
        """Test a zero or negative bound is refused rather than replaced by the default."""
        with pytest.raises(InvalidArgumentError) as exc_info:
            run_algorithm1(toy, DeterministicPolicy(((0,), (0,))), max_iters=max_iters)
        assert "max_iters must be at least 1" in exc_info.value.detail

    def test_uses_configured_default_max_iters(self, toy):
        """Test the settings default bounds evaluations."""
        configure_settings(default_max_iters=1)
        with pytest.raises(MaxIterationsError):
            run_algorithm1(toy, DeterministicPolicy(((0,), (0,))), settings=get_settings())


class TestCheckNecessaryCondition:
    """Test the convergence certificate."""

    def test_global_minimum_is_strict(self, toy):
        """Test every deviation from (2, 2) is strictly uphill."""
        certificate = check_necessary_condition(toy, DeterministicPolicy(((1,), (1,))))
        assert certificate.classification == CertificateClass.STRICT_LOCAL_MIN
        assert certificate.violations == []
        assert certificate.satisfied_necessary_condition == [[True], [True]]
        assert certificate.min_directional_derivative == pytest.approx(1.0)

    def test_non_fixed_point_has_violation(self, toy):
        """Test the decision an improvement step would change is flagged."""
        certificate = check_necessary_condition(toy, DeterministicPolicy(((0,), (0,))))
        assert certificate.n_violations == 2
        assert {(v.player, v.state, v.action) for v in certificate.violations} == {
            (0, 0, 1),
            (1, 0, 1),
        }
        assert all(v.gap < 0 for v in certificate.violations)
        assert certificate.satisfied_necessary_condition == [[False], [False]]

    def test_no_deviation_is_vacuously_strict(self):
        """Test a single-action game has an empty deviation set."""
        game = GameModel(players=(one_state_player([4]),))
        certificate = check_necessary_condition(game, DeterministicPolicy(((0,),)))
        assert certificate.classification == CertificateClass.STRICT_LOCAL_MIN
        assert math.isinf(certificate.min_directional_derivative)


class TestInnerProblem:
    """Test the decoupled pseudo-variance problems."""

    def test_solve_pseudo_mdp(self):
        """Test the single-player minimizer for a fixed y."""
        u_i, value = solve_pseudo_mdp(one_state_player([0, 1, 5]), 4.0)
        assert u_i == (2,)
        assert value == pytest.approx(1.0)

    def test_pseudo_mdp_on_chain(self):
        """Test a chain with no choices returns its pseudo variance."""
        player = chain_player([[0.5, 0.5], [0.5, 0.5]], [1, 3])
        u_i, value = solve_pseudo_mdp(player, 0.0)
        assert u_i == (0, 0)
        assert value == pytest.approx(5.0)

    def test_inner_value_at_team_mean_bounds_team_variance(self, toy):
        """Test min over policies of J_y at y = mu(u) is at most J(u)."""
        u = DeterministicPolicy(((0,), (0,)))
        report = team_metrics(toy, u)
        value, minimizer = inner_problem_value(toy, report.team_mean)
        assert value <= report.team_variance + 1e-12
        assert minimizer == DeterministicPolicy(((1,), (1,)))
        assert value == pytest.approx(0.0)
