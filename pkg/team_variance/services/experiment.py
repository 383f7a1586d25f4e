"""End-to-end experiment behind the ``run`` command."""

import time
from dataclasses import dataclass
from typing import Optional

from team_variance.exceptions import EXIT_NO_CONVERGENCE, EXIT_NUMERICAL_ERROR
from team_variance.models.game import GameModel
from team_variance.repositories.scenario_repository import ScenarioRepository
from team_variance.schemas.run import (
    OracleComparison,
    RunConfig,
    RunSummary,
    SimulationComparison,
)
from team_variance.services.optimizer import MultistartResult, multistart
from team_variance.services.oracle import brute_force, simulate
from team_variance.settings import Settings
from team_variance.utils.logging import get_logger

logger = get_logger(__name__)

ORACLE_MATCH_TOL = 1e-9


@dataclass
class ExperimentOutcome:
    game: GameModel
    result: MultistartResult
    summary: RunSummary
    exit_code: int

    def traces(self):
        """(run_id, records) in start order; failed starts have no records."""
        return [
            (k, run.records) for k, run in enumerate(self.result.runs) if run is not None
        ]


def _exit_code(result: MultistartResult) -> int:
    if result.best_start is not None:
        return 0
    # a failed start keeps its partial run only when it ran out of iterations
    if any(run is not None and not run.converged for run in result.runs):
        return EXIT_NO_CONVERGENCE
    return EXIT_NUMERICAL_ERROR


def run_experiment(
    config: RunConfig, repository: ScenarioRepository, settings: Settings
) -> ExperimentOutcome:
    started = time.perf_counter()
    game = repository.get(config.scenario)
    result = multistart(
        game,
        n_starts=config.n_starts,
        seed=config.seed,
        max_iters=config.max_iters,
        settings=settings,
    )
    best = result.best

    oracle_block: Optional[OracleComparison] = None
    if config.oracle:
        enumeration = brute_force(game, keep_table=False, settings=settings)
        oracle_block = OracleComparison(
            global_min_value=enumeration.global_min_value,
            argmin=enumeration.argmin,
            evaluated=enumeration.evaluated,
            skipped_multichain=enumeration.skipped_multichain,
            best_run_matches=best is not None
            and abs(best.report.team_variance - enumeration.global_min_value)
            <= ORACLE_MATCH_TOL,
        )

    simulation_block: Optional[SimulationComparison] = None
    if config.simulate and best is not None:
        estimate = simulate(game, best.policy, config.simulate, config.seed, settings)
        simulation_block = SimulationComparison(
            estimate=estimate,
            analytic_team_mean=best.report.team_mean,
            analytic_team_variance=best.report.team_variance,
            within_three_se=abs(estimate.team_variance - best.report.team_variance)
            <= 3.0 * estimate.team_variance_se,
        )

    summary = RunSummary(
        scenario=config.scenario,
        seed=config.seed,
        n_starts=config.n_starts,
        max_iters=config.max_iters,
        converged_starts=sum(s.converged for s in result.summaries),
        best_start=result.best_start,
        best_policy=best.policy.to_list() if best else None,
        best_team_mean=best.report.team_mean if best else None,
        best_team_variance=best.report.team_variance if best else None,
        best_iterations=best.iterations if best else None,
        certificate=best.certificate if best else None,
        starts=result.summaries,
        timing_seconds=time.perf_counter() - started,
        oracle=oracle_block,
        simulation=simulation_block,
    )
    exit_code = _exit_code(result)
    logger.info("Experiment finished", scenario=config.scenario, exit_code=exit_code)
    return ExperimentOutcome(game=game, result=result, summary=summary, exit_code=exit_code)


__all__ = ["ExperimentOutcome", "run_experiment"]
