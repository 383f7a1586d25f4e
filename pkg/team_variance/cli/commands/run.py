from pathlib import Path
from typing import Optional

import click
from pydantic import ValidationError

from team_variance.cli.utils import (
    format_policy,
    print_error,
    print_info,
    print_success,
    print_table,
)
from team_variance.exceptions import EXIT_PARSE_ERROR, TeamVarianceError
from team_variance.repositories.artifact_repository import get_artifact_repository
from team_variance.repositories.scenario_repository import get_scenario_repository
from team_variance.schemas.run import RunConfig
from team_variance.services.experiment import run_experiment
from team_variance.settings import configure_settings, get_settings


@click.command("run")
@click.option(
    "--scenario",
    default="microgrid",
    show_default=True,
    help="Builtin scenario name or path to a scenario JSON file",
)
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed")
@click.option("--n-starts", type=int, default=1, show_default=True)
@click.option("--max-iters", type=int, default=50, show_default=True)
@click.option("--tie-tol", type=float, help="Tie tolerance of the improvement step")
@click.option("--solve-tol", type=float, help="Rank tolerance of the linear solves")
@click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("out"),
    show_default=True,
    help="Directory receiving trace.csv and summary.json",
)
@click.option("--oracle", is_flag=True, help="Compare against exhaustive enumeration")
@click.option(
    "--simulate",
    "simulate_horizon",
    type=int,
    help="Check the best policy with a Monte Carlo run of this many steps",
)
@click.pass_context
def run(
    ctx,
    scenario: str,
    seed: int,
    n_starts: int,
    max_iters: int,
    tie_tol: Optional[float],
    solve_tol: Optional[float],
    out: Path,
    oracle: bool,
    simulate_horizon: Optional[int],
) -> None:
    """Run multistart decentralized policy iteration on a scenario."""
    try:
        config = RunConfig(
            scenario=scenario,
            seed=seed,
            n_starts=n_starts,
            max_iters=max_iters,
            tie_tol=tie_tol,
            solve_tol=solve_tol,
            out=out,
            oracle=oracle,
            simulate=simulate_horizon,
        )
    except ValidationError as e:
        print_error(f"Invalid arguments: {e.errors()[0]['msg']}")
        ctx.exit(EXIT_PARSE_ERROR)

    overrides = {
        key: value
        for key, value in (("tie_tol", config.tie_tol), ("solve_tol", config.solve_tol))
        if value is not None
    }
    if overrides:
        configure_settings(**overrides)
    settings = get_settings()

    try:
        outcome = run_experiment(config, get_scenario_repository(settings), settings)
    except TeamVarianceError as e:
        print_error(f"Run failed: {e.detail}")
        ctx.exit(e.exit_code)

    artifacts = get_artifact_repository(config.out)
    artifacts.write_trace(outcome.game.n_players, outcome.traces())
    artifacts.write_summary(outcome.summary)

    summary = outcome.summary
    print_table(
        title=f"Starts on {summary.scenario}",
        rows=[
            {
                "Start": s.start,
                "Initial J": s.initial_team_variance,
                "Final J": s.final_team_variance,
                "Iterations": s.iterations,
                "Converged": s.converged,
                "Error": s.error or "",
            }
            for s in summary.starts
        ],
    )

    if outcome.exit_code != 0:
        print_error(
            f"No start converged ({summary.n_starts} starts); artifacts in {config.out}"
        )
        ctx.exit(outcome.exit_code)

    labels = [player.action_labels for player in outcome.game.players]
    print_info(
        f"Best start {summary.best_start}: mean {summary.best_team_mean:.6g}, "
        f"variance {summary.best_team_variance:.6g} "
        f"after {summary.best_iterations} iterations "
        f"({summary.certificate.classification.value})\n"
        + format_policy(summary.best_policy, labels)
    )
    if summary.oracle is not None:
        print_info(
            f"Global minimum {summary.oracle.global_min_value:.6g} over "
            f"{summary.oracle.evaluated} unichain policies; "
            f"best run matches: {summary.oracle.best_run_matches}"
        )
    if summary.simulation is not None:
        estimate = summary.simulation.estimate
        print_info(
            f"Simulated variance {estimate.team_variance:.6g} "
            f"(se {estimate.team_variance_se:.3g}); "
            f"within 3 se: {summary.simulation.within_three_se}"
        )
    print_success(
        f"{summary.converged_starts}/{summary.n_starts} starts converged; "
        f"artifacts written to {config.out}"
    )
