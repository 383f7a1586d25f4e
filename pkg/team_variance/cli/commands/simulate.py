import json
from pathlib import Path
from typing import Optional

import click

from team_variance.cli.utils import print_error, print_table
from team_variance.exceptions import EXIT_PARSE_ERROR, TeamVarianceError
from team_variance.models.game import DeterministicPolicy, PolicyMixture
from team_variance.repositories.scenario_repository import get_scenario_repository
from team_variance.services.oracle import simulate
from team_variance.services.variance_metrics import mixture_metrics, team_metrics
from team_variance.settings import get_settings


def read_policy(path: Path) -> DeterministicPolicy:
    """A policy file holds either the nested action list or a run summary."""
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise click.BadParameter(f"cannot read policy from {path}: {e}") from None
    if isinstance(raw, dict):
        raw = raw.get("best_policy")
    if not isinstance(raw, list) or not all(isinstance(u_i, list) for u_i in raw):
        raise click.BadParameter(f"{path} does not contain a joint policy")
    return DeterministicPolicy(tuple(tuple(int(a) for a in u_i) for u_i in raw))


@click.command("simulate")
@click.option("--scenario", default="microgrid", show_default=True)
@click.option(
    "--policy",
    "policy_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="JSON policy, or a summary.json whose best policy is simulated",
)
@click.option(
    "--direction",
    "direction_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Second policy to randomize towards with probability --delta",
)
@click.option("--delta", type=click.FloatRange(0.0, 1.0), default=0.0, show_default=True)
@click.option("--horizon", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def simulate_policy(
    ctx,
    scenario: str,
    policy_path: Path,
    direction_path: Optional[Path],
    delta: float,
    horizon: int,
    seed: int,
) -> None:
    """Estimate team mean and variance of a policy by simulation."""
    settings = get_settings()
    try:
        base = read_policy(policy_path)
        direction = read_policy(direction_path) if direction_path else base
    except click.BadParameter as e:
        print_error(e.format_message())
        ctx.exit(EXIT_PARSE_ERROR)

    try:
        game = get_scenario_repository(settings).get(scenario)
        mixture = PolicyMixture(base=base, direction=direction, delta=delta)
        estimate = simulate(game, mixture, horizon, seed, settings)
        if direction_path:
            exact = mixture_metrics(game, mixture, settings)
        else:
            exact = team_metrics(game, base, settings)
    except TeamVarianceError as e:
        print_error(f"Simulation failed: {e.detail}")
        ctx.exit(e.exit_code)

    print_table(
        title=f"Simulation of {horizon} steps (seed {seed})",
        rows=[
            {
                "Quantity": "Team mean",
                "Simulated": f"{estimate.team_mean:.6g}",
                "Std. error": f"{estimate.team_mean_se:.3g}",
                "Exact": f"{exact.team_mean:.6g}",
            },
            {
                "Quantity": "Team variance",
                "Simulated": f"{estimate.team_variance:.6g}",
                "Std. error": f"{estimate.team_variance_se:.3g}",
                "Exact": f"{exact.team_variance:.6g}",
            },
        ],
    )
