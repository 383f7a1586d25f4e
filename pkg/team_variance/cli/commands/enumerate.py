from typing import Optional

import click

from team_variance.cli.utils import format_policy, print_error, print_info, print_table
from team_variance.exceptions import TeamVarianceError
from team_variance.repositories.scenario_repository import get_scenario_repository
from team_variance.services.oracle import brute_force
from team_variance.settings import get_settings


@click.command("enumerate")
@click.option("--scenario", default="microgrid", show_default=True)
@click.option("--cap", type=click.IntRange(min=1), help="Largest policy space to enumerate")
@click.option("--top", type=click.IntRange(min=1), default=10, show_default=True)
@click.pass_context
def enumerate_policies(ctx, scenario: str, cap: Optional[int], top: int) -> None:
    """Evaluate every deterministic joint policy and report the global minimum."""
    settings = get_settings()
    try:
        game = get_scenario_repository(settings).get(scenario)
        result = brute_force(game, cap=cap, keep_table=True, settings=settings)
    except TeamVarianceError as e:
        print_error(f"Enumeration failed: {e.detail}")
        ctx.exit(e.exit_code)

    ranked = sorted(result.table, key=lambda entry: entry.team_variance)[:top]
    print_table(
        title=f"Lowest team variance on {game.name}",
        rows=[
            {
                "Policy": entry.policy,
                "Team variance": f"{entry.team_variance:.6g}",
            }
            for entry in ranked
        ],
    )
    labels = [player.action_labels for player in game.players]
    print_info(
        f"Global minimum {result.global_min_value:.6g} "
        f"({result.evaluated} evaluated, {result.skipped_multichain} multichain skipped)\n"
        + "\n".join(format_policy(policy, labels) for policy in result.argmin)
    )
