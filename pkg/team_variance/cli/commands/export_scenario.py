from pathlib import Path
from typing import Optional

import click

from team_variance.cli.utils import print_error, print_success
from team_variance.exceptions import TeamVarianceError
from team_variance.repositories.scenario_repository import get_scenario_repository


@click.command("export-scenario")
@click.argument("scenario", required=True)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Destination file; the JSON is printed to stdout when omitted",
)
@click.pass_context
def export_scenario(ctx, scenario: str, out: Optional[Path]) -> None:
    """Write a builtin or file scenario in the scenario JSON format."""
    repository = get_scenario_repository()
    try:
        game = repository.get(scenario)
    except TeamVarianceError as e:
        print_error(f"Failed to load scenario: {e.detail}")
        ctx.exit(e.exit_code)

    if out is None:
        click.echo(repository.dumps(game))
        return
    path = repository.save(game, out)
    print_success(f"Scenario '{game.name}' written to {path}")
