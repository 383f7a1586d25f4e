import click

from team_variance.cli.commands.enumerate import enumerate_policies
from team_variance.cli.commands.export_scenario import export_scenario
from team_variance.cli.commands.run import run
from team_variance.cli.commands.simulate import simulate_policy
from team_variance.settings import configure_settings
from team_variance.utils.logging import configure_logging


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Log level for the structured log stream on stderr",
)
@click.option(
    "--max-workers",
    type=click.IntRange(min=1),
    help="Threads used to run independent starts",
)
@click.pass_context
def cli(ctx, log_level, max_workers):
    """Team-variance CLI - optimize, enumerate and simulate n-player games."""
    config_options = {}
    if log_level:
        config_options["log_level"] = log_level.upper()
    if max_workers:
        config_options["max_workers"] = max_workers

    if config_options:
        configure_settings(**config_options)
    if log_level:
        configure_logging()

    ctx.ensure_object(dict)


cli.add_command(run)
cli.add_command(enumerate_policies)
cli.add_command(simulate_policy)
cli.add_command(export_scenario)


def main():
    """Main entry point for CLI."""
    cli()


if __name__ == "__main__":
    main()
