"""Main CLI entry point for statefuzz."""

import logging

import click
from rich.console import Console
from rich.logging import RichHandler

from statefuzz import __version__
from statefuzz.cli.commands.compile import compile_cmd
from statefuzz.cli.commands.contracts import contracts
from statefuzz.cli.commands.fuzz import fuzz
from statefuzz.cli.commands.replay import replay_cmd


@click.group()
@click.version_option(version=__version__, prog_name="statefuzz")
@click.option("--verbose", "-v", is_flag=True, help="Log campaign progress to stderr")
@click.pass_context
def cli(ctx: click.Context, verbose: bool) -> None:
    """Statefuzz - sequence-aware greybox fuzzer for stateful contracts.

    \b
    Examples:
        statefuzz fuzz crowdsale --time 30
        statefuzz compile my_contract.clite -o my_contract.json
        statefuzz replay witness.json my_contract.json
    """
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    if verbose:
        logging.basicConfig(
            level=logging.DEBUG,
            format="%(message)s",
            handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
            force=True,
        )


# Register commands
cli.add_command(fuzz)
cli.add_command(compile_cmd)
cli.add_command(replay_cmd)
cli.add_command(contracts)


if __name__ == "__main__":
    cli()
