"""CLI commands for statefuzz."""

from statefuzz.cli.commands.compile import compile_cmd
from statefuzz.cli.commands.contracts import contracts
from statefuzz.cli.commands.fuzz import fuzz
from statefuzz.cli.commands.replay import replay_cmd

__all__ = ["compile_cmd", "contracts", "fuzz", "replay_cmd"]
