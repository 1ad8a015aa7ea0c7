"""CLI module for statefuzz."""

from statefuzz.cli.main import cli

__all__ = ["cli"]
