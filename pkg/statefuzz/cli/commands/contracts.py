"""Contracts command: list the bundled corpus."""

import click
from rich.console import Console
from rich.table import Table

from statefuzz.contracts.loader import KINDS, ContractCorpus

console = Console()


@click.command()
@click.option("--kind", type=click.Choice(KINDS), help="Only list contracts of this kind")
def contracts(kind: str | None) -> None:
    """List bundled contracts and their bug labels."""
    corpus = ContractCorpus()

    table = Table(title="Bundled Contracts")
    table.add_column("Name", style="cyan")
    table.add_column("Kind")
    table.add_column("Labels", style="red")
    table.add_column("Description", style="dim")

    for name in corpus.names(kind):
        entry = corpus.entry(name)
        labels = ", ".join(sorted(b.value for b in entry.bugs)) or "-"
        table.add_row(name, entry.kind, labels, entry.description)

    console.print(table)
