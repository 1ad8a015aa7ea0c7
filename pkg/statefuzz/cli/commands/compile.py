"""Compile command: CLite source to a package JSON document."""

import sys
from pathlib import Path

import click
from rich.console import Console
from rich.table import Table

from statefuzz.cli.targets import resolve_target
from statefuzz.frontend.models import CompileError, PackageFormatError

console = Console()


@click.command(name="compile")
@click.argument("target")
@click.option("--output", "-o", type=click.Path(), help="Write the package JSON here instead of stdout")
def compile_cmd(target: str, output: str | None) -> None:
    """Compile a contract to a package (bytecode, ABI, storage layout, access facts).

    \b
    Examples:
        statefuzz compile crowdsale
        statefuzz compile wallet.clite -o wallet.json
    """
    try:
        package = resolve_target(target)
    except CompileError as e:
        console.print(f"[red]Compilation failed:[/] {e.origin}")
        for diagnostic in e.diagnostics:
            console.print(f"  {diagnostic}")
        sys.exit(1)
    except (KeyError, PackageFormatError, OSError) as e:
        console.print(f"[red]Error:[/] {e}")
        sys.exit(1)

    if output is None:
        click.echo(package.to_json())
        return

    output_path = Path(output)
    try:
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(package.to_json(), encoding="utf-8")
    except OSError as e:
        console.print(f"[red]Could not write package:[/] {e}")
        sys.exit(1)

    table = Table(title=f"{package.name} ({len(package.bytecode)} bytes)", show_header=True)
    table.add_column("Function", style="cyan")
    table.add_column("Params")
    table.add_column("Payable", justify="center")
    table.add_column("Entry", justify="right")
    for fn in package.functions:
        table.add_row(
            fn.name,
            ", ".join(f"{name}: {ptype}" for name, ptype in fn.params),
            "[green]✓[/]" if fn.payable else "",
            str(fn.entry_offset),
        )
    console.print(table)
    console.print(f"[green]Package saved to:[/] {output_path}")
