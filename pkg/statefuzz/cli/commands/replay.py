"""Replay command: re-execute a recorded seed."""

import json
import random
import sys
from pathlib import Path

import click
from rich.console import Console
from rich.table import Table

from statefuzz.campaign.replay import replay
from statefuzz.cli.targets import resolve_target
from statefuzz.corpus.execution import ExecutionSettings, SeedExecutor
from statefuzz.corpus.seedfile import PackageMismatchError, SeedFile, SeedFileError
from statefuzz.frontend.models import CompileError, ContractPackage, PackageFormatError
from statefuzz.maskmut.interesting import InterestingValues
from statefuzz.maskmut.mask import choose_target, compute_mask, nested_hit

console = Console()


@click.command(name="replay")
@click.argument("seedfile", type=click.Path(exists=True, dir_okay=False))
@click.argument("target")
@click.option("--dump-trace", is_flag=True, help="Print the line-oriented trace")
@click.option("--dump-mask", is_flag=True, help="Print the seed's mutation mask")
@click.option("--json", "as_json", is_flag=True, help="Print findings as JSON")
@click.option(
    "--trace-json",
    type=click.Path(dir_okay=False),
    help="Write the replayed transaction traces as JSON here",
)
@click.option("--se-include-ordering", is_flag=True, help="Report LT/GT on balances as strict equality too")
def replay_cmd(
    seedfile: str,
    target: str,
    dump_trace: bool,
    dump_mask: bool,
    as_json: bool,
    trace_json: str | None,
    se_include_ordering: bool,
) -> None:
    """Replay SEEDFILE against TARGET and re-check it with the oracles.

    Finding witnesses in a campaign report are seed files; save one to disk
    to replay it. Exits with 2 when the replay exhibits bugs.
    """
    try:
        package = resolve_target(target)
        seed_file = SeedFile.read(Path(seedfile))
        result = replay(seed_file, package, se_include_ordering=se_include_ordering)
    except CompileError as e:
        console.print(f"[red]Compilation failed:[/] {e.origin}")
        sys.exit(1)
    except PackageMismatchError as e:
        console.print(f"[red]Package mismatch:[/] {e}")
        sys.exit(1)
    except (SeedFileError, KeyError, PackageFormatError, OSError) as e:
        console.print(f"[red]Error:[/] {e}")
        sys.exit(1)

    if dump_trace:
        console.print(result.dump, markup=False, highlight=False)

    if trace_json:
        path = Path(trace_json)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps([t.to_dict() for t in result.traces], indent=2), encoding="utf-8")
        except OSError as e:
            console.print(f"[red]Could not write traces:[/] {e}")
            sys.exit(1)
        console.print(f"[green]Traces saved to:[/] {path}")

    if dump_mask:
        _display_mask(seed_file, package)

    if as_json:
        click.echo(json.dumps([f.to_dict() for f in result.findings], indent=2))
    elif result.findings:
        table = Table(title="Reproduced Findings", show_header=True)
        table.add_column("Class", style="bold red")
        table.add_column("Bug")
        table.add_column("PC", justify="right")
        table.add_column("Line", justify="right")
        table.add_column("Tx", justify="right")
        for finding in result.findings:
            table.add_row(
                finding.bug_class.value,
                finding.bug_class.title,
                str(finding.pc),
                str(finding.line) if finding.line is not None else "-",
                str(finding.tx_index),
            )
        console.print(table)
    else:
        console.print(f"[green]Replayed {len(result.traces)} transactions, no bugs.[/]")

    if result.findings:
        sys.exit(2)


def _display_mask(seed_file: SeedFile, package: ContractPackage) -> None:
    settings = ExecutionSettings(
        accounts=seed_file.accounts, env=seed_file.env, initial_balance=seed_file.initial_balance
    )
    executor = SeedExecutor(package, settings)
    seed = seed_file.to_seed(package)
    executor.replay(seed, seed_file.outcomes)
    target = choose_target(nested_hit(seed, package.cfg))
    uncovered = set(executor.branches) - seed.covered_branches
    mask, probes = compute_mask(
        seed, target, uncovered, executor, InterestingValues(package), random.Random(0)
    )
    toward = f"toward {target.branch_id}" if target else "toward the closest uncovered branch"
    console.print(f"[bold]Mask[/] {toward} ({probes} probes)")
    console.print("\n".join(mask.render()), markup=False)
