"""Fuzz command: run a campaign against one contract."""

import json
import sys
from pathlib import Path

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from statefuzz.campaign.config import CampaignConfig
from statefuzz.campaign.orchestrator import FuzzCampaign
from statefuzz.campaign.report import CampaignReport, save_report
from statefuzz.cli.targets import resolve_target
from statefuzz.frontend.models import CompileError, PackageFormatError
from statefuzz.maskmut.mask import choose_target, compute_mask, nested_hit
from statefuzz.vm.dump import dump_traces

console = Console()


@click.command()
@click.argument("target")
@click.option("--time", "time_budget", type=float, help="Time budget in seconds (default: 600)")
@click.option("--energy", "energy_budget", type=int, help="Energy budget in executions")
@click.option("--seed", "rng_seed", type=int, help="RNG seed; fully determines a 1-worker run")
@click.option("--report", "-r", "report_path", type=click.Path(), help="Write the JSON report here")
@click.option("--workers", type=int, help="Worker threads for batch executions")
@click.option("--no-seq-mutation", is_flag=True, help="Fuzz only the base sequence order")
@click.option("--no-mask", is_flag=True, help="Mutate without mutation masks")
@click.option("--no-energy", is_flag=True, help="Allocate energy uniformly")
@click.option("--no-harvest", is_flag=True, help="Do not harvest PUSH constants as interesting values")
@click.option("--se-include-ordering", is_flag=True, help="Report LT/GT on balances as strict equality too")
@click.option("--dump-depgraph", is_flag=True, help="Print the dependency graph and templates")
@click.option("--dump-weights", is_flag=True, help="Print branch weights and energy as JSON")
@click.option("--dump-mask", is_flag=True, help="Print the mask of the deepest queued seed")
@click.option("--dump-trace", is_flag=True, help="Print the trace of the best-covering seed")
@click.option(
    "--project",
    "-p",
    type=click.Path(exists=True, file_okay=False, dir_okay=True),
    default=".",
    help="Project whose pyproject.toml holds [tool.statefuzz] (default: current directory)",
)
def fuzz(
    target: str,
    time_budget: float | None,
    energy_budget: int | None,
    rng_seed: int | None,
    report_path: str | None,
    workers: int | None,
    no_seq_mutation: bool,
    no_mask: bool,
    no_energy: bool,
    no_harvest: bool,
    se_include_ordering: bool,
    dump_depgraph: bool,
    dump_weights: bool,
    dump_mask: bool,
    dump_trace: bool,
    project: str,
) -> None:
    """Fuzz a contract and report bugs.

    TARGET is a .clite source, a compiled package JSON, or the name of a
    bundled contract (see `statefuzz contracts`). Exits with 2 when bugs are found.

    \b
    Examples:
        statefuzz fuzz crowdsale
        statefuzz fuzz guess_number --seed 7 --energy 20000
        statefuzz fuzz wallet.clite --report out/report.json --no-mask
    """
    try:
        config = CampaignConfig.from_pyproject(Path(project)).with_overrides(
            time_budget=time_budget,
            energy_budget=energy_budget,
            rng_seed=rng_seed,
            report_path=Path(report_path) if report_path else None,
            workers=workers,
            seq_mutation=False if no_seq_mutation else None,
            mask=False if no_mask else None,
            energy=False if no_energy else None,
            harvest_constants=False if no_harvest else None,
            se_include_ordering=True if se_include_ordering else None,
        )
    except ValueError as e:
        console.print(f"[red]Invalid configuration:[/] {e}")
        sys.exit(1)

    try:
        package = resolve_target(target)
    except CompileError as e:
        console.print(f"[red]Compilation failed:[/] {e.origin}")
        for diagnostic in e.diagnostics:
            console.print(f"  {diagnostic}")
        sys.exit(1)
    except (KeyError, PackageFormatError, OSError, ValueError) as e:
        console.print(f"[red]Error:[/] {e}")
        sys.exit(1)

    campaign = FuzzCampaign(package, config)
    if dump_depgraph:
        click.echo(
            json.dumps(
                {
                    "graph": campaign.graph.to_dict(),
                    "templates": [t.to_dict() for t in campaign.templates],
                },
                indent=2,
            )
        )

    with console.status(f"[bold blue]Fuzzing {package.name}..."):
        report = campaign.run()

    if config.report_path is not None:
        try:
            csv_path = save_report(report, config.report_path)
        except OSError as e:
            console.print(f"[red]Could not write report:[/] {e}")
            sys.exit(1)
        console.print(f"[green]Report saved to:[/] {config.report_path} (coverage series: {csv_path})")

    if dump_weights:
        _display_weights(campaign)
    if dump_mask:
        _display_mask(campaign)
    if dump_trace:
        _display_trace(campaign)

    _display_summary(report)
    if report.has_findings:
        sys.exit(2)


def _display_summary(report: CampaignReport) -> None:
    coverage_style = "green" if report.branch_coverage_percent >= 100 else "yellow"
    console.print(
        Panel(
            f"Coverage: [{coverage_style}]{report.branch_coverage_percent:.1f}%[/] "
            f"({len(report.covered_branches)}/{report.total_branches} branches)\n"
            f"Executions: [cyan]{report.executions}[/]\n"
            f"Stopped by: {report.termination} after {report.wall_clock:.1f}s",
            title=f"[bold]Campaign: {report.contract}[/]",
        )
    )
    if not report.findings:
        console.print("[green]No bugs found.[/]")
        return

    table = Table(title="Findings", show_header=True)
    table.add_column("Class", style="bold red")
    table.add_column("Bug")
    table.add_column("PC", justify="right")
    table.add_column("Line", justify="right")
    table.add_column("Function", style="cyan")
    for finding in report.findings:
        table.add_row(
            finding.bug_class.value,
            finding.bug_class.title,
            str(finding.pc),
            str(finding.line) if finding.line is not None else "-",
            finding.function or "-",
        )
    console.print(table)


def _display_weights(campaign: FuzzCampaign) -> None:
    click.echo(json.dumps(campaign.table.to_dict(), indent=2))


def _display_mask(campaign: FuzzCampaign) -> None:
    for seed in campaign.queue:
        target = choose_target(nested_hit(seed, campaign.package.cfg))
        if target is None:
            continue
        mask, probes = compute_mask(
            seed, target, campaign.queue.uncovered, campaign.executor, campaign.interesting, campaign.rng
        )
        console.print(
            f"[bold]Mask of seed {seed.seed_id}[/] toward {target.branch_id} "
            f"(nested {target.nested_score}, {probes} probes)"
        )
        console.print("\n".join(mask.render()), markup=False)
        return
    console.print("[yellow]No queued seed reaches a nested branch.[/]")


def _display_trace(campaign: FuzzCampaign) -> None:
    if not campaign.queue.seeds:
        console.print("[yellow]The queue is empty.[/]")
        return
    best = max(campaign.queue.seeds, key=lambda s: (len(s.covered_branches), -(s.seed_id or 0)))
    traces = campaign.executor.replay(best, list(best.outcomes), record_steps=True)
    console.print(dump_traces(traces, campaign.package), markup=False, highlight=False)
