"""Deterministic re-execution of recorded seeds."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

from statefuzz.corpus.execution import ExecutionSettings, SeedExecutor
from statefuzz.corpus.seedfile import SeedFile
from statefuzz.frontend.models import ContractPackage
from statefuzz.oracles.models import Finding
from statefuzz.oracles.suite import OracleSuite
from statefuzz.vm.dump import dump_traces
from statefuzz.vm.models import ExecutionTrace

logger = logging.getLogger(__name__)


@dataclass
class ReplayResult:
    traces: list[ExecutionTrace] = field(default_factory=list)
    findings: list[Finding] = field(default_factory=list)
    dump: str = ""


def replay(
    seed_file: SeedFile | Path,
    package: ContractPackage,
    se_include_ordering: bool = False,
) -> ReplayResult:
    """Replay a seed file with its recorded call outcomes and re-run the trace oracles.

    Raises:
        SeedFileError: If the file cannot be read or has the wrong schema.
        PackageMismatchError: If the file was recorded for another package.
    """
    if isinstance(seed_file, Path):
        seed_file = SeedFile.read(seed_file)
    seed = seed_file.to_seed(package)
    executor = SeedExecutor(
        package,
        ExecutionSettings(
            accounts=seed_file.accounts, env=seed_file.env, initial_balance=seed_file.initial_balance
        ),
    )
    traces = executor.replay(seed, seed_file.outcomes, record_steps=True)

    suite = OracleSuite(package, se_include_ordering=se_include_ordering)
    suite.observe(traces)
    findings = suite.sorted_findings()
    logger.debug(f"Replayed {len(traces)} transactions, {len(findings)} findings")
    return ReplayResult(traces=traces, findings=findings, dump=dump_traces(traces, package))
