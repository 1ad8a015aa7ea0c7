"""Runs the trace oracles over executed seeds and collects unique findings."""

import logging
from collections.abc import Iterable, Sequence
from typing import Any, Callable

from statefuzz.frontend.models import ContractPackage
from statefuzz.oracles.base import BaseOracle, OracleContext
from statefuzz.oracles.block_dependency import BlockDependencyOracle
from statefuzz.oracles.delegatecall import DelegatecallOracle
from statefuzz.oracles.ether_frozen import check_ef, releases_ether
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.oracles.overflow import OverflowOracle
from statefuzz.oracles.reentrancy import ReentrancyOracle
from statefuzz.oracles.selfdestruct import SelfdestructOracle
from statefuzz.oracles.strict_equality import StrictEqualityOracle
from statefuzz.oracles.tx_origin import TxOriginOracle
from statefuzz.oracles.unhandled_exception import UnhandledExceptionOracle
from statefuzz.vm.models import ExecutionTrace

logger = logging.getLogger(__name__)

WitnessFactory = Callable[[], dict[str, Any]]


def default_oracles() -> list[BaseOracle]:
    return [
        BlockDependencyOracle(),
        DelegatecallOracle(),
        OverflowOracle(),
        ReentrancyOracle(),
        SelfdestructOracle(),
        StrictEqualityOracle(),
        TxOriginOracle(),
        UnhandledExceptionOracle(),
    ]


class OracleSuite:
    """Checks every executed transaction and keeps the first witness per (class, pc)."""

    def __init__(
        self,
        package: ContractPackage,
        oracles: Sequence[BaseOracle] | None = None,
        enabled: Iterable[BugClass] | None = None,
        se_include_ordering: bool = False,
    ) -> None:
        self.package = package
        self.se_include_ordering = se_include_ordering
        self.enabled = set(enabled) if enabled is not None else set(BugClass)
        self.oracles = [
            oracle
            for oracle in (oracles if oracles is not None else default_oracles())
            if oracle.bug_class in self.enabled
        ]
        self.findings: dict[tuple[str, int], Finding] = {}
        self.released_pcs: set[int] = set()

    def check_trace(self, trace: ExecutionTrace, tx_index: int | None = None) -> list[Finding]:
        """Run all enabled oracles on one trace. A failing oracle is logged and skipped."""
        context = OracleContext(self.package, tx_index, self.se_include_ordering)
        results: list[Finding] = []
        for oracle in self.oracles:
            try:
                results.extend(oracle.check(trace, context))
            except Exception as e:
                logger.warning(f"Oracle {oracle.bug_class.value} failed on {trace.function}: {e}")
        return results

    def observe(
        self, traces: Sequence[ExecutionTrace], witness: WitnessFactory | None = None
    ) -> list[Finding]:
        """Check a seed's traces and return the findings not seen before.

        `witness` is only called when something new turns up.
        """
        new: list[Finding] = []
        witness_data: dict[str, Any] | None = None
        for index, trace in enumerate(traces):
            self.released_pcs.update(call.pc for call in trace.call_events if releases_ether(call))
            for finding in self.check_trace(trace, index):
                if finding.key in self.findings:
                    continue
                if witness is not None and witness_data is None:
                    witness_data = witness()
                finding.witness = witness_data
                self.findings[finding.key] = finding
                new.append(finding)
                logger.info(
                    f"{finding.bug_class.title} at pc {finding.pc}"
                    f" (line {finding.line}, {finding.function})"
                )
        return new

    def finalize(self) -> list[Finding]:
        """Run the campaign-level checks and return every finding, ordered by class then pc."""
        if BugClass.EF in self.enabled:
            try:
                for finding in check_ef(self.package, self.released_pcs):
                    self.findings.setdefault(finding.key, finding)
            except Exception as e:
                logger.warning(f"Oracle EF failed: {e}")
        return self.sorted_findings()

    def sorted_findings(self) -> list[Finding]:
        return sorted(self.findings.values(), key=lambda f: (f.bug_class.value, f.pc))
