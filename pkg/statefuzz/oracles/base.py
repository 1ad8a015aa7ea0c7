"""Base class and shared helpers for bug oracles."""

from abc import ABC, abstractmethod
from collections.abc import Iterator
from dataclasses import dataclass
from typing import Any

from statefuzz.frontend.models import ContractPackage
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.vm.models import BranchEvent, CmpEvent, ExecutionTrace


@dataclass(frozen=True)
class OracleContext:
    """What an oracle may know besides the trace itself."""

    package: ContractPackage | None = None
    tx_index: int | None = None
    se_include_ordering: bool = False


class BaseOracle(ABC):
    """Abstract base class for trace oracles. Oracles are pure functions of their inputs."""

    @property
    @abstractmethod
    def bug_class(self) -> BugClass:
        """Return the bug class this oracle reports."""
        ...

    @abstractmethod
    def check(self, trace: ExecutionTrace, context: OracleContext) -> list[Finding]:
        """Classify one executed transaction.

        Args:
            trace: The transaction's execution trace
            context: Package and position of the transaction

        Returns:
            Findings of this oracle's bug class, possibly empty
        """
        ...

    def _finding(
        self,
        trace: ExecutionTrace,
        context: OracleContext,
        pc: int,
        evidence: dict[str, Any] | None = None,
    ) -> Finding:
        line = context.package.line_of(pc) if context.package is not None else None
        return Finding(
            bug_class=self.bug_class,
            pc=pc,
            line=line,
            function=trace.function,
            tx_index=context.tx_index,
            evidence=evidence or {},
        )


def provenance_chain(trace: ExecutionTrace, index: int | None) -> Iterator[CmpEvent]:
    """Comparison events feeding a value, outermost first, following ISZERO links."""
    seen = set()
    while index is not None and index not in seen and 0 <= index < len(trace.cmp_events):
        seen.add(index)
        event = trace.cmp_events[index]
        yield event
        index = event.inner


def branch_chain(trace: ExecutionTrace, branch: BranchEvent) -> list[CmpEvent]:
    return list(provenance_chain(trace, branch.cond_provenance))
