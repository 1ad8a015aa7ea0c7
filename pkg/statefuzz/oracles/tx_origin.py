"""Transaction origin use: tx origin compared for authorization."""

from statefuzz.oracles.base import BaseOracle, OracleContext, branch_chain
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.vm.models import ExecutionTrace
from statefuzz.vm.taint import TaintSource, has_source


class TxOriginOracle(BaseOracle):
    """An ORIGIN-tainted EQ deciding a JUMPI that a storage write or value transfer follows."""

    @property
    def bug_class(self) -> BugClass:
        return BugClass.TO

    def check(self, trace: ExecutionTrace, context: OracleContext) -> list[Finding]:
        findings = []
        for branch in trace.branch_events:
            guarded_by_origin = any(
                cmp.op == "EQ" and has_source(cmp.tags, TaintSource.ORIGIN)
                for cmp in branch_chain(trace, branch)
            ) or has_source(branch.tags, TaintSource.ORIGIN)
            if not guarded_by_origin:
                continue
            writes = any(
                store.kind == "SSTORE" and store.step > branch.step and store.depth == branch.depth
                for store in trace.storage_events
            )
            transfers = any(
                call.kind == "CALL" and call.value > 0 and call.step > branch.step and call.depth == branch.depth
                for call in trace.call_events
            )
            if writes or transfers:
                findings.append(
                    self._finding(trace, context, branch.pc, {"guards": "SSTORE" if writes else "CALL"})
                )
        return findings


def check_to(trace: ExecutionTrace, context: OracleContext | None = None) -> list[Finding]:
    return TxOriginOracle().check(trace, context or OracleContext())
