"""Unprotected delegatecall: caller-chosen targets with no sender guard."""

from statefuzz.oracles.base import BaseOracle, OracleContext
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.vm.models import ExecutionTrace
from statefuzz.vm.taint import TaintSource, has_source


class DelegatecallOracle(BaseOracle):
    @property
    def bug_class(self) -> BugClass:
        return BugClass.UD

    def check(self, trace: ExecutionTrace, context: OracleContext) -> list[Finding]:
        findings = []
        for call in trace.call_events:
            if call.kind != "DELEGATECALL" or not has_source(call.target_tags, TaintSource.PARAM):
                continue
            guarded = any(
                branch.step < call.step
                and branch.depth == call.depth
                and has_source(branch.tags, TaintSource.CALLER)
                for branch in trace.branch_events
            )
            if not guarded:
                findings.append(self._finding(trace, context, call.pc, {"target": hex(call.target)}))
        return findings


def check_ud(trace: ExecutionTrace, context: OracleContext | None = None) -> list[Finding]:
    return DelegatecallOracle().check(trace, context or OracleContext())
