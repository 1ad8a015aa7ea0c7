"""Strict ether equality: control flow decided by comparing a balance exactly."""

from statefuzz.oracles.base import BaseOracle, OracleContext, branch_chain
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.vm.models import ExecutionTrace
from statefuzz.vm.taint import TaintSource, has_source


class StrictEqualityOracle(BaseOracle):
    """EQ on a BALANCE-tainted value feeding a JUMPI; LT/GT too when ordering is included."""

    @property
    def bug_class(self) -> BugClass:
        return BugClass.SE

    def check(self, trace: ExecutionTrace, context: OracleContext) -> list[Finding]:
        ops = {"EQ", "LT", "GT"} if context.se_include_ordering else {"EQ"}
        findings = []
        for branch in trace.branch_events:
            for cmp in branch_chain(trace, branch):
                if cmp.op in ops and has_source(cmp.tags, TaintSource.BALANCE):
                    findings.append(self._finding(trace, context, branch.pc, {"compare": cmp.op, "comparePc": cmp.pc}))
                    break
        return findings


def check_se(trace: ExecutionTrace, context: OracleContext | None = None) -> list[Finding]:
    return StrictEqualityOracle().check(trace, context or OracleContext())
