"""Block dependency: block state steering control flow or value transfer."""

from statefuzz.oracles.base import BaseOracle, OracleContext
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.vm.models import ExecutionTrace
from statefuzz.vm.taint import TaintSource, tags_of


class BlockDependencyOracle(BaseOracle):
    """TIMESTAMP or NUMBER reaching a JUMPI, a CALL, or an ordering/equality comparison."""

    @property
    def bug_class(self) -> BugClass:
        return BugClass.BD

    def check(self, trace: ExecutionTrace, context: OracleContext) -> list[Finding]:
        findings: list[Finding] = []
        reported_origins: set[int] = set()

        for branch in trace.branch_events:
            origins = tags_of(branch.tags, TaintSource.BLOCKSTATE)
            if origins:
                reported_origins.update(tag.origin_pc for tag in origins)
                findings.append(
                    self._finding(trace, context, branch.pc, {"sink": "JUMPI", "sources": [str(t) for t in origins]})
                )
        for call in trace.call_events:
            origins = tags_of(call.value_tags | call.target_tags, TaintSource.BLOCKSTATE)
            if call.kind == "CALL" and origins:
                reported_origins.update(tag.origin_pc for tag in origins)
                findings.append(
                    self._finding(trace, context, call.pc, {"sink": "CALL", "sources": [str(t) for t in origins]})
                )
        for cmp in trace.cmp_events:
            if cmp.op not in ("LT", "GT", "EQ"):
                continue
            fresh = [
                tag
                for tag in tags_of(cmp.tags, TaintSource.BLOCKSTATE)
                if tag.origin_pc not in reported_origins
            ]
            if fresh:
                reported_origins.update(tag.origin_pc for tag in fresh)
                findings.append(
                    self._finding(trace, context, cmp.pc, {"sink": cmp.op, "sources": [str(t) for t in fresh]})
                )
        return findings


def check_bd(trace: ExecutionTrace, context: OracleContext | None = None) -> list[Finding]:
    return BlockDependencyOracle().check(trace, context or OracleContext())
