"""Integer overflow: wrapped arithmetic that is stored, sent or branched on."""

from statefuzz.oracles.base import BaseOracle, OracleContext
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.vm.models import ExecutionTrace
from statefuzz.vm.taint import Tags, TaintSource, tags_of


class OverflowOracle(BaseOracle):
    """Only committed transactions count; a wrap that never leaves the stack is benign."""

    @property
    def bug_class(self) -> BugClass:
        return BugClass.IO

    def check(self, trace: ExecutionTrace, context: OracleContext) -> list[Finding]:
        if trace.reverted or not any(wrap.wrapped for wrap in trace.wrap_events):
            return []

        sinks: list[tuple[str, Tags]] = []
        sinks.extend(("SSTORE", store.tags) for store in trace.storage_events if store.kind == "SSTORE")
        sinks.extend(("CALL", call.value_tags) for call in trace.call_events if call.kind == "CALL")
        sinks.extend(("JUMPI", branch.tags) for branch in trace.branch_events)

        wraps = {wrap.pc: wrap for wrap in trace.wrap_events if wrap.wrapped}
        findings = []
        reported: set[int] = set()
        for sink, tags in sinks:
            for tag in tags_of(tags, TaintSource.OVERFLOW):
                if tag.origin_pc in reported:
                    continue
                reported.add(tag.origin_pc)
                wrap = wraps.get(tag.origin_pc)
                evidence = {"sink": sink}
                if wrap is not None:
                    evidence.update({"op": wrap.op, "a": str(wrap.a), "b": str(wrap.b), "result": str(wrap.result)})
                findings.append(self._finding(trace, context, tag.origin_pc, evidence))
        return findings


def check_io(trace: ExecutionTrace, context: OracleContext | None = None) -> list[Finding]:
    return OverflowOracle().check(trace, context or OracleContext())
