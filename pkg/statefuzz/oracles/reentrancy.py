"""Reentrancy: a value transfer repeated from inside the attacker's callback."""

from statefuzz.oracles.base import BaseOracle, OracleContext
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.vm.models import ExecutionTrace


class ReentrancyOracle(BaseOracle):
    @property
    def bug_class(self) -> BugClass:
        return BugClass.RE

    def check(self, trace: ExecutionTrace, context: OracleContext) -> list[Finding]:
        if trace.reverted:
            return []
        findings = []
        outer_calls = [
            call
            for call in trace.call_events
            if call.kind == "CALL"
            and call.depth == 1
            and call.gas_above_2300
            and call.reentered
            and call.succeeded
        ]
        for outer in outer_calls:
            for inner in trace.call_events:
                if (
                    inner.kind == "CALL"
                    and inner.depth == 2
                    and inner.step > outer.step
                    and inner.value > 0
                    and inner.succeeded
                ):
                    findings.append(
                        self._finding(
                            trace,
                            context,
                            outer.pc,
                            {"outerValue": str(outer.value), "reenteredValue": str(inner.value)},
                        )
                    )
                    break
        return findings


def check_re(trace: ExecutionTrace, context: OracleContext | None = None) -> list[Finding]:
    return ReentrancyOracle().check(trace, context or OracleContext())
