"""Unhandled exception: a failed external call whose result is never branched on."""

from statefuzz.oracles.base import BaseOracle, OracleContext
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.vm.models import ExecutionTrace


class UnhandledExceptionOracle(BaseOracle):
    @property
    def bug_class(self) -> BugClass:
        return BugClass.UE

    def check(self, trace: ExecutionTrace, context: OracleContext) -> list[Finding]:
        return [
            self._finding(
                trace,
                context,
                call.pc,
                {"target": hex(call.target), "value": str(call.value), "injected": call.injected_failure},
            )
            for call in trace.call_events
            if call.kind == "CALL" and not call.succeeded and not call.result_checked
        ]


def check_ue(trace: ExecutionTrace, context: OracleContext | None = None) -> list[Finding]:
    return UnhandledExceptionOracle().check(trace, context or OracleContext())
