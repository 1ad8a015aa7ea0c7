"""Unprotected selfdestruct: the attacker account can destroy the contract."""

from statefuzz.oracles.base import BaseOracle, OracleContext
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.vm.models import ExecutionTrace


class SelfdestructOracle(BaseOracle):
    @property
    def bug_class(self) -> BugClass:
        return BugClass.US

    def check(self, trace: ExecutionTrace, context: OracleContext) -> list[Finding]:
        if trace.sender != trace.attacker:
            return []
        return [
            self._finding(trace, context, call.pc, {"beneficiary": hex(call.target)})
            for call in trace.call_events
            if call.kind == "SELFDESTRUCT"
        ]


def check_us(trace: ExecutionTrace, context: OracleContext | None = None) -> list[Finding]:
    return SelfdestructOracle().check(trace, context or OracleContext())
