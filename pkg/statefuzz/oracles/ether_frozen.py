"""Ether frozen: the contract accepts Ether but has no way to release it."""

from collections.abc import Iterable

from statefuzz.bytecode.opcodes import Op
from statefuzz.energy.weighting import prefix_inference
from statefuzz.frontend.models import ContractPackage
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.vm.models import CallEvent

RELEASING_OPS = (Op.CALL, Op.DELEGATECALL, Op.SELFDESTRUCT)


def releases_ether(call: CallEvent) -> bool:
    if call.kind == "CALL":
        return call.value > 0 and call.succeeded
    return call.kind in ("DELEGATECALL", "SELFDESTRUCT")


def reachable_releases(package: ContractPackage) -> set[int]:
    """Offsets of releasing instructions reachable from any function entry."""
    releasing = {ins.pc for ins in package.cfg.instructions if ins.opcode in RELEASING_OPS}
    reachable: set[int] = set()
    for fn in package.functions:
        reachable |= prefix_inference(package, fn.entry_offset)
    return releasing & reachable


def check_ef(package: ContractPackage, released_pcs: Iterable[int] = ()) -> list[Finding]:
    """Run once at campaign end.

    Args:
        package: The fuzzed contract
        released_pcs: Offsets of instructions that released Ether during the campaign

    Returns:
        One finding at the first payable entry, or nothing
    """
    payable = [fn for fn in package.functions if fn.payable]
    if not payable or set(released_pcs) or reachable_releases(package):
        return []
    first = min(payable, key=lambda fn: fn.entry_offset)
    return [
        Finding(
            bug_class=BugClass.EF,
            pc=first.entry_offset,
            line=package.line_of(first.entry_offset),
            function=first.name,
            evidence={"payable": [fn.name for fn in payable]},
        )
    ]
