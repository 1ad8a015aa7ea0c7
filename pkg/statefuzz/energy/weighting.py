"""Pre-fuzz branch weighting.

A branch is weighted by how deep it sits on the executed path (w1) and by
whether a vulnerable instruction is reachable past it (w2).
"""

import logging

from statefuzz.bytecode.opcodes import Op
from statefuzz.corpus.execution import SeedExecutor
from statefuzz.corpus.models import Seed
from statefuzz.energy.models import BranchWeightTable, VulnerableInstLoc
from statefuzz.frontend.models import ContractPackage

logger = logging.getLogger(__name__)

DEFAULT_W2 = 4

_VULNERABLE_OPS = {
    Op.CALL: "CALL",
    Op.DELEGATECALL: "DELEGATECALL",
    Op.TIMESTAMP: "TIMESTAMP",
    Op.NUMBER: "NUMBER",
    Op.BALANCE: "BALANCE",
    Op.SELFDESTRUCT: "SELFDESTRUCT",
    Op.ORIGIN: "ORIGIN",
    Op.ADD: "ADD",
    Op.SUB: "SUB",
    Op.MUL: "MUL",
}


def vulnerable_locations(package: ContractPackage) -> set[VulnerableInstLoc]:
    return {
        VulnerableInstLoc(ins.pc, _VULNERABLE_OPS[Op(ins.opcode)])
        for ins in package.cfg.instructions
        if ins.opcode in _VULNERABLE_OPS
    }


def prefix_inference(package: ContractPackage, prefix_end_block: int) -> set[int]:
    """Instruction offsets reachable from a block, ignoring branch conditions."""
    cfg = package.cfg
    if prefix_end_block not in cfg.blocks:
        raise KeyError(f"{prefix_end_block} is not a basic block start")
    return {pc for start in cfg.reachable_blocks(prefix_end_block) for pc in cfg.blocks[start].pcs}


def weight_assign(nested_score: int) -> int:
    return nested_score


def branch_weighted(
    seed: Seed,
    inst_locs: set[VulnerableInstLoc],
    executor: SeedExecutor,
    w2_const: int = DEFAULT_W2,
) -> BranchWeightTable:
    """Execute `seed` once and weight every JUMPI transition along its path.

    The nested score restarts at each transaction and grows by one per
    top-level JUMPI; a branch seen more than once keeps its highest score.
    """
    if not seed.executed:
        executor.execute(seed)
    package = executor.package
    table = BranchWeightTable.for_branches(package.cfg.branch_ids)
    vulnerable_pcs = {loc.pc for loc in inst_locs}
    reach_cache: dict[int, bool] = {}

    for trace in seed.traces:
        nested_score = 0
        for event in trace.branch_events:
            if event.depth != 1:
                continue
            nested_score += 1
            entry = table.get(event.branch_id)
            entry.nested_score = max(entry.nested_score, nested_score)
            entry.w1 = weight_assign(entry.nested_score)

            dst = event.branch_id[1]
            if dst not in reach_cache:
                reach_cache[dst] = bool(prefix_inference(package, dst) & vulnerable_pcs)
            if reach_cache[dst]:
                entry.w2 = w2_const

    flagged = sum(1 for entry in table.entries.values() if entry.w2)
    logger.debug(f"Weighted {len(table)} branches, {flagged} reach a vulnerable instruction")
    return table
