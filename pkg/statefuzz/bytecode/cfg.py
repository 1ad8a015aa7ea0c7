"""Basic-block control-flow graph recovered from bytecode."""

import bisect
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx

from statefuzz.bytecode.opcodes import (
    HALTING,
    TERMINATORS,
    Instruction,
    Op,
    disassemble,
    is_push,
)

BranchId = tuple[int, int]
"""A (source block, destination block) transition, keyed by block start offsets."""

_ROOT = -1
"""Synthetic node joining every function entry for dominator analysis."""


@dataclass
class BasicBlock:
    """A maximal straight-line run of instructions."""

    start: int
    instructions: list[Instruction] = field(default_factory=list)
    successors: list[int] = field(default_factory=list)
    jump_target: int | None = None
    fallthrough: int | None = None

    @property
    def end(self) -> int:
        """Offset one past the last byte of the block."""
        return self.instructions[-1].next_pc if self.instructions else self.start

    @property
    def last(self) -> Instruction:
        return self.instructions[-1]

    @property
    def is_conditional(self) -> bool:
        return bool(self.instructions) and self.last.opcode == Op.JUMPI

    @property
    def pcs(self) -> list[int]:
        return [ins.pc for ins in self.instructions]


class ControlFlowGraph:
    """CFG over basic blocks keyed by their start offset.

    Block boundaries sit at offset 0, at every JUMPDEST and function entry, and
    directly after JUMP, JUMPI, STOP, REVERT, SELFDESTRUCT and INVALID. Jump
    destinations are resolved from the PUSH immediately preceding the jump.
    """

    def __init__(self, code: bytes, entries: Iterable[int] = ()) -> None:
        self.code = code
        self.instructions = disassemble(code)
        self.entries = sorted(set(entries))
        self._by_pc = {ins.pc: ins for ins in self.instructions}
        self.blocks: dict[int, BasicBlock] = {}
        self._build()
        self._starts = sorted(self.blocks)

    def _build(self) -> None:
        leaders = {0} | set(self.entries)
        for ins in self.instructions:
            if ins.opcode == Op.JUMPDEST:
                leaders.add(ins.pc)
            if ins.opcode in TERMINATORS:
                leaders.add(ins.next_pc)

        current: BasicBlock | None = None
        for ins in self.instructions:
            if ins.pc in leaders or current is None:
                current = BasicBlock(start=ins.pc)
                self.blocks[ins.pc] = current
            current.instructions.append(ins)

        for block in self.blocks.values():
            last = block.last
            after = last.next_pc if last.next_pc in self.blocks else None
            if last.opcode in (Op.JUMP, Op.JUMPI):
                target = self._resolve_target(block)
                if target is not None:
                    block.jump_target = target
                    block.successors.append(target)
                if last.opcode == Op.JUMPI and after is not None:
                    block.fallthrough = after
                    if after not in block.successors:
                        block.successors.append(after)
            elif last.opcode not in HALTING and after is not None:
                block.fallthrough = after
                block.successors.append(after)

    def _resolve_target(self, block: BasicBlock) -> int | None:
        if len(block.instructions) < 2:
            return None
        push = block.instructions[-2]
        if not is_push(push.opcode) or push.operand is None:
            return None
        target = self._by_pc.get(push.operand)
        if target is None or target.opcode != Op.JUMPDEST:
            return None
        return push.operand

    def instruction_at(self, pc: int) -> Instruction | None:
        return self._by_pc.get(pc)

    def block_of(self, pc: int) -> int:
        """Start offset of the block containing `pc`."""
        index = bisect.bisect_right(self._starts, pc) - 1
        if index < 0:
            raise KeyError(pc)
        return self._starts[index]

    def jumpi_blocks(self) -> list[BasicBlock]:
        return [self.blocks[start] for start in self._starts if self.blocks[start].is_conditional]

    @cached_property
    def branch_ids(self) -> tuple[BranchId, ...]:
        """Every conditional transition, i.e. both arms of every JUMPI."""
        ids: list[BranchId] = []
        for block in self.jumpi_blocks():
            for succ in (block.jump_target, block.fallthrough):
                if succ is not None and (block.start, succ) not in ids:
                    ids.append((block.start, succ))
        return tuple(sorted(ids))

    def opposite(self, branch: BranchId) -> BranchId | None:
        """The other arm of the JUMPI owning `branch`."""
        block = self.blocks.get(branch[0])
        if block is None or not block.is_conditional:
            return None
        for succ in (block.jump_target, block.fallthrough):
            if succ is not None and succ != branch[1]:
                return (block.start, succ)
        return None

    @cached_property
    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.blocks)
        for block in self.blocks.values():
            g.add_edges_from((block.start, succ) for succ in block.successors)
        return g

    def reachable_blocks(self, start: int) -> set[int]:
        """Blocks reachable from `start` ignoring branch conditions, `start` included."""
        return {start} | nx.descendants(self.graph, start)

    def dominators(self) -> dict[int, set[int]]:
        """Map each block reachable from a function entry to the blocks dominating it."""
        g = self.graph.copy()
        g.add_node(_ROOT)
        g.add_edges_from((_ROOT, entry) for entry in self.entries)
        if not self.entries:
            g.add_edge(_ROOT, 0)
        idoms = nx.immediate_dominators(g, _ROOT)

        doms: dict[int, set[int]] = {}
        for node in idoms:
            if node == _ROOT:
                continue
            chain = set()
            current = node
            while current != _ROOT and current not in chain:
                chain.add(current)
                current = idoms.get(current, _ROOT)
            doms[node] = chain
        return doms

    @cached_property
    def enclosing_conditionals(self) -> dict[int, int]:
        """Number of JUMPIs whose arm dominates each block.

        A JUMPI block J encloses block X when J dominates some successor s of J
        and s dominates X. A `require` therefore encloses the code after it.
        """
        doms = self.dominators()
        depth: dict[int, int] = {}
        jumpis = self.jumpi_blocks()
        for node, dominated_by in doms.items():
            count = 0
            for block in jumpis:
                if block.start == node:
                    continue
                for succ in block.successors:
                    if succ in dominated_by and block.start in doms.get(succ, set()):
                        count += 1
                        break
            depth[node] = count
        return depth

    def nesting_score(self, branch: BranchId) -> int:
        """Static nesting of a branch: its own JUMPI plus every enclosing one."""
        return 1 + self.enclosing_conditionals.get(branch[0], 0)
