"""Bytecode model shared by the compiler, the VM and the analyses."""

from statefuzz.bytecode.cfg import BasicBlock, BranchId, ControlFlowGraph
from statefuzz.bytecode.opcodes import Instruction, Op, assemble, disassemble, mnemonic

__all__ = [
    "BasicBlock",
    "BranchId",
    "ControlFlowGraph",
    "Instruction",
    "Op",
    "assemble",
    "disassemble",
    "mnemonic",
]
