"""Opcode table and disassembler for the contract VM.

The instruction set is a small EVM-flavoured subset. Numbering follows the EVM
where an equivalent exists; ARG, LLOAD/LSTORE and MAPLOAD/MAPSTORE are local to
this VM (argument, local-slot and mapping access without memory/calldata).
"""

from dataclasses import dataclass
from enum import IntEnum


class Op(IntEnum):
    """Fixed-width opcodes. PUSH/DUP/SWAP ranges are handled by helpers below."""

    STOP = 0x00
    ADD = 0x01
    MUL = 0x02
    SUB = 0x03
    LT = 0x10
    GT = 0x11
    EQ = 0x14
    ISZERO = 0x15
    AND = 0x16
    OR = 0x17
    NOT = 0x19
    ADDRESS = 0x30
    BALANCE = 0x31
    ORIGIN = 0x32
    CALLER = 0x33
    CALLVALUE = 0x34
    ARG = 0x35
    TIMESTAMP = 0x42
    NUMBER = 0x43
    POP = 0x50
    LLOAD = 0x51
    LSTORE = 0x52
    SLOAD = 0x54
    SSTORE = 0x55
    JUMP = 0x56
    JUMPI = 0x57
    MAPLOAD = 0x58
    MAPSTORE = 0x59
    JUMPDEST = 0x5B
    CALL = 0xF1
    DELEGATECALL = 0xF4
    REVERT = 0xFD
    INVALID = 0xFE
    SELFDESTRUCT = 0xFF


PUSH1 = 0x60
PUSH32 = 0x7F
DUP1 = 0x80
DUP16 = 0x8F
SWAP1 = 0x90
SWAP16 = 0x9F

# Opcodes carrying a one-byte immediate index.
INDEXED_OPS = frozenset({Op.ARG, Op.LLOAD, Op.LSTORE})

# Instructions after which a basic block ends.
TERMINATORS = frozenset({Op.JUMP, Op.JUMPI, Op.STOP, Op.REVERT, Op.SELFDESTRUCT, Op.INVALID})
HALTING = frozenset({Op.STOP, Op.REVERT, Op.SELFDESTRUCT, Op.INVALID})

COMPARISONS = frozenset({Op.LT, Op.GT, Op.EQ, Op.ISZERO})
ARITHMETIC = frozenset({Op.ADD, Op.SUB, Op.MUL})

_KNOWN = {int(op) for op in Op}


def is_push(opcode: int) -> bool:
    return PUSH1 <= opcode <= PUSH32


def is_dup(opcode: int) -> bool:
    return DUP1 <= opcode <= DUP16


def is_swap(opcode: int) -> bool:
    return SWAP1 <= opcode <= SWAP16


def push_op(width: int) -> int:
    """Opcode for a PUSH with a `width`-byte immediate."""
    if not 1 <= width <= 32:
        raise ValueError(f"PUSH width must be 1..32, got {width}")
    return PUSH1 + width - 1


def immediate_width(opcode: int) -> int:
    if is_push(opcode):
        return opcode - PUSH1 + 1
    if opcode in INDEXED_OPS:
        return 1
    return 0


def mnemonic(opcode: int) -> str:
    if is_push(opcode):
        return f"PUSH{opcode - PUSH1 + 1}"
    if is_dup(opcode):
        return f"DUP{opcode - DUP1 + 1}"
    if is_swap(opcode):
        return f"SWAP{opcode - SWAP1 + 1}"
    if opcode in _KNOWN:
        return Op(opcode).name
    return f"UNKNOWN_0x{opcode:02x}"


@dataclass(frozen=True)
class Instruction:
    """A decoded instruction."""

    pc: int
    opcode: int
    operand: int | None = None

    @property
    def name(self) -> str:
        return mnemonic(self.opcode)

    @property
    def size(self) -> int:
        return 1 + immediate_width(self.opcode)

    @property
    def next_pc(self) -> int:
        return self.pc + self.size

    def __str__(self) -> str:
        if self.operand is None:
            return f"{self.pc:04x}: {self.name}"
        return f"{self.pc:04x}: {self.name} 0x{self.operand:x}"


def disassemble(code: bytes) -> list[Instruction]:
    """Decode bytecode into instructions.

    A PUSH immediate truncated by the end of the code is zero-padded on the right,
    as the EVM does.
    """
    instructions: list[Instruction] = []
    pc = 0
    while pc < len(code):
        opcode = code[pc]
        width = immediate_width(opcode)
        operand = None
        if width:
            raw = code[pc + 1 : pc + 1 + width]
            operand = int.from_bytes(raw.ljust(width, b"\x00"), "big")
        instructions.append(Instruction(pc=pc, opcode=opcode, operand=operand))
        pc += 1 + width
    return instructions


def assemble(instructions: list[Instruction]) -> bytes:
    """Encode instructions back into bytes."""
    out = bytearray()
    for ins in instructions:
        out.append(ins.opcode)
        width = immediate_width(ins.opcode)
        if width:
            out.extend((ins.operand or 0).to_bytes(width, "big"))
    return bytes(out)
