"""Interesting values for replacement mutations."""

from statefuzz.bytecode.opcodes import Op, is_push
from statefuzz.frontend.models import ContractPackage

BOUNDARY_VALUES = (
    0,
    1,
    2,
    (1 << 8) - 1,
    (1 << 16) - 1,
    (1 << 64) - 1,
    1 << 255,
    (1 << 256) - 1,
)


def harvest_constants(package: ContractPackage) -> list[int]:
    """PUSH operands of the bytecode, except jump destinations, in code order."""
    instructions = package.cfg.instructions
    constants: list[int] = []
    for index, ins in enumerate(instructions):
        if not is_push(ins.opcode) or ins.operand is None:
            continue
        following = instructions[index + 1] if index + 1 < len(instructions) else None
        if following is not None and following.opcode in (Op.JUMP, Op.JUMPI):
            continue
        if ins.operand not in constants:
            constants.append(ins.operand)
    return constants


def render(value: int, n: int) -> bytes:
    """The low-order `n` bytes of `value`, big-endian."""
    width = max(n, 32)
    return (value % (1 << (8 * width))).to_bytes(width, "big")[-n:]


class InterestingValues:
    """Boundary values plus, optionally, constants harvested from the bytecode."""

    def __init__(self, package: ContractPackage | None = None, harvest: bool = True) -> None:
        values = list(BOUNDARY_VALUES)
        if package is not None and harvest:
            values.extend(v for v in harvest_constants(package) if v not in values)
        self.values: tuple[int, ...] = tuple(values)

    def __len__(self) -> int:
        return len(self.values)

    def first_differing(self, original: bytes) -> bytes:
        """Rendering of the first value that changes `original`."""
        n = len(original)
        for value in self.values:
            payload = render(value, n)
            if payload != original:
                return payload
        return bytes(b ^ 0xFF for b in original)
