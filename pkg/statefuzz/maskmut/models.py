"""Data models for byte-level mutations and mutation masks."""

from dataclasses import dataclass, field
from enum import Enum

from statefuzz.bytecode.cfg import BranchId


class MutationKind(Enum):
    OVERWRITE = "O"
    INSERT = "I"
    REPLACE = "R"
    DELETE = "D"


ALL_KINDS: frozenset[MutationKind] = frozenset(MutationKind)
KIND_ORDER = (MutationKind.OVERWRITE, MutationKind.INSERT, MutationKind.REPLACE, MutationKind.DELETE)


class MutationError(Exception):
    """Raised when a mutation does not fit the stream it is applied to."""


@dataclass(frozen=True)
class Mutation:
    kind: MutationKind
    n: int
    position: int
    payload: bytes = b""

    def __post_init__(self) -> None:
        if self.n < 1:
            raise MutationError(f"mutation must affect at least one byte, got n={self.n}")
        if self.kind != MutationKind.DELETE and len(self.payload) != self.n:
            raise MutationError(
                f"{self.kind.value} mutation needs a {self.n}-byte payload, got {len(self.payload)}"
            )

    def __str__(self) -> str:
        return f"({self.kind.value}, n={self.n}, i={self.position})"


@dataclass
class MutationMask:
    """Per-position sets of permitted mutation kinds over a seed stream."""

    per_position: list[frozenset[MutationKind]] = field(default_factory=list)

    @classmethod
    def empty(cls, size: int) -> "MutationMask":
        return cls([frozenset() for _ in range(size)])

    @classmethod
    def full(cls, size: int) -> "MutationMask":
        return cls([ALL_KINDS for _ in range(size)])

    def __len__(self) -> int:
        return len(self.per_position)

    def __getitem__(self, position: int) -> frozenset[MutationKind]:
        return self.per_position[position]

    def allow(self, position: int, kind: MutationKind) -> None:
        self.per_position[position] = self.per_position[position] | {kind}

    def critical_positions(self) -> list[int]:
        return [i for i, kinds in enumerate(self.per_position) if not kinds]

    def render(self) -> list[str]:
        """One row per position: offset, then O/I/R/D or '.' for each kind."""
        rows = []
        for position, kinds in enumerate(self.per_position):
            cells = "".join(kind.value if kind in kinds else "." for kind in KIND_ORDER)
            rows.append(f"{position:5d} {cells}")
        return rows


@dataclass(frozen=True)
class NestedBranchInfo:
    branch_id: BranchId
    nested_score: int
