"""Data models for branch weights and vulnerable instruction locations."""

from dataclasses import dataclass, field
from typing import Any

from statefuzz.bytecode.cfg import BranchId


@dataclass(frozen=True)
class VulnerableInstLoc:
    """An instruction associated with a bug class."""

    pc: int
    kind: str


@dataclass
class BranchWeight:
    branch_id: BranchId
    nested_score: int = 0
    w1: int = 0
    w2: int = 0
    allocated: int = 0
    spent: int = 0

    @property
    def weight(self) -> int:
        return self.w1 + self.w2

    @property
    def share(self) -> int:
        return 1 + self.w1 + self.w2

    def to_dict(self) -> dict[str, Any]:
        return {
            "branchId": list(self.branch_id),
            "nestedScore": self.nested_score,
            "w1": self.w1,
            "w2": self.w2,
            "allocatedEnergy": self.allocated,
            "spentEnergy": self.spent,
        }


@dataclass
class BranchWeightTable:
    """Weights and energy per branch, keyed by branch id."""

    entries: dict[BranchId, BranchWeight] = field(default_factory=dict)

    @classmethod
    def for_branches(cls, branches: tuple[BranchId, ...] | list[BranchId]) -> "BranchWeightTable":
        return cls({branch: BranchWeight(branch) for branch in branches})

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, branch: object) -> bool:
        return branch in self.entries

    def get(self, branch: BranchId) -> BranchWeight:
        if branch not in self.entries:
            self.entries[branch] = BranchWeight(branch)
        return self.entries[branch]

    def weight_of(self, branch: BranchId) -> int:
        entry = self.entries.get(branch)
        return entry.weight if entry else 0

    def allocation_of(self, branch: BranchId) -> int:
        entry = self.entries.get(branch)
        return entry.allocated if entry else 0

    def merge_max(self, other: "BranchWeightTable") -> None:
        """Keep the larger score and weights per branch; allocations are left alone."""
        for branch, theirs in other.entries.items():
            mine = self.get(branch)
            mine.nested_score = max(mine.nested_score, theirs.nested_score)
            mine.w1 = max(mine.w1, theirs.w1)
            mine.w2 = max(mine.w2, theirs.w2)

    def to_dict(self) -> dict[str, Any]:
        return {"branches": [self.entries[b].to_dict() for b in sorted(self.entries)]}
