"""Data models for state-variable dependencies and sequence templates."""

from dataclasses import dataclass, field
from typing import Any


@dataclass
class DependencyGraph:
    """Per-function read/write sets over state variables.

    `functions` keeps ABI declaration order, the constructor included, and
    drives every tie-break downstream.
    """

    functions: list[str] = field(default_factory=list)
    constructor: str = "constructor"
    writes: dict[str, set[str]] = field(default_factory=dict)
    reads: dict[str, set[str]] = field(default_factory=dict)
    branch_reads: dict[str, set[str]] = field(default_factory=dict)
    raw_self: set[tuple[str, str]] = field(default_factory=set)

    def declaration_index(self, function: str) -> int:
        return self.functions.index(function)

    def touches_state(self, function: str) -> bool:
        return bool(self.writes.get(function) or self.reads.get(function))

    def raw_functions(self) -> list[str]:
        """Functions with a RAW self-dependency, in declaration order."""
        owners = {fn for fn, _ in self.raw_self}
        return [fn for fn in self.functions if fn in owners and fn != self.constructor]

    def raw_vars(self, function: str) -> list[str]:
        return sorted(var for fn, var in self.raw_self if fn == function)

    def readers_of(self, var: str) -> set[str]:
        return {fn for fn, vars_read in self.reads.items() if var in vars_read}

    def to_dict(self) -> dict[str, Any]:
        def _sorted(table: dict[str, set[str]]) -> dict[str, list[str]]:
            return {fn: sorted(table[fn]) for fn in self.functions if table.get(fn)}

        return {
            "functions": list(self.functions),
            "constructor": self.constructor,
            "writes": _sorted(self.writes),
            "reads": _sorted(self.reads),
            "branchReads": _sorted(self.branch_reads),
            "rawSelf": [list(pair) for pair in sorted(self.raw_self)],
        }


@dataclass(frozen=True)
class SequenceTemplate:
    """An ordered list of function names, constructor first.

    `duplicated_at` holds the indices of calls inserted by RAW mutation.
    """

    calls: tuple[str, ...]
    duplicated_at: frozenset[int] = frozenset()
    label: str = "base"

    def __len__(self) -> int:
        return len(self.calls)

    def count(self, function: str) -> int:
        return self.calls.count(function)

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "calls": list(self.calls),
            "duplicatedAt": sorted(self.duplicated_at),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SequenceTemplate":
        return cls(
            calls=tuple(data["calls"]),
            duplicated_at=frozenset(int(i) for i in data.get("duplicatedAt", [])),
            label=data.get("label", "base"),
        )
