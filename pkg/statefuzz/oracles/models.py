"""Data models for bug findings."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class BugClass(Enum):
    BD = "BD"
    UD = "UD"
    EF = "EF"
    IO = "IO"
    RE = "RE"
    US = "US"
    SE = "SE"
    TO = "TO"
    UE = "UE"

    @property
    def title(self) -> str:
        return _TITLES[self]


_TITLES = {
    BugClass.BD: "Block dependency",
    BugClass.UD: "Unprotected delegatecall",
    BugClass.EF: "Ether frozen",
    BugClass.IO: "Integer overflow",
    BugClass.RE: "Reentrancy",
    BugClass.US: "Unprotected selfdestruct",
    BugClass.SE: "Strict ether equality",
    BugClass.TO: "Transaction origin use",
    BugClass.UE: "Unhandled exception",
}


@dataclass
class Finding:
    """One bug observation, located by instruction offset and source line."""

    bug_class: BugClass
    pc: int
    line: int | None = None
    function: str | None = None
    tx_index: int | None = None
    evidence: dict[str, Any] = field(default_factory=dict)
    witness: dict[str, Any] | None = None

    @property
    def key(self) -> tuple[str, int]:
        return (self.bug_class.value, self.pc)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "bugClass": self.bug_class.value,
            "title": self.bug_class.title,
            "pc": self.pc,
            "line": self.line,
            "function": self.function,
            "txIndex": self.tx_index,
            "evidence": self.evidence,
        }
        if self.witness is not None:
            data["witness"] = self.witness
        return data
