"""Whole-word taint tags carried alongside VM stack values."""

from dataclasses import dataclass
from enum import Enum


class TaintSource(Enum):
    BLOCKSTATE = "BLOCKSTATE"
    BALANCE = "BALANCE"
    ORIGIN = "ORIGIN"
    CALLRESULT = "CALLRESULT"
    CALLER = "CALLER"
    PARAM = "PARAM"
    OVERFLOW = "OVERFLOW"


@dataclass(frozen=True)
class TaintTag:
    """Where a tainted value came from: its source kind and the producing pc."""

    source: TaintSource
    origin_pc: int

    def __str__(self) -> str:
        return f"{self.source.value}@{self.origin_pc}"


Tags = frozenset[TaintTag]

NO_TAINT: Tags = frozenset()


def has_source(tags: Tags, source: TaintSource) -> bool:
    return any(tag.source == source for tag in tags)


def tags_of(tags: Tags, source: TaintSource) -> list[TaintTag]:
    return sorted((tag for tag in tags if tag.source == source), key=lambda t: t.origin_pc)
