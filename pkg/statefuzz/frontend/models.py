"""Compiled contract package and its JSON form."""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any

from statefuzz.bytecode.cfg import ControlFlowGraph

PACKAGE_SCHEMA = "statefuzz.package/1"

PARAM_TYPES = ("uint256", "address", "bool")
STATE_TYPES = ("uint256", "address", "bool", "mapping(address=>uint256)")


class DiagnosticKind(Enum):
    LEXICAL = "lexical"
    SYNTAX = "syntax"
    DUPLICATE = "duplicate"
    SEMANTIC = "semantic"


@dataclass
class Diagnostic:
    """A located compiler message."""

    line: int
    column: int
    kind: DiagnosticKind
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.kind.value} error: {self.message}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "line": self.line,
            "column": self.column,
            "kind": self.kind.value,
            "message": self.message,
        }


class CompileError(Exception):
    """Raised when CLite source fails to parse or check."""

    def __init__(self, diagnostics: list[Diagnostic], origin: str = "<inline>") -> None:
        self.diagnostics = diagnostics
        self.origin = origin
        summary = "; ".join(str(d) for d in diagnostics[:3])
        super().__init__(f"{origin}: {summary}")


class PackageFormatError(Exception):
    """Raised when a package JSON document is malformed."""


class AccessKind(Enum):
    READ = "Read"
    WRITE = "Write"
    READ_IN_BRANCH = "ReadInBranchCondition"
    RAW_SELF = "RawSelfDependency"


@dataclass(frozen=True)
class AccessFact:
    function: str
    state_var: str
    kind: AccessKind

    def to_dict(self) -> dict[str, str]:
        return {"function": self.function, "stateVar": self.state_var, "kind": self.kind.value}


@dataclass(frozen=True)
class FunctionAbi:
    name: str
    params: tuple[tuple[str, str], ...]
    payable: bool
    entry_offset: int
    is_constructor: bool = False

    @property
    def param_types(self) -> list[str]:
        return [ptype for _, ptype in self.params]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "params": [{"name": n, "type": t} for n, t in self.params],
            "payable": self.payable,
            "entryOffset": self.entry_offset,
            "isConstructor": self.is_constructor,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FunctionAbi":
        return cls(
            name=data["name"],
            params=tuple((p["name"], p["type"]) for p in data.get("params", [])),
            payable=bool(data.get("payable", False)),
            entry_offset=int(data["entryOffset"]),
            is_constructor=bool(data.get("isConstructor", False)),
        )


@dataclass(frozen=True)
class StateVarDecl:
    name: str
    type: str
    storage_slot: int

    @property
    def is_mapping(self) -> bool:
        return self.type.startswith("mapping")

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "type": self.type, "storageSlot": self.storage_slot}


@dataclass
class ContractPackage:
    """A compiled contract: bytecode, ABI, storage layout and access facts."""

    name: str
    bytecode: bytes
    functions: list[FunctionAbi]
    state_vars: list[StateVarDecl]
    access_facts: list[AccessFact] = field(default_factory=list)
    source_map: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._validate()

    def _validate(self) -> None:
        constructors = [f for f in self.functions if f.is_constructor]
        if len(constructors) != 1:
            raise PackageFormatError(
                f"package {self.name!r} must declare exactly one constructor, found {len(constructors)}"
            )
        names = [f.name for f in self.functions]
        if len(set(names)) != len(names):
            raise PackageFormatError(f"package {self.name!r} has duplicate function names")
        slots = [v.storage_slot for v in self.state_vars]
        if len(set(slots)) != len(slots):
            raise PackageFormatError(f"package {self.name!r} reuses a storage slot")
        var_names = {v.name for v in self.state_vars}
        for fact in self.access_facts:
            if fact.function not in names or fact.state_var not in var_names:
                raise PackageFormatError(f"access fact references unknown name: {fact}")
        for fn in self.functions:
            if fn.entry_offset not in self.cfg.blocks:
                raise PackageFormatError(
                    f"entry of {fn.name!r} at {fn.entry_offset} is not a basic block start"
                )

    @cached_property
    def cfg(self) -> ControlFlowGraph:
        return ControlFlowGraph(self.bytecode, [f.entry_offset for f in self.functions])

    @property
    def constructor(self) -> FunctionAbi:
        return next(f for f in self.functions if f.is_constructor)

    def function(self, name: str) -> FunctionAbi | None:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None

    def state_var(self, name: str) -> StateVarDecl | None:
        for var in self.state_vars:
            if var.name == name:
                return var
        return None

    def function_at(self, pc: int) -> FunctionAbi | None:
        """The function whose code contains `pc` (functions are laid out contiguously)."""
        owner = None
        for fn in sorted(self.functions, key=lambda f: f.entry_offset):
            if fn.entry_offset <= pc:
                owner = fn
        return owner

    def line_of(self, pc: int) -> int | None:
        return self.source_map.get(pc)

    def facts_of(self, kind: AccessKind) -> list[AccessFact]:
        return [fact for fact in self.access_facts if fact.kind == kind]

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": PACKAGE_SCHEMA,
            "name": self.name,
            "bytecode": self.bytecode.hex(),
            "functions": [f.to_dict() for f in self.functions],
            "stateVars": [v.to_dict() for v in self.state_vars],
            "accessFacts": [fact.to_dict() for fact in self.access_facts],
            "sourceMap": {str(pc): line for pc, line in sorted(self.source_map.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @property
    def package_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ContractPackage":
        if data.get("schema") != PACKAGE_SCHEMA:
            raise PackageFormatError(
                f"unsupported package schema {data.get('schema')!r}, expected {PACKAGE_SCHEMA!r}"
            )
        try:
            return cls(
                name=data["name"],
                bytecode=bytes.fromhex(data["bytecode"]),
                functions=[FunctionAbi.from_dict(f) for f in data["functions"]],
                state_vars=[
                    StateVarDecl(v["name"], v["type"], int(v["storageSlot"]))
                    for v in data["stateVars"]
                ],
                access_facts=[
                    AccessFact(f["function"], f["stateVar"], AccessKind(f["kind"]))
                    for f in data.get("accessFacts", [])
                ],
                source_map={int(pc): int(line) for pc, line in data.get("sourceMap", {}).items()},
            )
        except (KeyError, ValueError, TypeError) as e:
            raise PackageFormatError(f"malformed package document: {e}") from e

    @classmethod
    def from_json(cls, text: str) -> "ContractPackage":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise PackageFormatError(f"package is not valid JSON: {e}") from e
        return cls.from_dict(data)
