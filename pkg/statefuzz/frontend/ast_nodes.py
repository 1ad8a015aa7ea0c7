"""Syntax tree for CLite contracts."""

from dataclasses import dataclass, field
from enum import Enum


class TypeName(Enum):
    UINT256 = "uint256"
    ADDRESS = "address"
    BOOL = "bool"
    MAPPING = "mapping(address=>uint256)"


@dataclass
class Node:
    line: int
    column: int


# Expressions


@dataclass
class Expr(Node):
    pass


@dataclass
class NumberLit(Expr):
    value: int


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class ThisRef(Expr):
    pass


@dataclass
class NameRef(Expr):
    name: str


@dataclass
class IndexRef(Expr):
    name: str
    key: Expr


@dataclass
class MemberRef(Expr):
    """`msg.sender`, `msg.value`, `msg.origin`, `block.timestamp`, `block.number`."""

    base: str
    member: str


@dataclass
class AddressCast(Expr):
    operand: Expr


@dataclass
class Call(Expr):
    """Builtin call: send, call, dcall, selfdestruct, require, balance."""

    name: str
    args: list[Expr] = field(default_factory=list)


@dataclass
class BinaryOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class NotOp(Expr):
    operand: Expr


# Statements


@dataclass
class Stmt(Node):
    pass


@dataclass
class Target(Node):
    name: str
    key: Expr | None = None


@dataclass
class Assign(Stmt):
    target: Target
    value: Expr
    op: str = "="


@dataclass
class Let(Stmt):
    name: str
    value: Expr


@dataclass
class If(Stmt):
    condition: Expr
    then_body: list[Stmt]
    else_body: list[Stmt] = field(default_factory=list)


@dataclass
class CallStmt(Stmt):
    call: Call


@dataclass
class Revert(Stmt):
    pass


# Declarations


@dataclass
class Param(Node):
    name: str
    type: TypeName


@dataclass
class StateVar(Node):
    name: str
    type: TypeName


@dataclass
class Function(Node):
    name: str
    params: list[Param]
    body: list[Stmt]
    payable: bool = False

    @property
    def is_constructor(self) -> bool:
        return self.name == "constructor"


@dataclass
class Contract(Node):
    name: str
    state_vars: list[StateVar] = field(default_factory=list)
    functions: list[Function] = field(default_factory=list)
