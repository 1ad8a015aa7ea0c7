"""Name resolution, type checking and state-access facts for CLite."""

import logging
from dataclasses import dataclass, field

from statefuzz.frontend import ast_nodes as ast
from statefuzz.frontend.models import AccessFact, AccessKind, Diagnostic, DiagnosticKind

logger = logging.getLogger(__name__)

T = ast.TypeName

WORD_LIMIT = 1 << 256

MEMBERS: dict[tuple[str, str], ast.TypeName] = {
    ("msg", "sender"): T.ADDRESS,
    ("msg", "origin"): T.ADDRESS,
    ("msg", "value"): T.UINT256,
    ("block", "timestamp"): T.UINT256,
    ("block", "number"): T.UINT256,
}

# name -> (parameter types, result type or None for statement-only builtins)
BUILTINS: dict[str, tuple[tuple[ast.TypeName, ...], ast.TypeName | None]] = {
    "send": ((T.ADDRESS, T.UINT256), T.BOOL),
    "call": ((T.ADDRESS, T.UINT256), T.BOOL),
    "dcall": ((T.ADDRESS,), T.BOOL),
    "balance": ((T.ADDRESS,), T.UINT256),
    "require": ((T.BOOL,), None),
    "selfdestruct": ((T.ADDRESS,), None),
}

# Builtins whose value may be dropped when used as a statement.
EFFECTFUL = frozenset({"send", "call", "dcall", "require", "selfdestruct"})


@dataclass
class FunctionAccess:
    """State variables touched by one function."""

    reads: set[str] = field(default_factory=set)
    writes: set[str] = field(default_factory=set)
    branch_reads: set[str] = field(default_factory=set)


def ensure_constructor(contract: ast.Contract) -> None:
    """Give contracts without a constructor an empty one, placed first."""
    if not any(fn.is_constructor for fn in contract.functions):
        contract.functions.insert(
            0, ast.Function(contract.line, contract.column, name="constructor", params=[], body=[])
        )


class SemanticChecker:
    """Checks a contract AST and derives its access facts."""

    def __init__(self, contract: ast.Contract) -> None:
        self.contract = contract
        self.state_types = {var.name: var.type for var in contract.state_vars}
        self.diagnostics: list[Diagnostic] = []
        self.access: dict[str, FunctionAccess] = {}
        self._scope: dict[str, ast.TypeName] = {}
        self._current: FunctionAccess = FunctionAccess()
        self._in_condition = False

    def _error(self, node: ast.Node, message: str) -> None:
        self.diagnostics.append(Diagnostic(node.line, node.column, DiagnosticKind.SEMANTIC, message))

    def check(self) -> list[Diagnostic]:
        for fn in self.contract.functions:
            self._check_function(fn)
        return self.diagnostics

    def _check_function(self, fn: ast.Function) -> None:
        self._current = FunctionAccess()
        self.access[fn.name] = self._current
        self._scope = {}
        for param in fn.params:
            if param.type == T.MAPPING:
                self._error(param, f"parameter {param.name!r} cannot be a mapping")
            if param.name in self.state_types:
                self._error(param, f"parameter {param.name!r} shadows a state variable")
            self._scope[param.name] = param.type
        self._check_block(fn.body)

    def _check_block(self, body: list[ast.Stmt]) -> None:
        for stmt in body:
            self._check_stmt(stmt)

    def _check_stmt(self, stmt: ast.Stmt) -> None:
        if isinstance(stmt, ast.Assign):
            self._check_assign(stmt)
        elif isinstance(stmt, ast.Let):
            value_type = self._expr(stmt.value)
            if stmt.name in self._scope or stmt.name in self.state_types:
                self.diagnostics.append(
                    Diagnostic(
                        stmt.line,
                        stmt.column,
                        DiagnosticKind.DUPLICATE,
                        f"duplicate declaration of {stmt.name!r}",
                    )
                )
            elif value_type is not None:
                self._scope[stmt.name] = value_type
        elif isinstance(stmt, ast.If):
            self._condition(stmt.condition)
            self._check_block(stmt.then_body)
            self._check_block(stmt.else_body)
        elif isinstance(stmt, ast.CallStmt):
            call = stmt.call
            if call.name not in EFFECTFUL:
                self._error(call, f"result of {call.name}(...) is unused")
            if call.name == "require":
                self._check_args(call)
                if call.args:
                    self._condition(call.args[0])
            else:
                self._call(call, statement=True)
        elif isinstance(stmt, ast.Revert):
            pass

    def _check_assign(self, stmt: ast.Assign) -> None:
        target = stmt.target
        value_type = self._expr(stmt.value)
        if target.name in self.state_types:
            declared = self.state_types[target.name]
            self._current.writes.add(target.name)
            if stmt.op != "=":
                self._current.reads.add(target.name)
            if declared == T.MAPPING:
                if target.key is None:
                    self._error(target, f"mapping {target.name!r} must be indexed")
                    return
                self._expect(target.key, self._expr(target.key), T.ADDRESS)
                target_type = T.UINT256
            else:
                if target.key is not None:
                    self._error(target, f"{target.name!r} is not a mapping")
                    return
                target_type = declared
        elif target.name in self._scope:
            if target.key is not None:
                self._error(target, f"{target.name!r} is not a mapping")
                return
            target_type = self._scope[target.name]
        else:
            self._error(target, f"unresolved name {target.name!r}")
            return

        if stmt.op != "=" and target_type != T.UINT256:
            self._error(stmt, f"{stmt.op} requires uint256, {target.name!r} is {target_type.value}")
        self._expect(stmt.value, value_type, target_type)

    def _condition(self, expr: ast.Expr) -> None:
        outer = self._in_condition
        self._in_condition = True
        try:
            self._expect(expr, self._expr(expr), T.BOOL)
        finally:
            self._in_condition = outer

    def _expect(self, node: ast.Node, actual: ast.TypeName | None, wanted: ast.TypeName) -> None:
        if actual is not None and actual != wanted:
            self._error(node, f"type mismatch: expected {wanted.value}, found {actual.value}")

    def _read_state(self, name: str) -> None:
        self._current.reads.add(name)
        if self._in_condition:
            self._current.branch_reads.add(name)

    def _expr(self, expr: ast.Expr) -> ast.TypeName | None:
        """Type of `expr`, or None when an error was already reported."""
        if isinstance(expr, ast.NumberLit):
            if expr.value >= WORD_LIMIT:
                self._error(expr, "literal does not fit in uint256")
            return T.UINT256
        if isinstance(expr, ast.BoolLit):
            return T.BOOL
        if isinstance(expr, ast.ThisRef):
            return T.ADDRESS
        if isinstance(expr, ast.NameRef):
            if expr.name in self._scope:
                return self._scope[expr.name]
            if expr.name in self.state_types:
                self._read_state(expr.name)
                if self.state_types[expr.name] == T.MAPPING:
                    self._error(expr, f"mapping {expr.name!r} must be indexed")
                    return None
                return self.state_types[expr.name]
            self._error(expr, f"unresolved name {expr.name!r}")
            return None
        if isinstance(expr, ast.IndexRef):
            self._expect(expr.key, self._expr(expr.key), T.ADDRESS)
            if self.state_types.get(expr.name) != T.MAPPING:
                if expr.name in self.state_types or expr.name in self._scope:
                    self._error(expr, f"{expr.name!r} is not a mapping")
                else:
                    self._error(expr, f"unresolved name {expr.name!r}")
                return None
            self._read_state(expr.name)
            return T.UINT256
        if isinstance(expr, ast.MemberRef):
            member_type = MEMBERS.get((expr.base, expr.member))
            if member_type is None:
                self._error(expr, f"unknown member {expr.base}.{expr.member}")
            return member_type
        if isinstance(expr, ast.AddressCast):
            operand = self._expr(expr.operand)
            if operand not in (None, T.UINT256, T.ADDRESS):
                self._error(expr, f"cannot convert {operand.value} to address")
            return T.ADDRESS
        if isinstance(expr, ast.Call):
            return self._call(expr, statement=False)
        if isinstance(expr, ast.NotOp):
            self._expect(expr.operand, self._expr(expr.operand), T.BOOL)
            return T.BOOL
        if isinstance(expr, ast.BinaryOp):
            return self._binary(expr)
        self._error(expr, f"unsupported expression {type(expr).__name__}")
        return None

    def _binary(self, expr: ast.BinaryOp) -> ast.TypeName | None:
        left = self._expr(expr.left)
        right = self._expr(expr.right)
        if expr.op in ("+", "-", "*"):
            self._expect(expr.left, left, T.UINT256)
            self._expect(expr.right, right, T.UINT256)
            return T.UINT256
        if expr.op in ("<", ">"):
            self._expect(expr.left, left, T.UINT256)
            self._expect(expr.right, right, T.UINT256)
            return T.BOOL
        if expr.op == "==":
            if left is not None and right is not None and left != right:
                self._error(expr, f"cannot compare {left.value} with {right.value}")
            return T.BOOL
        self._expect(expr.left, left, T.BOOL)
        self._expect(expr.right, right, T.BOOL)
        return T.BOOL

    def _check_args(self, call: ast.Call) -> tuple[ast.TypeName, ...] | None:
        signature = BUILTINS.get(call.name)
        if signature is None:
            self._error(call, f"unknown function {call.name!r}")
            return None
        params, _ = signature
        if len(call.args) != len(params):
            self._error(call, f"{call.name} takes {len(params)} argument(s), got {len(call.args)}")
            return None
        if call.name == "require":
            return params
        for arg, wanted in zip(call.args, params):
            self._expect(arg, self._expr(arg), wanted)
        return params

    def _call(self, call: ast.Call, statement: bool) -> ast.TypeName | None:
        if call.name == "require" and not statement:
            self._error(call, "require(...) cannot be used as a value")
            return None
        if self._check_args(call) is None:
            return None
        result = BUILTINS[call.name][1]
        if result is None and not statement:
            self._error(call, f"{call.name}(...) cannot be used as a value")
        return result

    def access_facts(self) -> list[AccessFact]:
        """Facts in declaration order: per function, per state variable, per kind."""
        branch_read_anywhere = set().union(*(a.branch_reads for a in self.access.values()))
        facts: list[AccessFact] = []
        for fn in self.contract.functions:
            access = self.access.get(fn.name)
            if access is None:
                continue
            for var in self.contract.state_vars:
                name = var.name
                if name in access.reads:
                    facts.append(AccessFact(fn.name, name, AccessKind.READ))
                if name in access.writes:
                    facts.append(AccessFact(fn.name, name, AccessKind.WRITE))
                if name in access.branch_reads:
                    facts.append(AccessFact(fn.name, name, AccessKind.READ_IN_BRANCH))
                if (
                    name in access.reads
                    and name in access.writes
                    and name in branch_read_anywhere
                ):
                    facts.append(AccessFact(fn.name, name, AccessKind.RAW_SELF))
        return facts
