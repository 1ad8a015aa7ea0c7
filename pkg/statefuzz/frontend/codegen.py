"""Bytecode generation for checked CLite contracts."""

from dataclasses import dataclass, field

from statefuzz.bytecode.opcodes import Op, immediate_width, push_op
from statefuzz.frontend import ast_nodes as ast

SEND_GAS = 2300
CALL_GAS = (1 << 24) - 1

_BINARY_OPS = {
    "+": Op.ADD,
    "-": Op.SUB,
    "*": Op.MUL,
    "<": Op.LT,
    ">": Op.GT,
    "==": Op.EQ,
}

_MEMBER_OPS = {
    ("msg", "sender"): Op.CALLER,
    ("msg", "origin"): Op.ORIGIN,
    ("msg", "value"): Op.CALLVALUE,
    ("block", "timestamp"): Op.TIMESTAMP,
    ("block", "number"): Op.NUMBER,
}


@dataclass
class _Emit:
    opcode: int
    operand: int | None
    line: int
    label: int | None = None  # PUSH2 of a label offset, resolved in the second pass


@dataclass
class _Mark:
    label: int


@dataclass
class GeneratedCode:
    bytecode: bytes
    entries: dict[str, int]
    source_map: dict[int, int] = field(default_factory=dict)


def _push_width(value: int) -> int:
    return max(1, (value.bit_length() + 7) // 8)


class CodeGenerator:
    """Lowers a contract AST to bytecode in two passes (emit, then resolve labels)."""

    def __init__(self, contract: ast.Contract) -> None:
        self.contract = contract
        self.slots = {var.name: slot for slot, var in enumerate(contract.state_vars)}
        self.mappings = {var.name for var in contract.state_vars if var.type == ast.TypeName.MAPPING}
        self._items: list[_Emit | _Mark] = []
        self._next_label = 0
        self._entry_labels: dict[str, int] = {}
        self._params: dict[str, int] = {}
        self._locals: dict[str, int] = {}

    def generate(self) -> GeneratedCode:
        for fn in self.contract.functions:
            self._function(fn)
        return self._assemble()

    # emission helpers

    def _label(self) -> int:
        self._next_label += 1
        return self._next_label

    def _emit(self, opcode: int, line: int, operand: int | None = None) -> None:
        self._items.append(_Emit(opcode, operand, line))

    def _push(self, value: int, line: int) -> None:
        self._emit(push_op(_push_width(value)), line, value)

    def _push_label(self, label: int, line: int) -> None:
        self._items.append(_Emit(push_op(2), None, line, label=label))

    def _mark(self, label: int, line: int) -> None:
        self._items.append(_Mark(label))
        self._emit(Op.JUMPDEST, line)

    def _assemble(self) -> GeneratedCode:
        offsets: dict[int, int] = {}
        pc = 0
        for item in self._items:
            if isinstance(item, _Mark):
                offsets[item.label] = pc
            else:
                pc += 1 + immediate_width(item.opcode)

        code = bytearray()
        source_map: dict[int, int] = {}
        for item in self._items:
            if isinstance(item, _Mark):
                continue
            operand = offsets[item.label] if item.label is not None else item.operand
            source_map[len(code)] = item.line
            code.append(item.opcode)
            width = immediate_width(item.opcode)
            if width:
                code.extend((operand or 0).to_bytes(width, "big"))

        entries = {name: offsets[label] for name, label in self._entry_labels.items()}
        return GeneratedCode(bytes(code), entries, source_map)

    # declarations and statements

    def _function(self, fn: ast.Function) -> None:
        entry = self._label()
        self._entry_labels[fn.name] = entry
        self._params = {param.name: index for index, param in enumerate(fn.params)}
        self._locals = {}
        self._mark(entry, fn.line)
        for stmt in fn.body:
            self._stmt(stmt)
        self._emit(Op.STOP, fn.line)

    def _stmt(self, stmt: ast.Stmt) -> None:
        line = stmt.line
        if isinstance(stmt, ast.Assign):
            self._assign(stmt)
        elif isinstance(stmt, ast.Let):
            index = len(self._locals)
            self._expr(stmt.value)
            self._locals[stmt.name] = index
            self._emit(Op.LSTORE, line, index)
        elif isinstance(stmt, ast.If):
            self._if(stmt)
        elif isinstance(stmt, ast.CallStmt):
            self._call_stmt(stmt.call)
        elif isinstance(stmt, ast.Revert):
            self._emit(Op.REVERT, line)

    def _assign(self, stmt: ast.Assign) -> None:
        target, line = stmt.target, stmt.line
        arith = {"+=": Op.ADD, "-=": Op.SUB}.get(stmt.op)

        if target.name in self._locals:
            index = self._locals[target.name]
            if arith is not None:
                self._emit(Op.LLOAD, line, index)
            self._expr(stmt.value)
            if arith is not None:
                self._emit(arith, line)
            self._emit(Op.LSTORE, line, index)
            return

        slot = self.slots[target.name]
        if target.name in self.mappings:
            assert target.key is not None
            if arith is not None:
                self._expr(target.key)
                self._push(slot, line)
                self._emit(Op.MAPLOAD, line)
            self._expr(stmt.value)
            if arith is not None:
                self._emit(arith, line)
            self._expr(target.key)
            self._push(slot, line)
            self._emit(Op.MAPSTORE, line)
            return

        if arith is not None:
            self._push(slot, line)
            self._emit(Op.SLOAD, line)
        self._expr(stmt.value)
        if arith is not None:
            self._emit(arith, line)
        self._push(slot, line)
        self._emit(Op.SSTORE, line)

    def _if(self, stmt: ast.If) -> None:
        end = self._label()
        if stmt.else_body:
            otherwise = self._label()
            self._jump_if(stmt.condition, otherwise, when=False)
            for inner in stmt.then_body:
                self._stmt(inner)
            self._push_label(end, stmt.line)
            self._emit(Op.JUMP, stmt.line)
            self._mark(otherwise, stmt.line)
            for inner in stmt.else_body:
                self._stmt(inner)
        else:
            self._jump_if(stmt.condition, end, when=False)
            for inner in stmt.then_body:
                self._stmt(inner)
        self._mark(end, stmt.line)

    def _call_stmt(self, call: ast.Call) -> None:
        line = call.line
        if call.name == "require":
            ok = self._label()
            self._jump_if(call.args[0], ok, when=True)
            self._emit(Op.REVERT, line)
            self._mark(ok, line)
        elif call.name == "selfdestruct":
            self._expr(call.args[0])
            self._emit(Op.SELFDESTRUCT, line)
        else:
            self._expr(call)
            self._emit(Op.POP, line)

    # conditions

    def _jump_if(self, expr: ast.Expr, label: int, when: bool) -> None:
        """Jump to `label` when `expr` evaluates to `when`; short-circuit operators
        become one JUMPI per operand."""
        line = expr.line
        if isinstance(expr, ast.NotOp):
            self._jump_if(expr.operand, label, not when)
            return
        if isinstance(expr, ast.BinaryOp) and expr.op in ("&&", "||"):
            jump_on_left = expr.op == "||"
            if when == jump_on_left:
                self._jump_if(expr.left, label, when)
                self._jump_if(expr.right, label, when)
            else:
                skip = self._label()
                self._jump_if(expr.left, skip, not when)
                self._jump_if(expr.right, label, when)
                self._mark(skip, line)
            return
        self._expr(expr)
        if not when:
            self._emit(Op.ISZERO, line)
        self._push_label(label, line)
        self._emit(Op.JUMPI, line)

    # expressions

    def _expr(self, expr: ast.Expr) -> None:
        line = expr.line
        if isinstance(expr, ast.NumberLit):
            self._push(expr.value, line)
        elif isinstance(expr, ast.BoolLit):
            self._push(int(expr.value), line)
        elif isinstance(expr, ast.ThisRef):
            self._emit(Op.ADDRESS, line)
        elif isinstance(expr, ast.NameRef):
            if expr.name in self._locals:
                self._emit(Op.LLOAD, line, self._locals[expr.name])
            elif expr.name in self._params:
                self._emit(Op.ARG, line, self._params[expr.name])
            else:
                self._push(self.slots[expr.name], line)
                self._emit(Op.SLOAD, line)
        elif isinstance(expr, ast.IndexRef):
            self._expr(expr.key)
            self._push(self.slots[expr.name], line)
            self._emit(Op.MAPLOAD, line)
        elif isinstance(expr, ast.MemberRef):
            self._emit(_MEMBER_OPS[(expr.base, expr.member)], line)
        elif isinstance(expr, ast.AddressCast):
            self._expr(expr.operand)
        elif isinstance(expr, ast.Call):
            self._call_expr(expr)
        elif isinstance(expr, ast.NotOp):
            self._expr(expr.operand)
            self._emit(Op.ISZERO, line)
        elif isinstance(expr, ast.BinaryOp) and expr.op in ("&&", "||"):
            false_label, end = self._label(), self._label()
            self._jump_if(expr, false_label, when=False)
            self._push(1, line)
            self._push_label(end, line)
            self._emit(Op.JUMP, line)
            self._mark(false_label, line)
            self._push(0, line)
            self._mark(end, line)
        elif isinstance(expr, ast.BinaryOp):
            self._expr(expr.left)
            self._expr(expr.right)
            self._emit(_BINARY_OPS[expr.op], line)
        else:
            raise TypeError(f"cannot generate code for {type(expr).__name__}")

    def _call_expr(self, call: ast.Call) -> None:
        line = call.line
        if call.name in ("send", "call"):
            self._push(SEND_GAS if call.name == "send" else CALL_GAS, line)
            self._expr(call.args[0])
            self._expr(call.args[1])
            self._emit(Op.CALL, line)
        elif call.name == "dcall":
            self._expr(call.args[0])
            self._emit(Op.DELEGATECALL, line)
        elif call.name == "balance":
            self._expr(call.args[0])
            self._emit(Op.BALANCE, line)
        else:
            raise TypeError(f"{call.name}(...) is not an expression")
