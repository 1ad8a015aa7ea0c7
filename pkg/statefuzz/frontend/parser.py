"""CLite parser built on a lark LALR grammar."""

import logging
from functools import lru_cache
from pathlib import Path
from typing import Any

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken
from lark.tree import Meta

from statefuzz.frontend import ast_nodes as ast
from statefuzz.frontend.models import CompileError, Diagnostic, DiagnosticKind

logger = logging.getLogger(__name__)

GRAMMAR_PATH = Path(__file__).parent / "clite.lark"

UNITS = {
    "wei": 1,
    "gwei": 10**9,
    "finney": 10**15,
    "ether": 10**18,
}

_TOKEN_LABELS = {
    "NAME": "identifier",
    "NUMBER": "number",
    "$END": "end of input",
}


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(
        GRAMMAR_PATH.read_text(encoding="utf-8"),
        parser="lalr",
        propagate_positions=True,
    )


def _pos(meta: object) -> tuple[int, int]:
    return int(getattr(meta, "line", 0) or 0), int(getattr(meta, "column", 0) or 0)


@v_args(meta=True)
class AstBuilder(Transformer):
    """Turns the lark parse tree into `ast_nodes` objects."""

    # declarations

    def start(self, meta: Meta, children: list[Any]) -> Any:
        return children[0]

    def contract(self, meta: Meta, children: list[Any]) -> Any:
        name, *members = children
        contract = ast.Contract(*_pos(meta), name=str(name))
        for member in members:
            if isinstance(member, ast.StateVar):
                contract.state_vars.append(member)
            else:
                contract.functions.append(member)
        return contract

    def state_var(self, meta: Meta, children: list[Any]) -> Any:
        type_name, name = children
        return ast.StateVar(*_pos(meta), name=str(name), type=type_name)

    def uint_type(self, meta: Meta, children: list[Any]) -> Any:
        return ast.TypeName.UINT256

    def address_type(self, meta: Meta, children: list[Any]) -> Any:
        return ast.TypeName.ADDRESS

    def bool_type(self, meta: Meta, children: list[Any]) -> Any:
        return ast.TypeName.BOOL

    def mapping_type(self, meta: Meta, children: list[Any]) -> Any:
        return ast.TypeName.MAPPING

    def function(self, meta: Meta, children: list[Any]) -> Any:
        payable = isinstance(children[0], Token) and children[0].type == "PAYABLE"
        if payable:
            children = children[1:]
        name, params, body = children
        return ast.Function(*_pos(meta), name=str(name), params=params, body=body, payable=payable)

    def param_list(self, meta: Meta, children: list[Any]) -> Any:
        return list(children)

    def param(self, meta: Meta, children: list[Any]) -> Any:
        name, type_name = children
        return ast.Param(*_pos(meta), name=str(name), type=type_name)

    def block(self, meta: Meta, children: list[Any]) -> Any:
        return list(children)

    # statements

    def assign(self, meta: Meta, children: list[Any]) -> Any:
        target, value = children
        return ast.Assign(*_pos(meta), target=target, value=value, op="=")

    def add_assign(self, meta: Meta, children: list[Any]) -> Any:
        target, value = children
        return ast.Assign(*_pos(meta), target=target, value=value, op="+=")

    def sub_assign(self, meta: Meta, children: list[Any]) -> Any:
        target, value = children
        return ast.Assign(*_pos(meta), target=target, value=value, op="-=")

    def let_stmt(self, meta: Meta, children: list[Any]) -> Any:
        name, value = children
        return ast.Let(*_pos(meta), name=str(name), value=value)

    def if_stmt(self, meta: Meta, children: list[Any]) -> Any:
        condition, then_body, *rest = children
        else_body: list[ast.Stmt] = []
        if rest:
            tail = rest[0]
            else_body = tail if isinstance(tail, list) else [tail]
        return ast.If(*_pos(meta), condition=condition, then_body=then_body, else_body=else_body)

    def call_stmt(self, meta: Meta, children: list[Any]) -> Any:
        return ast.CallStmt(*_pos(meta), call=children[0])

    def revert_stmt(self, meta: Meta, children: list[Any]) -> Any:
        return ast.Revert(*_pos(meta))

    def name_target(self, meta: Meta, children: list[Any]) -> Any:
        return ast.Target(*_pos(meta), name=str(children[0]))

    def index_target(self, meta: Meta, children: list[Any]) -> Any:
        name, key = children
        return ast.Target(*_pos(meta), name=str(name), key=key)

    # expressions

    def _binary(self, op: str, meta: Meta, children: list[Any]) -> ast.BinaryOp:
        left, right = children
        return ast.BinaryOp(*_pos(meta), op=op, left=left, right=right)

    def or_op(self, meta: Meta, children: list[Any]) -> Any:
        return self._binary("||", meta, children)

    def and_op(self, meta: Meta, children: list[Any]) -> Any:
        return self._binary("&&", meta, children)

    def lt(self, meta: Meta, children: list[Any]) -> Any:
        return self._binary("<", meta, children)

    def gt(self, meta: Meta, children: list[Any]) -> Any:
        return self._binary(">", meta, children)

    def eq(self, meta: Meta, children: list[Any]) -> Any:
        return self._binary("==", meta, children)

    def add(self, meta: Meta, children: list[Any]) -> Any:
        return self._binary("+", meta, children)

    def sub(self, meta: Meta, children: list[Any]) -> Any:
        return self._binary("-", meta, children)

    def mul(self, meta: Meta, children: list[Any]) -> Any:
        return self._binary("*", meta, children)

    def not_op(self, meta: Meta, children: list[Any]) -> Any:
        return ast.NotOp(*_pos(meta), operand=children[0])

    def number(self, meta: Meta, children: list[Any]) -> Any:
        token = children[0]
        text = str(token)
        value = int(text, 16) if text.lower().startswith("0x") else int(text)
        if len(children) > 1:
            value *= children[1]
        return ast.NumberLit(*_pos(meta), value=value)

    def wei(self, meta: Meta, children: list[Any]) -> Any:
        return UNITS["wei"]

    def gwei(self, meta: Meta, children: list[Any]) -> Any:
        return UNITS["gwei"]

    def finney(self, meta: Meta, children: list[Any]) -> Any:
        return UNITS["finney"]

    def ether(self, meta: Meta, children: list[Any]) -> Any:
        return UNITS["ether"]

    def true_lit(self, meta: Meta, children: list[Any]) -> Any:
        return ast.BoolLit(*_pos(meta), value=True)

    def false_lit(self, meta: Meta, children: list[Any]) -> Any:
        return ast.BoolLit(*_pos(meta), value=False)

    def this_ref(self, meta: Meta, children: list[Any]) -> Any:
        return ast.ThisRef(*_pos(meta))

    def address_cast(self, meta: Meta, children: list[Any]) -> Any:
        return ast.AddressCast(*_pos(meta), operand=children[0])

    def name_ref(self, meta: Meta, children: list[Any]) -> Any:
        return ast.NameRef(*_pos(meta), name=str(children[0]))

    def index_ref(self, meta: Meta, children: list[Any]) -> Any:
        name, key = children
        return ast.IndexRef(*_pos(meta), name=str(name), key=key)

    def member_ref(self, meta: Meta, children: list[Any]) -> Any:
        base, member = children
        return ast.MemberRef(*_pos(meta), base=str(base), member=str(member))

    def call(self, meta: Meta, children: list[Any]) -> Any:
        name, args = children
        return ast.Call(*_pos(meta), name=str(name), args=args)

    def arg_list(self, meta: Meta, children: list[Any]) -> Any:
        return list(children)


def _describe_expected(expected: set[str]) -> str:
    labels = sorted(_TOKEN_LABELS.get(name, name.lower().strip('"')) for name in expected)
    if len(labels) > 6:
        labels = labels[:6] + ["..."]
    return ", ".join(labels)


def _diagnostic_from(error: UnexpectedInput, text: str) -> Diagnostic:
    line = int(getattr(error, "line", 0) or 0)
    column = int(getattr(error, "column", 0) or 0)
    if isinstance(error, UnexpectedCharacters):
        char = text[error.pos_in_stream] if error.pos_in_stream < len(text) else "?"
        return Diagnostic(line, column, DiagnosticKind.LEXICAL, f"unexpected character {char!r}")
    if not text.strip():
        return Diagnostic(max(line, 1), max(column, 1), DiagnosticKind.SYNTAX, "expected contract")
    if isinstance(error, UnexpectedEOF):
        return Diagnostic(
            line, column, DiagnosticKind.SYNTAX, "unexpected end of input"
        )
    if isinstance(error, UnexpectedToken):
        found = "end of input" if error.token.type == "$END" else repr(str(error.token))
        expected = _describe_expected(set(error.expected))
        return Diagnostic(
            line, column, DiagnosticKind.SYNTAX, f"unexpected {found}, expected one of: {expected}"
        )
    return Diagnostic(line, column, DiagnosticKind.SYNTAX, str(error).splitlines()[0])


def parse(text: str, origin: str = "<inline>") -> ast.Contract:
    """Parse CLite source into a contract AST.

    Args:
        text: CLite source.
        origin: File path or label used in diagnostics.

    Returns:
        The contract declaration.

    Raises:
        CompileError: On lexical or syntax errors, or duplicate declarations.
    """
    try:
        tree = _parser().parse(text)
    except UnexpectedInput as e:
        diagnostic = _diagnostic_from(e, text)
        logger.debug(f"Parse failed for {origin}: {diagnostic}")
        raise CompileError([diagnostic], origin) from None

    contract: ast.Contract = AstBuilder().transform(tree)
    duplicates = find_duplicates(contract)
    if duplicates:
        raise CompileError(duplicates, origin)
    return contract


def find_duplicates(contract: ast.Contract) -> list[Diagnostic]:
    """Report redeclared members and parameters."""
    diagnostics: list[Diagnostic] = []
    seen: dict[str, ast.Node] = {}
    for member in [*contract.state_vars, *contract.functions]:
        name = member.name  # type: ignore[attr-defined]
        if name in seen:
            first = seen[name]
            diagnostics.append(
                Diagnostic(
                    member.line,
                    member.column,
                    DiagnosticKind.DUPLICATE,
                    f"duplicate declaration of {name!r} (first declared at line {first.line})",
                )
            )
        else:
            seen[name] = member
    for fn in contract.functions:
        params: set[str] = set()
        for param in fn.params:
            if param.name in params:
                diagnostics.append(
                    Diagnostic(
                        param.line,
                        param.column,
                        DiagnosticKind.DUPLICATE,
                        f"duplicate parameter {param.name!r} in function {fn.name!r}",
                    )
                )
            params.add(param.name)
    return diagnostics
