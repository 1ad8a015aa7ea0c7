"""CLite compilation pipeline: parse, check, generate, package."""

import logging
from pathlib import Path

from statefuzz.frontend import ast_nodes as ast
from statefuzz.frontend.codegen import CodeGenerator
from statefuzz.frontend.models import (
    CompileError,
    ContractPackage,
    FunctionAbi,
    PackageFormatError,
    StateVarDecl,
)
from statefuzz.frontend.parser import parse
from statefuzz.frontend.semantic import SemanticChecker, ensure_constructor

logger = logging.getLogger(__name__)


def compile_contract(contract: ast.Contract, origin: str = "<inline>") -> ContractPackage:
    """Check a parsed contract and lower it to a package.

    Raises:
        CompileError: If the contract fails semantic checks.
    """
    ensure_constructor(contract)
    checker = SemanticChecker(contract)
    diagnostics = checker.check()
    if diagnostics:
        raise CompileError(diagnostics, origin)

    generated = CodeGenerator(contract).generate()
    functions = [
        FunctionAbi(
            name=fn.name,
            params=tuple((p.name, p.type.value) for p in fn.params),
            payable=fn.payable,
            entry_offset=generated.entries[fn.name],
            is_constructor=fn.is_constructor,
        )
        for fn in contract.functions
    ]
    state_vars = [
        StateVarDecl(var.name, var.type.value, slot) for slot, var in enumerate(contract.state_vars)
    ]
    package = ContractPackage(
        name=contract.name,
        bytecode=generated.bytecode,
        functions=functions,
        state_vars=state_vars,
        access_facts=checker.access_facts(),
        source_map=generated.source_map,
    )
    logger.debug(
        f"Compiled {contract.name} from {origin}: {len(package.bytecode)} bytes, "
        f"{len(package.cfg.blocks)} blocks, {len(package.access_facts)} facts"
    )
    return package


def compile_source(text: str, origin: str = "<inline>") -> ContractPackage:
    """Compile CLite source text to a ContractPackage."""
    return compile_contract(parse(text, origin), origin)


def compile_file(path: Path) -> ContractPackage:
    """Compile a `.clite` file."""
    return compile_source(path.read_text(encoding="utf-8"), str(path))


def load_package(path: Path) -> ContractPackage:
    """Load a package from CLite source or from package JSON, by file suffix.

    Raises:
        CompileError: For CLite sources that fail to compile.
        PackageFormatError: For malformed package JSON.
    """
    if path.suffix == ".json":
        return ContractPackage.from_json(path.read_text(encoding="utf-8"))
    if path.suffix not in (".clite", ""):
        raise PackageFormatError(f"unsupported contract file type: {path.suffix}")
    return compile_file(path)
