"""CLite frontend: source to ContractPackage."""

from statefuzz.frontend.compiler import compile_contract, compile_file, compile_source, load_package
from statefuzz.frontend.models import (
    AccessFact,
    AccessKind,
    CompileError,
    ContractPackage,
    Diagnostic,
    DiagnosticKind,
    FunctionAbi,
    PackageFormatError,
    StateVarDecl,
)
from statefuzz.frontend.parser import parse

__all__ = [
    "AccessFact",
    "AccessKind",
    "CompileError",
    "ContractPackage",
    "Diagnostic",
    "DiagnosticKind",
    "FunctionAbi",
    "PackageFormatError",
    "StateVarDecl",
    "compile_contract",
    "compile_file",
    "compile_source",
    "load_package",
    "parse",
]
