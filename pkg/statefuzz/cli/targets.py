"""Resolution of command-line contract arguments."""

from pathlib import Path

from statefuzz.contracts.loader import ContractCorpus
from statefuzz.frontend.compiler import load_package
from statefuzz.frontend.models import ContractPackage


def resolve_target(target: str, corpus: ContractCorpus | None = None) -> ContractPackage:
    """Load a contract from a `.clite` or package JSON path, or by bundled name.

    Raises:
        KeyError: If the target is neither an existing file nor a bundled contract
        CompileError: If the source does not compile
        PackageFormatError: If a package document is malformed
    """
    path = Path(target)
    if path.is_file():
        return load_package(path)
    corpus = corpus or ContractCorpus()
    return corpus.load(target)
