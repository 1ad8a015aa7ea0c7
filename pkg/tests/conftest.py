"""Pytest configuration and shared fixtures."""

from collections.abc import Callable, Generator
from pathlib import Path
from typing import Any

import pytest

from statefuzz.contracts.loader import ContractCorpus
from statefuzz.corpus.execution import ExecutionSettings, SeedExecutor
from statefuzz.corpus.seedfile import SeedFile
from statefuzz.depgraph.models import SequenceTemplate
from statefuzz.frontend.compiler import compile_source
from statefuzz.frontend.models import ContractPackage
from statefuzz.vm.codec import AccountSet, InputCodec

# Two nested guards: an exact payment, then an argument threshold.
VAULT_SOURCE = """
contract Vault {
    uint256 pokes;

    payable fn poke(a: uint256, b: uint256) {
        if (msg.value == 88 finney) {
            if (a > 100) {
                pokes = b;
            }
        }
    }
}
"""


@pytest.fixture(scope="session")
def corpus() -> ContractCorpus:
    """Return the bundled contract corpus."""
    return ContractCorpus()


@pytest.fixture(scope="session")
def crowdsale(corpus: ContractCorpus) -> ContractPackage:
    """Return the compiled Crowdsale example."""
    return corpus.load("crowdsale")


@pytest.fixture(scope="session")
def guess_number(corpus: ContractCorpus) -> ContractPackage:
    """Return the compiled guess-number example."""
    return corpus.load("guess_number")


@pytest.fixture(scope="session")
def vault() -> ContractPackage:
    """Return a small contract with one doubly nested branch."""
    return compile_source(VAULT_SOURCE, "vault.clite")


@pytest.fixture
def accounts() -> AccountSet:
    """Return the default owner/user/attacker account set."""
    return AccountSet()


@pytest.fixture
def make_executor() -> Callable[..., SeedExecutor]:
    """Return a factory for executors with default settings unless overridden."""

    def factory(package: ContractPackage, **settings: Any) -> SeedExecutor:
        return SeedExecutor(package, ExecutionSettings(**settings))

    return factory


@pytest.fixture
def report_path(tmp_path: Path) -> Path:
    """Return a not-yet-existing report location inside a nested directory."""
    return tmp_path / "out" / "report.json"


@pytest.fixture
def temp_project(tmp_path: Path) -> Generator[Path, None, None]:
    """Create a temporary project directory with a [tool.statefuzz] table."""
    project_dir = tmp_path / "test_project"
    project_dir.mkdir()

    pyproject = project_dir / "pyproject.toml"
    pyproject.write_text(
        """
[project]
name = "test-project"
version = "0.1.0"

[tool.statefuzz]
energy-budget = 1234
rng_seed = 9
mask = false
"""
    )

    yield project_dir


@pytest.fixture
def ue_witness(corpus: ContractCorpus, tmp_path: Path) -> Path:
    """Write a seed file whose send to the owner is forced to fail."""
    package = corpus.load("ue_vulnerable")
    accounts = AccountSet()
    codec = InputCodec(package, accounts)
    inputs = [
        codec.encode("constructor", accounts.owner),
        codec.encode("pay", accounts.address_of("user"), 10**18, [accounts.owner]),
    ]
    seed_file = SeedFile(
        package_hash=package.package_hash,
        template=SequenceTemplate(("constructor", "pay")),
        inputs=[(tx.function, tx.raw_bytes) for tx in inputs],
        outcomes=[True],
    )
    path = tmp_path / "witness.json"
    seed_file.write(path)
    return path
