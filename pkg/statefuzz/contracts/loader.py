"""Loader for the bundled contract corpus and its label manifest."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from statefuzz.frontend.compiler import compile_file
from statefuzz.frontend.models import ContractPackage
from statefuzz.oracles.models import BugClass

KINDS = ("example", "vulnerable", "patched")


@dataclass(frozen=True)
class ContractEntry:
    """One labeled contract of the corpus."""

    name: str
    file: str
    kind: str
    description: str = ""
    target: BugClass | None = None
    bugs: frozenset[BugClass] = field(default_factory=frozenset)

    @classmethod
    def from_dict(cls, name: str, data: dict[str, Any]) -> "ContractEntry":
        kind = data.get("kind", "example")
        if kind not in KINDS:
            raise ValueError(f"contract {name!r} has unknown kind {kind!r}")
        target = data.get("target")
        return cls(
            name=name,
            file=data["file"],
            kind=kind,
            description=data.get("description", ""),
            target=BugClass(target) if target else None,
            bugs=frozenset(BugClass(b) for b in data.get("bugs") or []),
        )


class ContractCorpus:
    """Loads and caches the bundled contracts."""

    def __init__(self, corpus_dir: Path | None = None):
        """Initialize the loader.

        Args:
            corpus_dir: Directory holding labels.yaml and the .clite files.
                        Defaults to this package's directory.
        """
        if corpus_dir is None:
            corpus_dir = Path(__file__).parent
        self.corpus_dir = corpus_dir
        self._entries: dict[str, ContractEntry] | None = None
        self._cache: dict[str, ContractPackage] = {}

    @property
    def entries(self) -> dict[str, ContractEntry]:
        """Manifest entries by name.

        Raises:
            ValueError: If labels.yaml is missing or malformed
        """
        if self._entries is None:
            labels_path = self.corpus_dir / "labels.yaml"
            try:
                with open(labels_path) as f:
                    data = yaml.safe_load(f)
            except (OSError, yaml.YAMLError) as e:
                raise ValueError(f"Cannot read contract labels {labels_path}: {e}") from e
            if not isinstance(data, dict) or not isinstance(data.get("contracts"), dict):
                raise ValueError(f"{labels_path} must map 'contracts' to a dictionary")
            try:
                self._entries = {
                    name: ContractEntry.from_dict(name, entry)
                    for name, entry in data["contracts"].items()
                }
            except (KeyError, TypeError) as e:
                raise ValueError(f"Malformed entry in {labels_path}: {e}") from e
        return self._entries

    def names(self, kind: str | None = None) -> list[str]:
        return sorted(name for name, e in self.entries.items() if kind is None or e.kind == kind)

    def entry(self, name: str) -> ContractEntry:
        if name not in self.entries:
            raise KeyError(
                f"No bundled contract named '{name}'. Available: {', '.join(self.names())}"
            )
        return self.entries[name]

    def path(self, name: str) -> Path:
        return self.corpus_dir / self.entry(name).file

    def load(self, name: str) -> ContractPackage:
        """Compile a bundled contract.

        Raises:
            KeyError: If no contract has that name
            CompileError: If the source does not compile
        """
        if name not in self._cache:
            self._cache[name] = compile_file(self.path(name))
        return self._cache[name]

    def fixtures(self, target: BugClass) -> dict[str, ContractEntry]:
        """The vulnerable and patched fixtures for one bug class, keyed by kind."""
        return {e.kind: e for e in self.entries.values() if e.target == target}

    def clear_cache(self) -> None:
        self._cache.clear()
