"""Bundled CLite contracts: the motivating examples and a labeled oracle corpus."""

from statefuzz.contracts.loader import ContractCorpus, ContractEntry

__all__ = ["ContractCorpus", "ContractEntry"]
