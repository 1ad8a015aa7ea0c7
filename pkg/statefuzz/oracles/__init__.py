"""Trace-based bug oracles."""

from statefuzz.oracles.base import BaseOracle, OracleContext, branch_chain, provenance_chain
from statefuzz.oracles.block_dependency import BlockDependencyOracle, check_bd
from statefuzz.oracles.delegatecall import DelegatecallOracle, check_ud
from statefuzz.oracles.ether_frozen import check_ef, reachable_releases, releases_ether
from statefuzz.oracles.models import BugClass, Finding
from statefuzz.oracles.overflow import OverflowOracle, check_io
from statefuzz.oracles.reentrancy import ReentrancyOracle, check_re
from statefuzz.oracles.selfdestruct import SelfdestructOracle, check_us
from statefuzz.oracles.strict_equality import StrictEqualityOracle, check_se
from statefuzz.oracles.suite import OracleSuite, default_oracles
from statefuzz.oracles.tx_origin import TxOriginOracle, check_to
from statefuzz.oracles.unhandled_exception import UnhandledExceptionOracle, check_ue

__all__ = [
    "BaseOracle",
    "BlockDependencyOracle",
    "BugClass",
    "DelegatecallOracle",
    "Finding",
    "OracleContext",
    "OracleSuite",
    "OverflowOracle",
    "ReentrancyOracle",
    "SelfdestructOracle",
    "StrictEqualityOracle",
    "TxOriginOracle",
    "UnhandledExceptionOracle",
    "branch_chain",
    "check_bd",
    "check_ef",
    "check_io",
    "check_re",
    "check_se",
    "check_to",
    "check_ud",
    "check_ue",
    "check_us",
    "default_oracles",
    "provenance_chain",
    "reachable_releases",
    "releases_ether",
]
