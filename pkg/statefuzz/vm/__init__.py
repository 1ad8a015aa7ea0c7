"""Instrumented bytecode interpreter and its trace model."""

from statefuzz.vm.codec import AccountSet, InputCodec
from statefuzz.vm.dump import dump_trace, dump_traces
from statefuzz.vm.interpreter import Interpreter, coverage_of, execute_sequence
from statefuzz.vm.models import (
    ETHER,
    FINNEY,
    WORD_MODULUS,
    BlockEnv,
    BranchEvent,
    CallEvent,
    CmpEvent,
    ExecutionTrace,
    SequenceError,
    StorageEvent,
    TxInput,
    UnknownFunctionError,
    WorldState,
    WrapEvent,
)
from statefuzz.vm.outcomes import CallOutcomes, NeverFail, RandomOutcomes, ScriptedOutcomes
from statefuzz.vm.taint import TaintSource, TaintTag

__all__ = [
    "ETHER",
    "FINNEY",
    "WORD_MODULUS",
    "AccountSet",
    "BlockEnv",
    "BranchEvent",
    "CallEvent",
    "CallOutcomes",
    "CmpEvent",
    "ExecutionTrace",
    "InputCodec",
    "Interpreter",
    "NeverFail",
    "RandomOutcomes",
    "ScriptedOutcomes",
    "SequenceError",
    "StorageEvent",
    "TaintSource",
    "TaintTag",
    "TxInput",
    "UnknownFunctionError",
    "WorldState",
    "WrapEvent",
    "coverage_of",
    "dump_trace",
    "dump_traces",
    "execute_sequence",
]
