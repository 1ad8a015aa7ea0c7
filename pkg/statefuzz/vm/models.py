"""Data model for VM execution: words, environment, inputs, state and traces."""

from dataclasses import dataclass, field
from typing import Any

from statefuzz.bytecode.cfg import BranchId
from statefuzz.vm.taint import NO_TAINT, Tags

WORD_BITS = 256
WORD_MODULUS = 1 << WORD_BITS
WORD_MASK = WORD_MODULUS - 1

WEI = 1
GWEI = 10**9
FINNEY = 10**15
ETHER = 10**18

CONTRACT_ADDRESS = 0xC0FFEE
STIPEND_GAS = 2300


class UnknownFunctionError(Exception):
    """Raised when a transaction names a function missing from the ABI."""

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"unknown function {name!r}")


class SequenceError(Exception):
    """Raised when a sequence on fresh state does not start with the constructor."""


@dataclass(frozen=True)
class BlockEnv:
    """Block context of the first transaction; later transactions advance it."""

    timestamp: int = 1_700_000_000
    number: int = 1_000_000
    block_interval: int = 15

    def for_transaction(self, index: int) -> "BlockEnv":
        return BlockEnv(
            timestamp=self.timestamp + index * self.block_interval,
            number=self.number + index,
            block_interval=self.block_interval,
        )

    def to_dict(self) -> dict[str, int]:
        return {"timestamp": self.timestamp, "number": self.number}


@dataclass(frozen=True)
class TxInput:
    """One transaction: the called function, its sender, value and arguments."""

    function: str
    sender: int
    value: int = 0
    args: tuple[int, ...] = ()
    raw_bytes: bytes = b""

    def to_dict(self) -> dict[str, Any]:
        return {
            "function": self.function,
            "sender": hex(self.sender),
            "value": self.value,
            "args": list(self.args),
            "raw": self.raw_bytes.hex(),
        }


@dataclass
class WorldState:
    """Storage, balances and lifecycle of the contract under test."""

    storage: dict[int, int] = field(default_factory=dict)
    mappings: dict[tuple[int, int], int] = field(default_factory=dict)
    storage_taint: dict[tuple[int, int | None], Tags] = field(default_factory=dict)
    balances: dict[int, int] = field(default_factory=dict)
    contract_balance: int = 0
    tx_count: int = 0
    deployed: bool = False
    destroyed: bool = False

    def copy(self) -> "WorldState":
        return WorldState(
            storage=dict(self.storage),
            mappings=dict(self.mappings),
            storage_taint=dict(self.storage_taint),
            balances=dict(self.balances),
            contract_balance=self.contract_balance,
            tx_count=self.tx_count,
            deployed=self.deployed,
            destroyed=self.destroyed,
        )

    def restore(self, snapshot: "WorldState") -> None:
        """Overwrite this state in place with `snapshot`."""
        self.storage = dict(snapshot.storage)
        self.mappings = dict(snapshot.mappings)
        self.storage_taint = dict(snapshot.storage_taint)
        self.balances = dict(snapshot.balances)
        self.contract_balance = snapshot.contract_balance
        self.tx_count = snapshot.tx_count
        self.deployed = snapshot.deployed
        self.destroyed = snapshot.destroyed

    def storage_view(self) -> dict[str, int]:
        """Storage and mapping entries as a flat, comparable dict."""
        view = {f"slot:{slot}": value for slot, value in self.storage.items() if value}
        view.update(
            {f"map:{slot}:{key:#x}": value for (slot, key), value in self.mappings.items() if value}
        )
        return dict(sorted(view.items()))


@dataclass(frozen=True)
class Step:
    pc: int
    opcode: str
    stack_top: int | None


@dataclass(frozen=True)
class CmpEvent:
    """A comparison; `inner` links an ISZERO to the comparison it negates."""

    pc: int
    op: str
    a: int
    b: int
    result: int
    step: int
    inner: int | None = None
    tags: Tags = NO_TAINT


@dataclass(frozen=True)
class BranchEvent:
    branch_id: BranchId
    pc: int
    taken: bool
    step: int
    depth: int = 1
    cond_provenance: int | None = None
    tags: Tags = NO_TAINT


@dataclass(frozen=True)
class StorageEvent:
    slot: int
    kind: str
    value: int
    pc: int
    step: int
    depth: int = 1
    key: int | None = None
    tags: Tags = NO_TAINT


@dataclass
class CallEvent:
    """An external interaction. `succeeded` and `result_checked` are settled after the call."""

    kind: str
    pc: int
    target: int
    value: int
    step: int
    depth: int = 1
    gas_above_2300: bool = False
    succeeded: bool = False
    result_checked: bool = False
    reentered: bool = False
    callee_reverted: bool = False
    injected_failure: bool = False
    target_tags: Tags = NO_TAINT
    value_tags: Tags = NO_TAINT


@dataclass(frozen=True)
class WrapEvent:
    pc: int
    op: str
    a: int
    b: int
    result: int
    wrapped: bool
    step: int


@dataclass
class ExecutionTrace:
    """Everything observed while executing one transaction."""

    function: str
    sender: int
    value: int
    args: tuple[int, ...]
    env: BlockEnv
    attacker: int
    steps: list[Step] = field(default_factory=list)
    branch_events: list[BranchEvent] = field(default_factory=list)
    cmp_events: list[CmpEvent] = field(default_factory=list)
    storage_events: list[StorageEvent] = field(default_factory=list)
    call_events: list[CallEvent] = field(default_factory=list)
    wrap_events: list[WrapEvent] = field(default_factory=list)
    reverted: bool = False
    halt_reason: str = "stop"
    step_count: int = 0

    @property
    def covered(self) -> set[BranchId]:
        return {event.branch_id for event in self.branch_events}

    def to_dict(self) -> dict[str, Any]:
        return {
            "function": self.function,
            "sender": hex(self.sender),
            "value": self.value,
            "args": list(self.args),
            "block": self.env.to_dict(),
            "reverted": self.reverted,
            "haltReason": self.halt_reason,
            "stepCount": self.step_count,
            "steps": [
                {"pc": s.pc, "op": s.opcode, "top": s.stack_top} for s in self.steps
            ],
            "branchEvents": [
                {
                    "branchId": list(e.branch_id),
                    "pc": e.pc,
                    "taken": e.taken,
                    "step": e.step,
                    "depth": e.depth,
                    "condProvenance": e.cond_provenance,
                    "taint": sorted(str(t) for t in e.tags),
                }
                for e in self.branch_events
            ],
            "cmpEvents": [
                {"pc": e.pc, "op": e.op, "a": e.a, "b": e.b, "inner": e.inner}
                for e in self.cmp_events
            ],
            "storageEvents": [
                {"slot": e.slot, "kind": e.kind, "key": e.key, "value": e.value, "pc": e.pc}
                for e in self.storage_events
            ],
            "callEvents": [
                {
                    "kind": e.kind,
                    "pc": e.pc,
                    "target": hex(e.target),
                    "value": e.value,
                    "depth": e.depth,
                    "gasAbove2300": e.gas_above_2300,
                    "succeeded": e.succeeded,
                    "resultChecked": e.result_checked,
                    "reentered": e.reentered,
                    "calleeReverted": e.callee_reverted,
                }
                for e in self.call_events
            ],
            "wrapEvents": [
                {"pc": e.pc, "op": e.op, "wrapped": e.wrapped} for e in self.wrap_events
            ],
        }
