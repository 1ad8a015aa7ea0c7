"""Instrumented interpreter for the contract bytecode subset.

One handler method per opcode, dispatched through a table built at
construction. Every stack entry carries its value, its taint tags and the
index of the comparison event that produced it (if any), which is what the
branch-distance and oracle layers read back from the trace.
"""

import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

from statefuzz.bytecode.cfg import BranchId
from statefuzz.bytecode.opcodes import Instruction, Op, is_dup, is_push, is_swap
from statefuzz.frontend.models import ContractPackage, FunctionAbi
from statefuzz.vm.codec import AccountSet
from statefuzz.vm.models import (
    CONTRACT_ADDRESS,
    ETHER,
    STIPEND_GAS,
    WORD_MASK,
    WORD_MODULUS,
    BlockEnv,
    BranchEvent,
    CallEvent,
    CmpEvent,
    ExecutionTrace,
    SequenceError,
    Step,
    StorageEvent,
    TxInput,
    UnknownFunctionError,
    WorldState,
    WrapEvent,
)
from statefuzz.vm.outcomes import CallOutcomes, NeverFail
from statefuzz.vm.taint import NO_TAINT, Tags, TaintSource, TaintTag

logger = logging.getLogger(__name__)

STEP_LIMIT = 10_000
STACK_LIMIT = 1024
MAX_CALL_DEPTH = 2
DEFAULT_INITIAL_BALANCE = 1000 * ETHER

_Entry = tuple[int, Tags, int | None]
"""Stack entry: (value, taint tags, producing comparison event index)."""


class _Halt(Exception):
    def __init__(self, reason: str, reverted: bool) -> None:
        self.reason = reason
        self.reverted = reverted
        super().__init__(reason)


@dataclass
class _Frame:
    fn: FunctionAbi
    sender: int
    value: int
    args: tuple[int, ...]
    origin: int
    depth: int = 1
    pc: int = 0
    steps: int = 0
    stack: list[_Entry] = field(default_factory=list)
    locals: dict[int, _Entry] = field(default_factory=dict)


class Interpreter:
    """Executes transactions of one package against a WorldState.

    An interpreter is not shared between threads; create one per worker.
    """

    def __init__(
        self,
        package: ContractPackage,
        accounts: AccountSet | None = None,
        env: BlockEnv | None = None,
        outcomes: CallOutcomes | None = None,
        record_steps: bool = False,
        initial_balance: int = DEFAULT_INITIAL_BALANCE,
    ) -> None:
        self.package = package
        self.accounts = accounts or AccountSet()
        self.env = env or BlockEnv()
        self.outcomes = outcomes or NeverFail()
        self.record_steps = record_steps
        self.initial_balance = initial_balance
        self._cfg = package.cfg
        self._code_size = len(package.bytecode)
        self._handlers = self._build_handlers()
        self._trace: ExecutionTrace | None = None
        self._state = WorldState()
        self._step = 0
        self._env = self.env

    def fresh_state(self) -> WorldState:
        return WorldState(balances={addr: self.initial_balance for addr in self.accounts.addresses})

    # transactions

    def execute(self, tx: TxInput, state: WorldState) -> ExecutionTrace:
        """Run one transaction, mutating `state`. Reverts restore `state`.

        Raises:
            UnknownFunctionError: If the function is not in the ABI.
            SequenceError: If fresh state is entered through a non-constructor.
        """
        fn = self.package.function(tx.function)
        if fn is None:
            raise UnknownFunctionError(tx.function)
        if state.tx_count == 0 and not fn.is_constructor:
            raise SequenceError(
                f"first transaction on fresh state must be the constructor, got {tx.function!r}"
            )

        env = self.env.for_transaction(state.tx_count)
        trace = ExecutionTrace(
            function=tx.function,
            sender=tx.sender,
            value=tx.value,
            args=tx.args,
            env=env,
            attacker=self.accounts.attacker,
        )
        snapshot = state.copy()
        rejected = self._precheck(fn, tx, state)
        if rejected is not None:
            trace.reverted = True
            trace.halt_reason = rejected
        else:
            if tx.value:
                state.balances[tx.sender] = state.balances.get(tx.sender, 0) - tx.value
                state.contract_balance += tx.value
            if fn.is_constructor:
                state.deployed = True
            self._trace, self._state = trace, state
            frame = _Frame(fn=fn, sender=tx.sender, value=tx.value, args=tx.args, origin=tx.sender)
            reverted, reason = self._run(frame, env)
            trace.reverted, trace.halt_reason = reverted, reason
            self._trace = None

        if trace.reverted:
            state.restore(snapshot)
        state.tx_count += 1
        self._settle_call_checks(trace)
        return trace

    def _precheck(self, fn: FunctionAbi, tx: TxInput, state: WorldState) -> str | None:
        if state.destroyed:
            return "destroyed"
        if fn.is_constructor and state.tx_count > 0:
            return "revert" if state.deployed else "not deployed"
        if not fn.is_constructor and not state.deployed:
            return "not deployed"
        if tx.value and not fn.payable:
            return "non-payable"
        if tx.value > state.balances.get(tx.sender, 0):
            return "insufficient balance"
        if len(tx.args) != len(fn.params):
            return "invalid opcode"
        return None

    def _settle_call_checks(self, trace: ExecutionTrace) -> None:
        for call in trace.call_events:
            if call.kind != "CALL":
                continue
            tag = TaintTag(TaintSource.CALLRESULT, call.pc)
            call.result_checked = any(
                event.step > call.step and tag in event.tags for event in trace.branch_events
            )

    # frame execution

    def _run(self, frame: _Frame, env: BlockEnv) -> tuple[bool, str]:
        self._env = env
        frame.pc = frame.fn.entry_offset
        trace = self._current_trace()
        try:
            while True:
                if frame.steps >= STEP_LIMIT:
                    raise _Halt("step limit", True)
                ins = self._cfg.instruction_at(frame.pc)
                if ins is None:
                    if frame.pc >= self._code_size:
                        return False, "stop"
                    raise _Halt("invalid jump", True)
                self._step = trace.step_count
                trace.step_count += 1
                frame.steps += 1
                if self.record_steps:
                    top = frame.stack[-1][0] if frame.stack else None
                    trace.steps.append(Step(ins.pc, ins.name, top))
                handler = self._handlers.get(ins.opcode)
                if handler is None:
                    raise _Halt("invalid opcode", True)
                next_pc = handler(frame, ins)
                frame.pc = ins.next_pc if next_pc is None else next_pc
        except _Halt as halt:
            return halt.reverted, halt.reason

    def _current_trace(self) -> ExecutionTrace:
        assert self._trace is not None
        return self._trace

    # stack helpers

    def _pop(self, frame: _Frame) -> _Entry:
        if not frame.stack:
            raise _Halt("stack underflow", True)
        return frame.stack.pop()

    def _push(self, frame: _Frame, value: int, tags: Tags = NO_TAINT, prov: int | None = None) -> None:
        if len(frame.stack) >= STACK_LIMIT:
            raise _Halt("stack overflow", True)
        frame.stack.append((value & WORD_MASK, tags, prov))

    def _build_handlers(self) -> dict[int, Callable[[_Frame, Instruction], int | None]]:
        handlers: dict[int, Callable[[_Frame, Instruction], int | None]] = {
            Op.STOP: self._op_stop,
            Op.ADD: self._op_arith,
            Op.SUB: self._op_arith,
            Op.MUL: self._op_arith,
            Op.LT: self._op_compare,
            Op.GT: self._op_compare,
            Op.EQ: self._op_compare,
            Op.ISZERO: self._op_iszero,
            Op.AND: self._op_bitwise,
            Op.OR: self._op_bitwise,
            Op.NOT: self._op_not,
            Op.ADDRESS: self._op_address,
            Op.BALANCE: self._op_balance,
            Op.ORIGIN: self._op_env,
            Op.CALLER: self._op_env,
            Op.CALLVALUE: self._op_env,
            Op.TIMESTAMP: self._op_env,
            Op.NUMBER: self._op_env,
            Op.ARG: self._op_arg,
            Op.POP: self._op_pop,
            Op.LLOAD: self._op_lload,
            Op.LSTORE: self._op_lstore,
            Op.SLOAD: self._op_sload,
            Op.SSTORE: self._op_sstore,
            Op.MAPLOAD: self._op_mapload,
            Op.MAPSTORE: self._op_mapstore,
            Op.JUMP: self._op_jump,
            Op.JUMPI: self._op_jumpi,
            Op.JUMPDEST: self._op_jumpdest,
            Op.CALL: self._op_call,
            Op.DELEGATECALL: self._op_delegatecall,
            Op.REVERT: self._op_revert,
            Op.SELFDESTRUCT: self._op_selfdestruct,
        }
        for opcode in range(0x100):
            if is_push(opcode):
                handlers[opcode] = self._op_push
            elif is_dup(opcode):
                handlers[opcode] = self._op_dup
            elif is_swap(opcode):
                handlers[opcode] = self._op_swap
        return handlers

    # handlers: halting and stack

    def _op_stop(self, frame: _Frame, ins: Instruction) -> int | None:
        raise _Halt("stop", False)

    def _op_revert(self, frame: _Frame, ins: Instruction) -> int | None:
        raise _Halt("revert", True)

    def _op_jumpdest(self, frame: _Frame, ins: Instruction) -> int | None:
        return None

    def _op_push(self, frame: _Frame, ins: Instruction) -> int | None:
        self._push(frame, ins.operand or 0)
        return None

    def _op_pop(self, frame: _Frame, ins: Instruction) -> int | None:
        self._pop(frame)
        return None

    def _op_dup(self, frame: _Frame, ins: Instruction) -> int | None:
        depth = ins.opcode - 0x80 + 1
        if len(frame.stack) < depth:
            raise _Halt("stack underflow", True)
        value, tags, prov = frame.stack[-depth]
        self._push(frame, value, tags, prov)
        return None

    def _op_swap(self, frame: _Frame, ins: Instruction) -> int | None:
        depth = ins.opcode - 0x90 + 1
        if len(frame.stack) < depth + 1:
            raise _Halt("stack underflow", True)
        frame.stack[-1], frame.stack[-1 - depth] = frame.stack[-1 - depth], frame.stack[-1]
        return None

    # handlers: arithmetic, comparison, logic

    def _op_arith(self, frame: _Frame, ins: Instruction) -> int | None:
        b, b_tags, _ = self._pop(frame)
        a, a_tags, _ = self._pop(frame)
        if ins.opcode == Op.ADD:
            exact = a + b
        elif ins.opcode == Op.SUB:
            exact = a - b
        else:
            exact = a * b
        result = exact % WORD_MODULUS
        wrapped = exact != result
        tags = a_tags | b_tags
        if wrapped:
            tags = tags | {TaintTag(TaintSource.OVERFLOW, ins.pc)}
        self._current_trace().wrap_events.append(
            WrapEvent(ins.pc, ins.name, a, b, result, wrapped, self._step)
        )
        self._push(frame, result, tags)
        return None

    def _op_compare(self, frame: _Frame, ins: Instruction) -> int | None:
        b, b_tags, _ = self._pop(frame)
        a, a_tags, _ = self._pop(frame)
        if ins.opcode == Op.LT:
            result = int(a < b)
        elif ins.opcode == Op.GT:
            result = int(a > b)
        else:
            result = int(a == b)
        self._push(frame, result, a_tags | b_tags, self._record_cmp(ins, a, b, result, a_tags | b_tags))
        return None

    def _op_iszero(self, frame: _Frame, ins: Instruction) -> int | None:
        x, tags, prov = self._pop(frame)
        result = int(x == 0)
        self._push(frame, result, tags, self._record_cmp(ins, x, 0, result, tags, inner=prov))
        return None

    def _record_cmp(
        self, ins: Instruction, a: int, b: int, result: int, tags: Tags, inner: int | None = None
    ) -> int:
        events = self._current_trace().cmp_events
        events.append(CmpEvent(ins.pc, ins.name, a, b, result, self._step, inner, tags))
        return len(events) - 1

    def _op_bitwise(self, frame: _Frame, ins: Instruction) -> int | None:
        b, b_tags, _ = self._pop(frame)
        a, a_tags, _ = self._pop(frame)
        result = a & b if ins.opcode == Op.AND else a | b
        self._push(frame, result, a_tags | b_tags)
        return None

    def _op_not(self, frame: _Frame, ins: Instruction) -> int | None:
        x, tags, _ = self._pop(frame)
        self._push(frame, ~x & WORD_MASK, tags)
        return None

    # handlers: environment

    def _op_address(self, frame: _Frame, ins: Instruction) -> int | None:
        self._push(frame, CONTRACT_ADDRESS)
        return None

    def _op_balance(self, frame: _Frame, ins: Instruction) -> int | None:
        address, tags, _ = self._pop(frame)
        if address == CONTRACT_ADDRESS:
            amount = self._state.contract_balance
        else:
            amount = self._state.balances.get(address, 0)
        self._push(frame, amount, tags | {TaintTag(TaintSource.BALANCE, ins.pc)})
        return None

    def _op_env(self, frame: _Frame, ins: Instruction) -> int | None:
        if ins.opcode == Op.CALLER:
            self._push(frame, frame.sender, frozenset({TaintTag(TaintSource.CALLER, ins.pc)}))
        elif ins.opcode == Op.ORIGIN:
            self._push(frame, frame.origin, frozenset({TaintTag(TaintSource.ORIGIN, ins.pc)}))
        elif ins.opcode == Op.CALLVALUE:
            self._push(frame, frame.value)
        else:
            value = self._env.timestamp if ins.opcode == Op.TIMESTAMP else self._env.number
            self._push(frame, value, frozenset({TaintTag(TaintSource.BLOCKSTATE, ins.pc)}))
        return None

    def _op_arg(self, frame: _Frame, ins: Instruction) -> int | None:
        index = ins.operand or 0
        if index >= len(frame.args):
            raise _Halt("invalid opcode", True)
        self._push(frame, frame.args[index], frozenset({TaintTag(TaintSource.PARAM, ins.pc)}))
        return None

    # handlers: locals and storage

    def _op_lload(self, frame: _Frame, ins: Instruction) -> int | None:
        value, tags, prov = frame.locals.get(ins.operand or 0, (0, NO_TAINT, None))
        self._push(frame, value, tags, prov)
        return None

    def _op_lstore(self, frame: _Frame, ins: Instruction) -> int | None:
        frame.locals[ins.operand or 0] = self._pop(frame)
        return None

    def _op_sload(self, frame: _Frame, ins: Instruction) -> int | None:
        slot, _, _ = self._pop(frame)
        value = self._state.storage.get(slot, 0)
        tags = self._state.storage_taint.get((slot, None), NO_TAINT)
        self._storage_event(frame, ins, slot, "SLOAD", value, None, tags)
        self._push(frame, value, tags)
        return None

    def _op_sstore(self, frame: _Frame, ins: Instruction) -> int | None:
        slot, _, _ = self._pop(frame)
        value, tags, _ = self._pop(frame)
        self._state.storage[slot] = value
        self._state.storage_taint[(slot, None)] = tags
        self._storage_event(frame, ins, slot, "SSTORE", value, None, tags)
        return None

    def _op_mapload(self, frame: _Frame, ins: Instruction) -> int | None:
        slot, _, _ = self._pop(frame)
        key, key_tags, _ = self._pop(frame)
        value = self._state.mappings.get((slot, key), 0)
        tags = self._state.storage_taint.get((slot, key), NO_TAINT)
        self._storage_event(frame, ins, slot, "SLOAD", value, key, tags)
        self._push(frame, value, tags)
        return None

    def _op_mapstore(self, frame: _Frame, ins: Instruction) -> int | None:
        slot, _, _ = self._pop(frame)
        key, _, _ = self._pop(frame)
        value, tags, _ = self._pop(frame)
        self._state.mappings[(slot, key)] = value
        self._state.storage_taint[(slot, key)] = tags
        self._storage_event(frame, ins, slot, "SSTORE", value, key, tags)
        return None

    def _storage_event(
        self, frame: _Frame, ins: Instruction, slot: int, kind: str, value: int, key: int | None, tags: Tags
    ) -> None:
        self._current_trace().storage_events.append(
            StorageEvent(slot, kind, value, ins.pc, self._step, frame.depth, key, tags)
        )

    # handlers: control flow

    def _checked_target(self, dest: int) -> int:
        target = self._cfg.instruction_at(dest)
        if target is None or target.opcode != Op.JUMPDEST:
            raise _Halt("invalid jump", True)
        return dest

    def _op_jump(self, frame: _Frame, ins: Instruction) -> int | None:
        dest, _, _ = self._pop(frame)
        return self._checked_target(dest)

    def _op_jumpi(self, frame: _Frame, ins: Instruction) -> int | None:
        dest, _, _ = self._pop(frame)
        cond, tags, prov = self._pop(frame)
        taken = cond != 0
        if taken:
            self._checked_target(dest)
        successor = dest if taken else ins.next_pc
        branch: BranchId = (self._cfg.block_of(ins.pc), successor)
        self._current_trace().branch_events.append(
            BranchEvent(branch, ins.pc, taken, self._step, frame.depth, prov, tags)
        )
        return dest if taken else None

    # handlers: external interaction

    def _op_call(self, frame: _Frame, ins: Instruction) -> int | None:
        value, value_tags, _ = self._pop(frame)
        target, target_tags, _ = self._pop(frame)
        gas, _, _ = self._pop(frame)
        state = self._state
        event = CallEvent(
            kind="CALL",
            pc=ins.pc,
            target=target,
            value=value,
            step=self._step,
            depth=frame.depth,
            gas_above_2300=gas > STIPEND_GAS,
            target_tags=target_tags,
            value_tags=value_tags,
        )
        self._current_trace().call_events.append(event)

        succeeded = value <= state.contract_balance
        if succeeded and self.outcomes.should_fail():
            succeeded = False
            event.injected_failure = True
        if succeeded:
            reenter = (
                event.gas_above_2300
                and target == self.accounts.attacker
                and frame.depth < MAX_CALL_DEPTH
            )
            snapshot = state.copy() if reenter else None
            if target != CONTRACT_ADDRESS:
                state.contract_balance -= value
                state.balances[target] = state.balances.get(target, 0) + value
            if snapshot is not None:
                event.reentered = True
                if not self._reenter(frame, event.step):
                    # the callee reverted: the transfer and everything it did roll back
                    state.restore(snapshot)
                    event.callee_reverted = True
                    succeeded = False
        event.succeeded = succeeded
        self._push(frame, int(succeeded), frozenset({TaintTag(TaintSource.CALLRESULT, ins.pc)}))
        return None

    def _reenter(self, frame: _Frame, call_step: int) -> bool:
        """Invoke the calling function again from the attacker, one level deeper.

        Returns False when the nested frame reverted; the calls it made are
        then marked as not succeeded. The caller restores state.
        """
        nested = _Frame(
            fn=frame.fn,
            sender=self.accounts.attacker,
            value=0,
            args=frame.args,
            origin=frame.origin,
            depth=frame.depth + 1,
        )
        reverted, reason = self._run(nested, self._env)
        logger.debug(f"Re-entered {frame.fn.name} at depth {nested.depth}: {reason}")
        if reverted:
            for call in self._current_trace().call_events:
                if call.step > call_step and call.depth > frame.depth:
                    call.succeeded = False
        return not reverted

    def _op_delegatecall(self, frame: _Frame, ins: Instruction) -> int | None:
        target, target_tags, _ = self._pop(frame)
        self._current_trace().call_events.append(
            CallEvent(
                kind="DELEGATECALL",
                pc=ins.pc,
                target=target,
                value=0,
                step=self._step,
                depth=frame.depth,
                succeeded=True,
                target_tags=target_tags,
            )
        )
        self._push(frame, 1)
        return None

    def _op_selfdestruct(self, frame: _Frame, ins: Instruction) -> int | None:
        beneficiary, tags, _ = self._pop(frame)
        state = self._state
        amount = state.contract_balance
        self._current_trace().call_events.append(
            CallEvent(
                kind="SELFDESTRUCT",
                pc=ins.pc,
                target=beneficiary,
                value=amount,
                step=self._step,
                depth=frame.depth,
                succeeded=True,
                target_tags=tags,
            )
        )
        if beneficiary != CONTRACT_ADDRESS:
            state.balances[beneficiary] = state.balances.get(beneficiary, 0) + amount
            state.contract_balance = 0
        state.destroyed = True
        raise _Halt("selfdestruct", False)


def execute_sequence(
    package: ContractPackage,
    sequence: Iterable[TxInput],
    env: BlockEnv | None = None,
    state: WorldState | None = None,
    *,
    accounts: AccountSet | None = None,
    outcomes: CallOutcomes | None = None,
    record_steps: bool = False,
    initial_balance: int = DEFAULT_INITIAL_BALANCE,
) -> tuple[list[ExecutionTrace], WorldState]:
    """Execute transactions in order against persistent state.

    The given state is copied, never mutated. With no state, execution starts
    from a fresh deployment in which every account holds `initial_balance`.

    Returns:
        One trace per transaction, and the final state.
    """
    interpreter = Interpreter(
        package,
        accounts=accounts,
        env=env,
        outcomes=outcomes,
        record_steps=record_steps,
        initial_balance=initial_balance,
    )
    current = interpreter.fresh_state() if state is None else state.copy()
    traces = [interpreter.execute(tx, current) for tx in sequence]
    return traces, current


def coverage_of(traces: Iterable[ExecutionTrace]) -> set[BranchId]:
    """Branch transitions exercised by any of the traces."""
    covered: set[BranchId] = set()
    for trace in traces:
        covered |= trace.covered
    return covered
