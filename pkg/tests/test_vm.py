"""Tests for the input codec, the interpreter and trace rendering."""

import random

import pytest

from statefuzz.bytecode.opcodes import PUSH1, Op
from statefuzz.frontend import ContractPackage, FunctionAbi, compile_source
from statefuzz.vm import (
    ETHER,
    FINNEY,
    WORD_MODULUS,
    AccountSet,
    BlockEnv,
    InputCodec,
    Interpreter,
    NeverFail,
    RandomOutcomes,
    ScriptedOutcomes,
    SequenceError,
    TaintSource,
    TxInput,
    UnknownFunctionError,
    coverage_of,
    dump_traces,
    execute_sequence,
)
from statefuzz.vm.models import CONTRACT_ADDRESS

OWNER, USER, ATTACKER = 0x1000, 0x2000, 0x3000

CALC_SOURCE = """
contract Calc {
    uint256 r;

    fn add(a: uint256, b: uint256) { r = a + b; }
    fn sub(a: uint256, b: uint256) { r = a - b; }
    fn mul(a: uint256, b: uint256) { r = a * b; }
}
"""

EXACT = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
}


def raw_package(code: list[int]) -> ContractPackage:
    """A package whose only function is a constructor running `code`."""
    return ContractPackage(
        name="Raw",
        bytecode=bytes(code),
        functions=[FunctionAbi("constructor", (), False, 0, is_constructor=True)],
        state_vars=[],
    )


def deploy() -> TxInput:
    return TxInput("constructor", OWNER)


class TestAccountSet:
    """Tests for the synthetic account set."""

    def test_default_addresses(self, accounts):
        """Test the owner, user and attacker addresses."""
        assert accounts.addresses == (OWNER, USER, ATTACKER)
        assert accounts.owner == OWNER
        assert accounts.attacker == ATTACKER
        assert accounts.name_of(CONTRACT_ADDRESS) == "contract"

    def test_address_args_include_contract(self, accounts):
        """Test that address arguments cycle through accounts and the contract."""
        assert [accounts.address_arg_at(i) for i in range(5)] == [
            OWNER,
            USER,
            ATTACKER,
            CONTRACT_ADDRESS,
            OWNER,
        ]

    @pytest.mark.parametrize(
        "names,attacker",
        [((), "attacker"), (("owner", "user"), "attacker")],
    )
    def test_invalid_account_sets(self, names: tuple[str, ...], attacker: str) -> None:
        """Test that empty sets and unknown attackers are refused."""
        with pytest.raises(ValueError):
            AccountSet(names=names, attacker_name=attacker)


class TestInputCodec:
    """Tests for the fixed-width transaction encoding."""

    @pytest.mark.parametrize(
        "contract,function,width",
        [
            ("crowdsale", "invest", 65),
            ("crowdsale", "refund", 33),
            ("ue_vulnerable", "pay", 34),
            ("io_vulnerable", "transfer", 66),
        ],
    )
    def test_widths(self, corpus, accounts, contract: str, function: str, width: int) -> None:
        """Test sender, value and per-parameter widths."""
        codec = InputCodec(corpus.load(contract), accounts)
        assert codec.width(function) == width

    def test_encode_decodes_back(self, corpus, accounts):
        """Test that encoded inputs decode to the same transaction."""
        codec = InputCodec(corpus.load("io_vulnerable"), accounts)
        tx = codec.encode("transfer", USER, 0, [CONTRACT_ADDRESS, 12345])

        assert tx.sender == USER
        assert tx.args == (CONTRACT_ADDRESS, 12345)
        assert codec.decode("transfer", tx.raw_bytes) == tx

    def test_decode_is_total(self, crowdsale, accounts):
        """Test that short or long byte strings still decode."""
        codec = InputCodec(crowdsale, accounts)

        short = codec.decode("invest", b"\x05")
        long = codec.decode("invest", bytes(range(100)))

        assert short.sender == accounts.sender_at(5)
        assert short.value == 0 and short.args == (0,)
        assert len(long.raw_bytes) == 65

    def test_constructor_sender_is_owner(self, crowdsale, accounts):
        """Test that the deployer is the owner whatever the sender byte says."""
        codec = InputCodec(crowdsale, accounts)
        assert codec.decode("constructor", b"\x02" + bytes(32)).sender == OWNER

    def test_segment_bounds(self, crowdsale, accounts):
        """Test the layout of a sequence stream."""
        codec = InputCodec(crowdsale, accounts)
        assert codec.segment_bounds(["constructor", "invest", "refund"]) == [
            (0, 33),
            (33, 98),
            (98, 131),
        ]

    def test_argument_count(self, crowdsale, accounts):
        """Test that encode checks the argument count."""
        codec = InputCodec(crowdsale, accounts)
        with pytest.raises(ValueError):
            codec.encode("invest", USER, 0, [])

    def test_unknown_function(self, crowdsale, accounts):
        """Test that unknown functions raise UnknownFunctionError."""
        with pytest.raises(UnknownFunctionError):
            InputCodec(crowdsale, accounts).width("steal")


class TestBlockEnv:
    """Tests for per-transaction block context."""

    def test_advances_per_transaction(self):
        """Test that each transaction sees a later block."""
        env = BlockEnv().for_transaction(2)
        assert env.timestamp == 1_700_000_030
        assert env.number == 1_000_002


class TestExecuteSequence:
    """Tests for transaction execution against persistent state."""

    def test_crowdsale_invest(self, crowdsale):
        """Test that invest updates storage and the investor's mapping entry."""
        traces, state = execute_sequence(
            crowdsale, [deploy(), TxInput("invest", USER, 0, (5 * ETHER,))]
        )

        invested = crowdsale.state_var("invested").storage_slot
        invests = crowdsale.state_var("invests").storage_slot
        assert not any(t.reverted for t in traces)
        assert state.storage[invested] == 5 * ETHER
        assert state.mappings[(invests, USER)] == 5 * ETHER
        assert state.tx_count == 2

    def test_state_argument_is_not_mutated(self, crowdsale):
        """Test that a given state is copied before execution."""
        _, deployed = execute_sequence(crowdsale, [deploy()])
        before = deployed.storage_view()

        execute_sequence(crowdsale, [TxInput("invest", USER, 0, (7,))], state=deployed)

        assert deployed.storage_view() == before

    def test_first_tx_must_deploy(self, crowdsale):
        """Test that fresh state must be entered through the constructor."""
        with pytest.raises(SequenceError):
            execute_sequence(crowdsale, [TxInput("refund", USER)])

    def test_unknown_function(self, crowdsale):
        """Test that calls to missing functions raise UnknownFunctionError."""
        with pytest.raises(UnknownFunctionError):
            execute_sequence(crowdsale, [deploy(), TxInput("steal", ATTACKER)])

    @pytest.mark.parametrize(
        "tx,reason",
        [
            (TxInput("constructor", OWNER), "revert"),
            (TxInput("invest", USER, 1, (1,)), "non-payable"),
            (TxInput("invest", USER, 0, ()), "invalid opcode"),
        ],
    )
    def test_prechecks(self, crowdsale, tx: TxInput, reason: str) -> None:
        """Test transactions rejected before any code runs."""
        traces, _ = execute_sequence(crowdsale, [deploy(), tx])

        assert traces[1].reverted
        assert traces[1].halt_reason == reason
        assert traces[1].step_count == 0

    def test_insufficient_balance(self, guess_number):
        """Test that senders cannot pay more than they hold."""
        traces, _ = execute_sequence(
            guess_number,
            [deploy(), TxInput("guess", USER, 2 * ETHER, (55,))],
            initial_balance=ETHER,
        )
        assert traces[1].halt_reason == "insufficient balance"

    def test_revert_restores_state(self):
        """Test that a failing require undoes earlier writes of the transaction."""
        package = compile_source(
            "contract Undo { uint256 x; payable fn f() { x = 5; require(x == 0); } }"
        )
        traces, state = execute_sequence(package, [deploy(), TxInput("f", USER, ETHER)])

        assert traces[1].reverted
        assert traces[1].halt_reason == "revert"
        assert state.storage.get(0, 0) == 0
        assert state.contract_balance == 0
        assert state.balances[USER] == 1000 * ETHER

    def test_destroyed_contract_rejects_calls(self, corpus):
        """Test that nothing runs after selfdestruct."""
        traces, state = execute_sequence(
            corpus.load("us_vulnerable"),
            [deploy(), TxInput("kill", ATTACKER), TxInput("kill", USER)],
        )

        assert state.destroyed
        assert traces[1].halt_reason == "selfdestruct"
        assert traces[2].halt_reason == "destroyed"

    @pytest.mark.parametrize(
        "code,reason",
        [
            ([Op.JUMPDEST, PUSH1, 0x00, Op.JUMP], "step limit"),
            ([Op.JUMPDEST, PUSH1, 0x02, Op.JUMP], "invalid jump"),
            ([Op.JUMPDEST, Op.ADD], "stack underflow"),
            ([Op.JUMPDEST] + [PUSH1, 0x00] * 1025, "stack overflow"),
            ([Op.JUMPDEST, 0x0C], "invalid opcode"),
        ],
    )
    def test_traps(self, code: list[int], reason: str) -> None:
        """Test that runtime traps revert with their reason."""
        traces, state = execute_sequence(raw_package(code), [deploy()])

        assert traces[0].reverted
        assert traces[0].halt_reason == reason
        assert not state.deployed

    def test_running_off_the_end_stops(self):
        """Test that falling off the end of code is a normal stop."""
        traces, _ = execute_sequence(raw_package([Op.JUMPDEST, PUSH1, 0x01, Op.POP]), [deploy()])
        assert not traces[0].reverted
        assert traces[0].halt_reason == "stop"


class TestBranchEvents:
    """Tests for branch and comparison instrumentation."""

    def test_guess_number_coverage(self, guess_number):
        """Test that the right payment and number take all three true arms."""
        traces, _ = execute_sequence(
            guess_number, [deploy(), TxInput("guess", USER, 88 * FINNEY, (55,))]
        )

        events = traces[1].branch_events
        assert len(events) == 3
        assert all(not e.taken for e in events)
        assert coverage_of(traces) == {e.branch_id for e in events}

    def test_comparison_feeds_branch(self, guess_number):
        """Test that each branch points back at the comparison deciding it."""
        traces, _ = execute_sequence(
            guess_number, [deploy(), TxInput("guess", USER, 87 * FINNEY, (55,))]
        )

        (branch,) = traces[1].branch_events
        cmp = traces[1].cmp_events[branch.cond_provenance]
        assert cmp.op == "ISZERO"
        inner = traces[1].cmp_events[cmp.inner]
        assert (inner.op, inner.a, inner.b) == ("EQ", 87 * FINNEY, 88 * FINNEY)

    def test_block_state_taint(self, corpus):
        """Test that timestamp comparisons taint the branch."""
        traces, _ = execute_sequence(corpus.load("bd_vulnerable"), [deploy(), TxInput("play", USER)])

        (branch,) = traces[1].branch_events
        assert TaintSource.BLOCKSTATE in {tag.source for tag in branch.tags}


class TestArithmetic:
    """Tests for modular arithmetic and wrap detection."""

    def test_wraps_match_exact_arithmetic(self):
        """Test stored results and wrap flags over many operand pairs."""
        package = compile_source(CALC_SOURCE)
        interpreter = Interpreter(package)
        state = interpreter.fresh_state()
        interpreter.execute(deploy(), state)
        rng = random.Random(1234)
        edges = [0, 1, 2, WORD_MODULUS - 1, WORD_MODULUS - 2, 1 << 128, 1 << 255]

        for _ in range(10_000):
            a = rng.choice(edges) if rng.random() < 0.3 else rng.getrandbits(rng.randint(1, 256))
            b = rng.choice(edges) if rng.random() < 0.3 else rng.getrandbits(rng.randint(1, 256))
            op = rng.choice(sorted(EXACT))
            trace = interpreter.execute(TxInput(op, USER, 0, (a, b)), state)

            exact = EXACT[op](a, b)
            (wrap,) = trace.wrap_events
            assert state.storage[0] == exact % WORD_MODULUS
            assert wrap.wrapped == (exact != exact % WORD_MODULUS)


class TestExternalCalls:
    """Tests for CALL outcomes and re-entry."""

    def test_reentry_from_attacker(self, corpus):
        """Test that a call with gas to the attacker re-enters the caller once."""
        traces, state = execute_sequence(
            corpus.load("re_vulnerable"),
            [
                TxInput("constructor", OWNER, 5 * ETHER),
                TxInput("deposit", ATTACKER, ETHER),
                TxInput("withdraw", ATTACKER),
            ],
        )

        outer, nested = traces[2].call_events
        assert outer.reentered and outer.depth == 1
        assert nested.depth == 2 and not nested.reentered
        assert outer.gas_above_2300
        assert state.contract_balance == 4 * ETHER
        assert state.balances[ATTACKER] == 1001 * ETHER

        data = traces[2].to_dict()
        assert [c["depth"] for c in data["callEvents"]] == [1, 2]
        assert data["callEvents"][0]["reentered"] is True
        assert data["callEvents"][0]["calleeReverted"] is False
        assert data["sender"] == hex(ATTACKER)

    def test_send_does_not_reenter(self, corpus):
        """Test that stipend-limited sends never re-enter."""
        traces, _ = execute_sequence(
            corpus.load("ue_vulnerable"), [deploy(), TxInput("pay", ATTACKER, ETHER, (ATTACKER,))]
        )

        (call,) = traces[1].call_events
        assert call.succeeded
        assert not call.gas_above_2300
        assert not call.reentered

    def test_injected_failure(self, corpus):
        """Test that scripted outcomes fail a call that could have succeeded."""
        outcomes = ScriptedOutcomes([True])
        traces, state = execute_sequence(
            corpus.load("ue_vulnerable"),
            [deploy(), TxInput("pay", USER, ETHER, (OWNER,))],
            outcomes=outcomes,
        )

        (call,) = traces[1].call_events
        assert not call.succeeded
        assert call.injected_failure
        assert not call.result_checked
        assert state.contract_balance == ETHER
        assert outcomes.recorded == [True]

    def test_checked_result(self, corpus):
        """Test that a require on the send result marks it checked."""
        traces, _ = execute_sequence(
            corpus.load("ue_patched"), [deploy(), TxInput("pay", USER, ETHER, (OWNER,))]
        )

        (call,) = traces[1].call_events
        assert call.result_checked

    def test_natural_failure_draws_no_outcome(self, crowdsale):
        """Test that a send beyond the contract balance fails without consulting outcomes."""
        outcomes = ScriptedOutcomes([False])
        traces, _ = execute_sequence(
            crowdsale,
            [deploy(), TxInput("invest", USER, 0, (3,)), TxInput("refund", USER)],
            outcomes=outcomes,
        )

        (call,) = traces[2].call_events
        assert not call.succeeded
        assert not call.injected_failure
        assert outcomes.recorded == []

    def test_random_outcomes_are_seeded(self):
        """Test that equal seeds give equal decisions."""
        first = RandomOutcomes(random.Random(3), rate=0.5)
        second = RandomOutcomes(random.Random(3), rate=0.5)

        assert [first.should_fail() for _ in range(20)] == [second.should_fail() for _ in range(20)]
        assert len(first.recorded) == 20

    def test_never_fail(self):
        """Test the default outcome source."""
        outcomes = NeverFail()
        assert not outcomes.should_fail()
        assert outcomes.recorded == [False]


class TestDump:
    """Tests for the text trace dump."""

    def test_dump_format(self, crowdsale):
        """Test headers, event lines and footers of a dumped sequence."""
        traces, _ = execute_sequence(
            crowdsale,
            [deploy(), TxInput("invest", USER, 0, (3,)), TxInput("refund", USER)],
            record_steps=True,
        )
        lines = dump_traces(traces, crowdsale).splitlines()

        assert lines[0].startswith("tx constructor sender=0x1000")
        assert sum(line.startswith("tx ") for line in lines) == 3
        assert sum(line.startswith("end ok reason=stop") for line in lines) == 3
        assert any("CALL pc=" in line and "line=25" in line for line in lines)
        assert any(line.startswith("  step pc=") for line in lines)
