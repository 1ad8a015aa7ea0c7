"""Tests for the bug oracles and the oracle suite."""

import random
from unittest.mock import MagicMock

import pytest

from statefuzz.frontend import compile_source
from statefuzz.oracles import (
    BugClass,
    Finding,
    OracleContext,
    OracleSuite,
    branch_chain,
    check_bd,
    check_ef,
    check_io,
    check_re,
    check_se,
    check_to,
    check_ud,
    check_ue,
    check_us,
    default_oracles,
)
from statefuzz.vm import ETHER, WORD_MODULUS, ScriptedOutcomes, TxInput, execute_sequence

OWNER, USER, ATTACKER = 0x1000, 0x2000, 0x3000

CALC_SOURCE = """
contract Calc {
    uint256 r;

    fn add(a: uint256, b: uint256) { r = a + b; }
    fn sub(a: uint256, b: uint256) { r = a - b; }
    fn mul(a: uint256, b: uint256) { r = a * b; }
}
"""

RESERVE_SOURCE = """
contract ReserveBank {
    mapping(address => uint256) credit;

    payable fn constructor() {
    }
    payable fn deposit() {
        credit[msg.sender] += msg.value;
    }
    fn withdraw() {
        if (credit[msg.sender] > 0) {
            require(call(msg.sender, credit[msg.sender]));
            require(balance(this) > 6);
            credit[msg.sender] = 0;
        }
    }
}
"""

EXACT = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
}


def run(package, *calls: TxInput, outcomes=None):
    """Deploy `package` and run `calls`, returning the traces after deployment."""
    traces, _ = execute_sequence(package, [TxInput("constructor", OWNER), *calls], outcomes=outcomes)
    return traces[1:]


def context_for(package) -> OracleContext:
    return OracleContext(package=package)


class TestTraceOracles:
    """Tests for each trace oracle on its vulnerable and patched fixture."""

    def test_reentrancy(self, corpus):
        """Test that a second transfer from inside the callback is reported."""
        package = corpus.load("re_vulnerable")
        traces, _ = execute_sequence(
            package,
            [
                TxInput("constructor", OWNER, 5 * ETHER),
                TxInput("deposit", ATTACKER, ETHER),
                TxInput("withdraw", ATTACKER),
            ],
        )

        (finding,) = check_re(traces[2], context_for(package))
        assert finding.bug_class == BugClass.RE
        assert finding.function == "withdraw"
        assert finding.evidence["reenteredValue"] == str(ETHER)

    def test_reentrancy_patched(self, corpus):
        """Test that clearing credit first leaves nothing to re-transfer."""
        traces, _ = execute_sequence(
            corpus.load("re_patched"),
            [
                TxInput("constructor", OWNER, 5 * ETHER),
                TxInput("deposit", ATTACKER, ETHER),
                TxInput("withdraw", ATTACKER),
            ],
        )
        assert check_re(traces[2]) == []

    def test_reentrancy_rolled_back_by_reserve_guard(self):
        """Test that a re-entered transfer undone by a reserve check is not reported."""
        package = compile_source(RESERVE_SOURCE)
        traces, state = execute_sequence(
            package,
            [
                TxInput("constructor", OWNER, 10),
                TxInput("deposit", ATTACKER, 5),
                TxInput("withdraw", ATTACKER),
            ],
        )

        withdraw = traces[2]
        assert withdraw.reverted
        assert [(c.depth, c.succeeded) for c in withdraw.call_events] == [(1, False), (2, False)]
        assert withdraw.call_events[0].callee_reverted
        assert state.contract_balance == 15
        assert check_re(withdraw, context_for(package)) == []

    def test_reentrancy_ignores_reverted_transactions(self, corpus):
        """Test that nothing is reported once the whole withdraw is rolled back."""
        package = corpus.load("re_vulnerable")
        traces, _ = execute_sequence(
            package,
            [
                TxInput("constructor", OWNER, 5 * ETHER),
                TxInput("deposit", ATTACKER, ETHER),
                TxInput("withdraw", ATTACKER),
            ],
        )
        withdraw = traces[2]
        withdraw.reverted = True

        assert check_re(withdraw, context_for(package)) == []

    def test_unhandled_exception(self, corpus):
        """Test that an injected failure of an unchecked send is reported."""
        package = corpus.load("ue_vulnerable")
        (trace,) = run(package, TxInput("pay", USER, ETHER, (OWNER,)), outcomes=ScriptedOutcomes([True]))

        (finding,) = check_ue(trace, context_for(package))
        assert finding.line == 4
        assert finding.evidence["injected"] is True

    def test_unhandled_exception_needs_a_failure(self, corpus):
        """Test that a successful unchecked send is not reported."""
        (trace,) = run(corpus.load("ue_vulnerable"), TxInput("pay", USER, ETHER, (OWNER,)))
        assert check_ue(trace) == []

    def test_unhandled_exception_patched(self, corpus):
        """Test that a required send is handled even when it fails."""
        (trace,) = run(
            corpus.load("ue_patched"), TxInput("pay", USER, ETHER, (OWNER,)), outcomes=ScriptedOutcomes([True])
        )
        assert check_ue(trace) == []

    @pytest.mark.parametrize("value", [0, 10 * ETHER])
    def test_strict_equality(self, corpus, value: int) -> None:
        """Test that an exact balance comparison is reported whichever way it goes."""
        package = corpus.load("se_vulnerable")
        (trace,) = run(package, TxInput("play", USER, value))

        findings = check_se(trace, context_for(package))

        assert len(findings) == 1
        assert findings[0].evidence["compare"] == "EQ"

    def test_strict_equality_ordering(self, corpus):
        """Test that threshold comparisons only count when ordering is included."""
        (trace,) = run(corpus.load("se_patched"), TxInput("play", USER, ETHER))

        assert check_se(trace) == []
        assert len(check_se(trace, OracleContext(se_include_ordering=True))) == 1

    def test_branch_chain_follows_provenance(self, corpus):
        """Test that the balance comparison feeds the guard's branch."""
        (trace,) = run(corpus.load("se_vulnerable"), TxInput("play", USER, 0))
        chains = [branch_chain(trace, branch) for branch in trace.branch_events]

        assert any(chain and chain[0].op == "EQ" for chain in chains)

    def test_unprotected_selfdestruct(self, corpus):
        """Test that only the attacker's selfdestruct is reported."""
        package = corpus.load("us_vulnerable")
        by_attacker, by_user = run(package, TxInput("kill", ATTACKER)), run(package, TxInput("kill", USER))

        assert [f.bug_class for f in check_us(by_attacker[0])] == [BugClass.US]
        assert check_us(by_user[0]) == []

    def test_selfdestruct_patched(self, corpus):
        """Test that an owner guard stops the attacker."""
        (trace,) = run(corpus.load("us_patched"), TxInput("kill", ATTACKER))
        assert trace.reverted
        assert check_us(trace) == []

    def test_tx_origin(self, corpus):
        """Test that an origin check guarding a storage write is reported."""
        (trace,) = run(corpus.load("to_vulnerable"), TxInput("setLimit", OWNER, 0, (5,)))

        (finding,) = check_to(trace)
        assert finding.evidence["guards"] == "SSTORE"

    @pytest.mark.parametrize(
        "name,sender",
        [("to_vulnerable", USER), ("to_patched", OWNER)],
    )
    def test_tx_origin_not_reported(self, corpus, name: str, sender: int) -> None:
        """Test a failed origin check and a caller check."""
        (trace,) = run(corpus.load(name), TxInput("setLimit", sender, 0, (5,)))
        assert check_to(trace) == []

    def test_block_dependency(self, corpus):
        """Test that a timestamp deciding a branch is reported."""
        (trace,) = run(corpus.load("bd_vulnerable"), TxInput("play", USER))

        findings = check_bd(trace)

        assert [f.evidence["sink"] for f in findings] == ["JUMPI"]

    def test_block_dependency_patched(self, corpus):
        """Test that storing the timestamp without branching on it is fine."""
        (trace,) = run(corpus.load("bd_patched"), TxInput("play", USER, 0, (7,)))
        assert check_bd(trace) == []

    def test_unprotected_delegatecall(self, corpus):
        """Test that a caller-chosen delegate without a sender guard is reported."""
        (trace,) = run(corpus.load("ud_vulnerable"), TxInput("forward", USER, 0, (ATTACKER,)))

        (finding,) = check_ud(trace)
        assert finding.evidence["target"] == hex(ATTACKER)

    def test_delegatecall_patched(self, corpus):
        """Test that an owner guard protects the delegate."""
        (trace,) = run(corpus.load("ud_patched"), TxInput("forward", OWNER, 0, (ATTACKER,)))
        assert check_ud(trace) == []

    def test_integer_overflow(self, corpus):
        """Test that a stored underflow is reported at the subtraction."""
        package = corpus.load("io_vulnerable")
        (trace,) = run(package, TxInput("transfer", USER, 0, (OWNER, 5)))

        (finding,) = check_io(trace, context_for(package))
        assert finding.line == 9
        assert finding.evidence["op"] == "SUB"
        assert finding.evidence["sink"] == "SSTORE"

    def test_integer_overflow_patched(self, corpus):
        """Test that the balance cap reverts before anything wraps into storage."""
        (trace,) = run(corpus.load("io_patched"), TxInput("transfer", USER, 0, (OWNER, 5)))
        assert check_io(trace) == []

    def test_overflow_matches_wrapping(self):
        """Test that a stored result is reported exactly when it wrapped."""
        package = compile_source(CALC_SOURCE)
        rng = random.Random(5)
        interesting = [0, 1, 2, WORD_MODULUS - 1, WORD_MODULUS // 2, 1 << 128]
        for _ in range(300):
            function = rng.choice(sorted(EXACT))
            a = rng.choice(interesting + [rng.getrandbits(256)])
            b = rng.choice(interesting + [rng.getrandbits(256)])
            (trace,) = run(package, TxInput(function, USER, 0, (a, b)))

            exact = EXACT[function](a, b)
            assert bool(check_io(trace)) == (not 0 <= exact < WORD_MODULUS)


class TestEtherFrozen:
    """Tests for the campaign-level frozen Ether check."""

    def test_frozen_deposit(self, corpus):
        """Test that a payable contract without releases is reported at its deposit."""
        package = corpus.load("ef_vulnerable")

        (finding,) = check_ef(package)

        assert finding.bug_class == BugClass.EF
        assert finding.function == "deposit"
        assert finding.pc == package.function("deposit").entry_offset

    @pytest.mark.parametrize("name", ["ef_patched", "crowdsale", "stateless"])
    def test_not_frozen(self, corpus, name: str) -> None:
        """Test a reachable release and contracts that accept no Ether."""
        assert check_ef(corpus.load(name)) == []

    def test_observed_release(self, corpus):
        """Test that an Ether release seen at runtime clears the finding."""
        assert check_ef(corpus.load("ef_vulnerable"), released_pcs=[12]) == []


class TestOracleSuite:
    """Tests for finding collection and deduplication."""

    def test_deduplicates_by_class_and_pc(self, corpus):
        """Test that a repeated bug is recorded once with the first witness."""
        package = corpus.load("ue_vulnerable")
        suite = OracleSuite(package)
        traces, _ = execute_sequence(
            package,
            [TxInput("constructor", OWNER), TxInput("pay", USER, ETHER, (OWNER,))],
            outcomes=ScriptedOutcomes([True]),
        )
        witness = MagicMock(return_value={"seed": 1})

        first = suite.observe(traces, witness)
        again = suite.observe(traces, witness)

        assert [f.bug_class for f in first] == [BugClass.UE]
        assert again == []
        assert witness.call_count == 1
        assert first[0].witness == {"seed": 1}
        assert first[0].tx_index == 1

    def test_enabled_classes(self, corpus):
        """Test that disabled classes are never checked."""
        package = corpus.load("ue_vulnerable")
        suite = OracleSuite(package, enabled=[BugClass.RE])
        traces = run(package, TxInput("pay", USER, ETHER, (OWNER,)), outcomes=ScriptedOutcomes([True]))

        assert suite.observe(traces) == []
        assert [o.bug_class for o in suite.oracles] == [BugClass.RE]

    def test_failing_oracle_is_skipped(self, corpus):
        """Test that an oracle raising is logged and the rest still run."""
        package = corpus.load("us_vulnerable")
        broken = MagicMock()
        broken.bug_class = BugClass.BD
        broken.check.side_effect = RuntimeError("boom")
        suite = OracleSuite(package, oracles=[broken, *default_oracles()])

        findings = suite.check_trace(run(package, TxInput("kill", ATTACKER))[0])

        assert [f.bug_class for f in findings] == [BugClass.US]

    def test_finalize_adds_ether_frozen(self, corpus):
        """Test that finalize runs the frozen Ether check and sorts findings."""
        package = corpus.load("guess_number")
        suite = OracleSuite(package)

        findings = suite.finalize()

        assert [f.bug_class for f in findings] == [BugClass.EF]
        assert findings == suite.sorted_findings()

    def test_finding_to_dict(self):
        """Test the serialized finding."""
        finding = Finding(BugClass.TO, pc=12, line=3, function="setLimit", tx_index=1)
        data = finding.to_dict()

        assert data["bugClass"] == "TO"
        assert data["title"] == "Transaction origin use"
        assert "witness" not in data
        assert finding.key == ("TO", 12)
