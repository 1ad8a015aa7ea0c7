"""Tests for branch weighting and energy allocation."""

import random

import pytest

from statefuzz.corpus import Seed
from statefuzz.depgraph import SequenceTemplate
from statefuzz.energy import (
    DEFAULT_W2,
    BranchWeight,
    BranchWeightTable,
    allocate,
    allocate_shares,
    branch_weighted,
    prefix_inference,
    seed_priority,
    update_energy,
    vulnerable_locations,
)
from statefuzz.vm import FINNEY, TxInput

OWNER, USER = 0x1000, 0x2000


def guess_seed(executor, value: int, number: int) -> Seed:
    template = SequenceTemplate(("constructor", "guess"))
    inputs = [
        executor.codec.encode("constructor", OWNER),
        executor.codec.encode("guess", USER, value, [number]),
    ]
    return Seed(template, inputs)


class TestAllocateShares:
    """Tests for proportional integer allocation."""

    def test_worked_example(self):
        """Test weights 0 and 4 splitting a budget of 12."""
        allocation = allocate_shares({(0, 1): 1, (0, 2): 5}, 12)
        assert allocation == {(0, 1): 2, (0, 2): 10}

    def test_remainder_goes_to_leader(self):
        """Test that rounding leftovers go to the highest share."""
        allocation = allocate_shares({(0, 1): 1, (0, 2): 1, (0, 3): 1}, 10)

        assert sum(allocation.values()) == 10
        assert allocation[(0, 1)] == 4

    def test_every_branch_gets_one(self):
        """Test the floor of one unit when the budget covers every branch."""
        allocation = allocate_shares({(0, 1): 1, (0, 2): 1, (0, 3): 1000}, 3)
        assert allocation == {(0, 1): 1, (0, 2): 1, (0, 3): 1}

    def test_budget_below_branch_count(self):
        """Test that a tiny budget still sums exactly."""
        allocation = allocate_shares({(0, 1): 1, (0, 2): 1, (0, 3): 10}, 2)

        assert sum(allocation.values()) == 2
        assert allocation[(0, 3)] == 2

    @pytest.mark.parametrize("budget", [0, -5])
    def test_rejects_non_positive_budget(self, budget: int) -> None:
        """Test that the budget must be positive."""
        with pytest.raises(ValueError):
            allocate_shares({(0, 1): 1}, budget)

    def test_empty_shares(self):
        """Test that no branches means no allocation."""
        assert allocate_shares({}, 100) == {}

    def test_random_tables_sum_to_budget(self):
        """Test exact totals and the one-unit floor over random tables."""
        rng = random.Random(99)
        for _ in range(100):
            table = BranchWeightTable.for_branches([(i, i + 1) for i in range(rng.randint(1, 40))])
            for entry in table.entries.values():
                entry.w1 = rng.randint(0, 6)
                entry.w2 = rng.choice([0, DEFAULT_W2])
            budget = rng.randint(1, 50_000)

            allocate(table, budget)

            allocated = [entry.allocated for entry in table.entries.values()]
            assert sum(allocated) == budget
            if budget >= len(table):
                assert min(allocated) >= 1


class TestUpdateEnergy:
    """Tests for per-execution energy accounting."""

    @pytest.mark.parametrize(
        "new_coverage,energy,cap,expected",
        [
            (False, 5, 10, 4),
            (True, 5, 10, 6),
            (True, 10, 10, 10),
            (True, 12, 10, 11),
            (False, 0, 10, 0),
        ],
    )
    def test_charge_and_refund(self, new_coverage: bool, energy: int, cap: int, expected: int) -> None:
        """Test that refunds never lift energy past the cap."""
        assert update_energy(new_coverage, energy, cap) == expected


class TestBranchWeightTable:
    """Tests for the weight table."""

    def test_share_and_weight(self):
        """Test derived share and weight."""
        entry = BranchWeight((0, 1), nested_score=2, w1=2, w2=4)
        assert entry.weight == 6
        assert entry.share == 7

    def test_merge_max(self):
        """Test that merging keeps the larger weights and the allocation."""
        table = BranchWeightTable.for_branches([(0, 1)])
        table.get((0, 1)).allocated = 9
        other = BranchWeightTable({(0, 1): BranchWeight((0, 1), 3, 3, 0), (5, 6): BranchWeight((5, 6), 1, 1, 4)})

        table.merge_max(other)

        assert table.get((0, 1)).w1 == 3
        assert table.allocation_of((0, 1)) == 9
        assert table.weight_of((5, 6)) == 5
        assert table.weight_of((7, 8)) == 0

    def test_to_dict(self):
        """Test the serialized table lists branches in order."""
        table = BranchWeightTable.for_branches([(4, 5), (0, 1)])
        data = table.to_dict()

        assert [b["branchId"] for b in data["branches"]] == [[0, 1], [4, 5]]


class TestWeighting:
    """Tests for pre-fuzz branch weighting."""

    def test_vulnerable_locations(self, crowdsale):
        """Test that both sends are vulnerable locations."""
        calls = {loc.pc for loc in vulnerable_locations(crowdsale) if loc.kind == "CALL"}
        assert sorted(crowdsale.line_of(pc) for pc in calls) == [25, 31]

    def test_prefix_inference_requires_block_start(self, guess_number):
        """Test that prefixes must end at a block start."""
        not_a_start = guess_number.function("guess").entry_offset + 1
        with pytest.raises(KeyError):
            prefix_inference(guess_number, not_a_start)

    def test_nested_weights(self, guess_number, make_executor):
        """Test w1 of 1, 2 and 3 on the taken path, each reaching the balance update."""
        executor = make_executor(guess_number)
        seed = guess_seed(executor, 88 * FINNEY, 55)

        table = branch_weighted(seed, vulnerable_locations(guess_number), executor)

        covered = sorted(seed.covered_branches)
        assert [table.get(b).w1 for b in covered] == [1, 2, 3]
        assert all(table.get(b).w2 == DEFAULT_W2 for b in covered)
        assert seed.executed

    def test_unreached_branches_stay_unweighted(self, guess_number, make_executor):
        """Test that branches off the executed path keep zero weight."""
        executor = make_executor(guess_number)
        seed = guess_seed(executor, 0, 0)

        table = branch_weighted(seed, vulnerable_locations(guess_number), executor)

        weighted = [b for b, entry in table.entries.items() if entry.w1]
        assert weighted == sorted(seed.covered_branches)
        assert len(weighted) == 1

    def test_seed_priority(self):
        """Test ordering by best covered weight with admission order on ties."""
        table = BranchWeightTable({(0, 1): BranchWeight((0, 1), w1=3), (0, 2): BranchWeight((0, 2), w1=1)})
        seeds = []
        for index, covered in enumerate([{(0, 2)}, {(0, 1)}, set(), {(0, 1)}]):
            seed = Seed(SequenceTemplate(("constructor",)), [TxInput("constructor", OWNER)])
            seed.covered_branches = covered
            seed.seed_id = index
            seeds.append(seed)

        ordered = seed_priority(reversed(seeds), table)

        assert [s.seed_id for s in ordered] == [1, 3, 0, 2]
