"""End-to-end campaigns over the bundled corpus.

These run full campaigns and are marked slow; run them with `pytest -m slow`.
"""

import random

import pytest

from statefuzz.campaign import CampaignConfig, FuzzCampaign
from statefuzz.contracts.loader import ContractCorpus
from statefuzz.corpus import SeedQueue
from statefuzz.energy import BranchWeightTable, allocate
from statefuzz.maskmut import InterestingValues, MaskGuidedMutator, preserves_critical
from statefuzz.oracles import BugClass

pytestmark = pytest.mark.slow

SEEDS = range(10)


def covers_nested(report, package) -> bool:
    """True when some covered branch sits inside another conditional."""
    return any(package.cfg.nesting_score(b) >= 2 for b in report.covered_branches)


class TestCrowdsale:
    """The crowdsale needs invest twice before withdraw can pay out."""

    @pytest.mark.parametrize("rng_seed", SEEDS)
    def test_full_coverage_and_withdraw_bug(self, crowdsale, rng_seed: int) -> None:
        """Test 100% coverage and the unhandled send in withdraw."""
        report = FuzzCampaign(crowdsale, CampaignConfig(rng_seed=rng_seed, time_budget=30)).run()

        assert report.branch_coverage_percent == 100.0
        assert any(f.bug_class == BugClass.UE and f.line == 31 for f in report.findings)
        assert report.termination != "time"

    @pytest.mark.parametrize("rng_seed", SEEDS)
    def test_without_sequence_mutation(self, crowdsale, rng_seed: int) -> None:
        """Test that the unmutated order cannot reach the second invest arm."""
        config = CampaignConfig(rng_seed=rng_seed, time_budget=30, energy_budget=5000, seq_mutation=False)

        report = FuzzCampaign(crowdsale, config).run()

        assert report.branch_coverage_percent <= 90.0


class TestGuessNumber:
    """The exact 88 finney payment guards everything else."""

    def test_mask_and_harvest_find_the_payment(self, guess_number):
        """Test that the payment guard is passed on most seeds."""
        hits = 0
        for rng_seed in SEEDS:
            config = CampaignConfig(rng_seed=rng_seed, time_budget=60, energy_budget=10_000)
            hits += covers_nested(FuzzCampaign(guess_number, config).run(), guess_number)

        assert hits >= 8

    def test_blind_mutation_never_pays_exactly(self, guess_number):
        """Test that without masks and harvested constants the guard holds."""
        for rng_seed in SEEDS:
            config = CampaignConfig(
                rng_seed=rng_seed, time_budget=60, energy_budget=3000, mask=False, harvest_constants=False
            )
            assert not covers_nested(FuzzCampaign(guess_number, config).run(), guess_number)


class TestOracleCorpus:
    """Every oracle fires on its vulnerable fixture and nothing fires on patched ones."""

    @pytest.mark.parametrize("bug_class", list(BugClass))
    def test_vulnerable_fixture(self, corpus: ContractCorpus, bug_class: BugClass) -> None:
        """Test the true positive on the vulnerable fixture."""
        entry = corpus.fixtures(bug_class)["vulnerable"]

        report = FuzzCampaign(corpus.load(entry.name), CampaignConfig(time_budget=60, energy_budget=3000)).run()

        assert bug_class in {f.bug_class for f in report.findings}
        assert {f.bug_class for f in report.findings} <= entry.bugs

    @pytest.mark.parametrize("bug_class", list(BugClass))
    def test_patched_fixture(self, corpus: ContractCorpus, bug_class: BugClass) -> None:
        """Test that the patched fixture produces no findings."""
        entry = corpus.fixtures(bug_class)["patched"]

        report = FuzzCampaign(corpus.load(entry.name), CampaignConfig(time_budget=60, energy_budget=3000)).run()

        assert report.findings == []

    @pytest.mark.parametrize("name", ["crowdsale", "guess_number", "stateless"])
    def test_examples_stay_within_labels(self, corpus: ContractCorpus, name: str) -> None:
        """Test that the examples report nothing outside their labels."""
        report = FuzzCampaign(corpus.load(name), CampaignConfig(time_budget=60, energy_budget=3000)).run()

        assert {f.bug_class for f in report.findings} <= corpus.entry(name).bugs


class TestMaskSoundness:
    """Mutants never touch a byte whose mask is empty."""

    def test_random_seeds(self, corpus: ContractCorpus, vault):
        """Test 200 random seeds over the fixture contracts."""
        packages = [vault, corpus.load("guess_number"), corpus.load("crowdsale"), corpus.load("re_vulnerable")]
        rng = random.Random(200)

        for index in range(200):
            package = rng.choice(packages)
            campaign = FuzzCampaign(package, CampaignConfig(rng_seed=index))
            template = rng.choice(campaign.templates)
            seed = campaign.initial_seeds(template, 1)[rng.randrange(len(campaign.accounts.addresses))]
            campaign.executor.execute(seed)
            seed.distance_gain = True

            queue = SeedQueue(campaign.executor.branches)
            queue.admit(seed)
            table = BranchWeightTable.for_branches(campaign.executor.branches)
            if table.entries:
                allocate(table, 100)
            mutator = MaskGuidedMutator(
                campaign.executor,
                table,
                InterestingValues(package),
                random.Random(index),
                record_mutants=True,
            )
            size = len(seed.stream)

            outcome = mutator.mutation_round(queue, 4 * size + 40, queue.uncovered)

            assert outcome.probe_executions == 4 * size
            for record in outcome.mutants:
                assert preserves_critical(record.parent, record.child, record.mask)
