"""The fuzzing loop: seed generation, pre-fuzz weighting, selection and mask-guided rounds."""

import logging
import random
import time
from pathlib import Path
from typing import Any

from statefuzz.campaign.config import CampaignConfig
from statefuzz.campaign.report import CampaignReport, RoundStats, save_report
from statefuzz.corpus.execution import ExecutionSettings, SeedExecutor, derive_seed
from statefuzz.corpus.models import Seed
from statefuzz.corpus.queue import SeedQueue, select_seeds
from statefuzz.corpus.seedfile import SeedFile
from statefuzz.depgraph.models import DependencyGraph, SequenceTemplate
from statefuzz.depgraph.sequence import build_graph, template_family
from statefuzz.energy.allocation import allocate
from statefuzz.energy.models import BranchWeightTable
from statefuzz.energy.weighting import branch_weighted, vulnerable_locations
from statefuzz.frontend.compiler import compile_source, load_package
from statefuzz.frontend.models import ContractPackage, FunctionAbi
from statefuzz.maskmut.interesting import InterestingValues
from statefuzz.maskmut.round import MaskGuidedMutator
from statefuzz.oracles.suite import OracleSuite
from statefuzz.vm.codec import InputCodec
from statefuzz.vm.models import CONTRACT_ADDRESS, ExecutionTrace, TxInput

logger = logging.getLogger(__name__)

# Coverage gain, in percentage points, that triggers re-weighting.
REWEIGHT_GAIN = 10.0
MAX_VALUE_BITS = 72
MAX_ARG_BITS = 256


def _log_uniform(rng: random.Random, max_bits: int, min_bits: int = 0) -> int:
    """A value whose bit length is uniform over [min_bits, max_bits]."""
    bits = rng.randint(min_bits, max_bits)
    if bits == 0:
        return 0
    return rng.randrange(1 << (bits - 1), 1 << bits)


class FuzzCampaign:
    """One campaign over one contract package.

    The campaign owns the queue, the branch weight table and the energy
    account; the executor owns execution indices and call-outcome streams.
    """

    def __init__(self, package: ContractPackage, config: CampaignConfig | None = None) -> None:
        self.package = package
        self.config = config or CampaignConfig()
        self.accounts = self.config.account_set
        self.env = self.config.env
        self.rng = random.Random(derive_seed(self.config.rng_seed, "campaign"))

        self.suite = OracleSuite(package, se_include_ordering=self.config.se_include_ordering)
        settings = ExecutionSettings(
            accounts=self.accounts,
            env=self.env,
            rng_seed=self.config.rng_seed,
            call_failure_rate=self.config.call_failure_rate,
            initial_balance=self.config.initial_balance,
            workers=self.config.workers,
        )
        self.executor = SeedExecutor(package, settings, on_result=self._on_result)
        self.codec: InputCodec = self.executor.codec
        self.queue = SeedQueue(self.executor.branches, cap=self.config.queue_cap)
        self.interesting = InterestingValues(package, harvest=self.config.harvest_constants)

        self.graph: DependencyGraph = build_graph(package)
        self.templates: list[SequenceTemplate] = template_family(
            self.graph, package.functions, self.config.seq_mutation, self.config.max_dup
        )
        self.table = BranchWeightTable.for_branches(self.executor.branches)
        self.mutator = MaskGuidedMutator(
            self.executor,
            self.table,
            self.interesting,
            random.Random(derive_seed(self.config.rng_seed, "mutate")),
            use_mask=self.config.mask,
            use_energy=self.config.energy,
            refund=self.config.refund_new,
        )
        self.rounds: list[RoundStats] = []
        self.energy_used = 0
        self.termination = "time"
        self._started = 0.0
        self._weighted_at = 0.0

    def _on_result(self, seed: Seed, traces: list[ExecutionTrace]) -> None:
        def witness() -> dict[str, Any]:
            return SeedFile.from_seed(
                seed, self.package, self.accounts, self.env, initial_balance=self.config.initial_balance
            ).to_dict()

        self.suite.observe(traces, witness)

    def _elapsed(self) -> float:
        return time.monotonic() - self._started

    def _record_round(self, index: int) -> None:
        self.rounds.append(
            RoundStats(
                round=index,
                executions=self.executor.executions,
                covered=len(self.queue.global_coverage),
                total=len(self.queue.branches),
                elapsed=self._elapsed(),
            )
        )

    def random_tx(self, fn: FunctionAbi, sender: int) -> TxInput:
        """Random inputs: log-uniform values and integers, a quarter of values zero."""
        value = 0
        if fn.payable and self.rng.random() >= 0.25:
            value = _log_uniform(self.rng, MAX_VALUE_BITS, min_bits=1)
        args = []
        for ptype in fn.param_types:
            if ptype == "uint256":
                args.append(_log_uniform(self.rng, MAX_ARG_BITS))
            elif ptype == "address":
                args.append(self.rng.choice(self.accounts.addresses + (CONTRACT_ADDRESS,)))
            else:
                args.append(self.rng.randint(0, 1))
        return self.codec.encode(fn.name, sender, value, args)

    def initial_seeds(self, template: SequenceTemplate, count: int) -> list[Seed]:
        """`count` random instantiations of `template` per sender account."""
        seeds = []
        for _ in range(count):
            for sender in self.accounts.addresses:
                inputs = [self.random_tx(self.codec.abi(name), sender) for name in template.calls]
                seeds.append(Seed(template, inputs))
        return seeds

    def prefuzz_seed(self) -> Seed:
        """The primary template with zero arguments and one wei on payable calls."""
        template = self.templates[0]
        inputs = []
        for name in template.calls:
            fn = self.codec.abi(name)
            args = [0] * len(fn.params)
            inputs.append(self.codec.encode(name, self.accounts.owner, 1 if fn.payable else 0, args))
        return Seed(template, inputs, origin="prefuzz")

    def _weight(self, seed: Seed) -> None:
        fresh = branch_weighted(seed, vulnerable_locations(self.package), self.executor, self.config.w2_const)
        if self.config.energy:
            self.table.merge_max(fresh)
        if self.table.entries:
            allocate(self.table, self.config.energy_budget)
        self._weighted_at = self.queue.coverage_percent

    def _maybe_reweight(self) -> None:
        if not self.config.energy or not self.queue.seeds:
            return
        if self.queue.coverage_percent - self._weighted_at < REWEIGHT_GAIN:
            return
        best = max(self.queue.seeds, key=lambda s: (len(s.covered_branches), -(s.seed_id or 0)))
        logger.debug(f"Re-weighting from seed {best.seed_id} at {self.queue.coverage_percent:.1f}%")
        self._weight(best)

    def _seed_corpus(self, per_sender: int, budget: int) -> list[Seed]:
        """Generate and execute `per_sender` random seeds per template and sender.

        Duplicate streams are executed once. At most `budget` seeds are executed.
        """
        executed: list[Seed] = []
        seen: set[tuple[tuple[str, ...], bytes]] = set()
        for _ in range(per_sender):
            batch = []
            for template in self.templates:
                for seed in self.initial_seeds(template, 1):
                    key = (template.calls, seed.stream)
                    if key not in seen:
                        seen.add(key)
                        batch.append(seed)
            batch = batch[: budget - len(executed)]
            self.executor.execute_batch(batch)
            executed.extend(batch)
        return executed

    def run(self) -> CampaignReport:
        """Run until the time or energy budget runs out or coverage saturates."""
        config = self.config
        self._started = time.monotonic()
        deadline = self._started + config.time_budget
        logger.info(
            f"Fuzzing {self.package.name}: {len(self.queue.branches)} branches, "
            f"{len(self.templates)} templates, seed {config.rng_seed}"
        )

        # the prefuzz seed and the initial corpus are paid from the energy budget too
        prefuzz = self.prefuzz_seed()
        self.executor.execute(prefuzz)
        candidates = [prefuzz] + self._seed_corpus(config.seeds_per_sender, config.energy_budget - 1)
        self.energy_used = len(candidates)
        select_seeds(self.queue, candidates)
        self._weight(prefuzz)
        if not config.energy:
            logger.debug("Energy scheduling disabled, allocating uniformly")
        self._record_round(0)
        candidates = []

        round_index = 0
        saturated = 0
        while True:
            if time.monotonic() >= deadline:
                self.termination = "time"
                break
            remaining = config.energy_budget - self.energy_used
            if remaining <= 0:
                self.termination = "energy"
                break

            round_index += 1
            findings_before = len(self.suite.findings)
            select_seeds(self.queue, candidates)
            outcome = self.mutator.mutation_round(self.queue, remaining, self.queue.uncovered, deadline)
            spent = outcome.executions + outcome.probe_executions
            self.energy_used += spent
            candidates = outcome.candidates
            self._maybe_reweight()

            if spent == 0:
                if self.queue.complete:
                    self._record_round(round_index)
                    self.termination = "coverage"
                    break
                reseeded = self.initial_seeds(self.rng.choice(self.templates), 1)
                reseeded = reseeded[: config.energy_budget - self.energy_used]
                self.executor.execute_batch(reseeded)
                self.energy_used += len(reseeded)
                candidates += reseeded
                logger.debug(f"Round {round_index} made no progress, reseeded {len(reseeded)} seeds")
            self._record_round(round_index)

            if self.queue.complete and len(self.suite.findings) == findings_before:
                saturated += 1
                if saturated >= config.saturation_rounds:
                    self.termination = "saturated"
                    break
            else:
                saturated = 0

        return self._report()

    def _report(self) -> CampaignReport:
        findings = self.suite.finalize()
        config = self.config.to_dict()
        config.pop("report_path", None)
        report = CampaignReport(
            contract=self.package.name,
            package_hash=self.package.package_hash,
            total_branches=len(self.queue.branches),
            covered_branches=sorted(self.queue.global_coverage),
            findings=findings,
            executions=self.executor.executions,
            rounds=list(self.rounds),
            wall_clock=self._elapsed(),
            termination=self.termination,
            templates=[list(t.calls) for t in self.templates],
            config=config,
        )
        logger.info(
            f"Campaign over ({self.termination}): {report.branch_coverage_percent:.1f}% coverage, "
            f"{len(findings)} findings, {report.executions} executions"
        )
        return report


def resolve_package(target: ContractPackage | Path | str) -> ContractPackage:
    """A package as-is, a path to a `.clite` or package JSON file, or CLite source text."""
    if isinstance(target, ContractPackage):
        return target
    if isinstance(target, Path):
        return load_package(target)
    return compile_source(target)


def run_campaign(
    target: ContractPackage | Path | str, config: CampaignConfig | None = None
) -> CampaignReport:
    """Fuzz a contract end to end and write the report if a path is configured.

    Raises:
        CompileError: If CLite source fails to compile.
        PackageFormatError: If a package file is malformed.
        OSError: If the report cannot be written.
    """
    config = config or CampaignConfig()
    campaign = FuzzCampaign(resolve_package(target), config)
    report = campaign.run()
    if config.report_path is not None:
        save_report(report, config.report_path)
    return report
