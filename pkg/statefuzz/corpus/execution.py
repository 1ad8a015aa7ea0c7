"""Seed execution with deterministic per-execution call-outcome streams."""

import hashlib
import logging
import random
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from statefuzz.bytecode.cfg import BranchId
from statefuzz.corpus.distance import seed_distances
from statefuzz.corpus.models import Seed
from statefuzz.frontend.models import ContractPackage
from statefuzz.vm.codec import AccountSet, InputCodec
from statefuzz.vm.interpreter import DEFAULT_INITIAL_BALANCE, coverage_of, execute_sequence
from statefuzz.vm.models import BlockEnv, ExecutionTrace
from statefuzz.vm.outcomes import CallOutcomes, RandomOutcomes, ScriptedOutcomes

logger = logging.getLogger(__name__)

ResultCallback = Callable[[Seed, list[ExecutionTrace]], None]


def derive_seed(seed: int, *parts: object) -> int:
    """Stable 64-bit seed derived from a root seed and a path of labels."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(seed).encode("utf-8"))
    for part in parts:
        h.update(b"|")
        h.update(str(part).encode("utf-8"))
    return int.from_bytes(h.digest(), "big")


@dataclass(frozen=True)
class ExecutionSettings:
    accounts: AccountSet = AccountSet()
    env: BlockEnv = BlockEnv()
    rng_seed: int = 0
    call_failure_rate: float = 0.5
    initial_balance: int = DEFAULT_INITIAL_BALANCE
    workers: int = 1


class SeedExecutor:
    """Runs seeds against fresh deployments and annotates them with results.

    Every execution gets an index; the call-outcome stream of execution k is
    seeded from (rng_seed, "exec", k), so results do not depend on which
    worker ran it. Callbacks always fire in index order.
    """

    def __init__(
        self,
        package: ContractPackage,
        settings: ExecutionSettings | None = None,
        on_result: ResultCallback | None = None,
    ) -> None:
        self.package = package
        self.settings = settings or ExecutionSettings()
        self.codec = InputCodec(package, self.settings.accounts)
        self.on_result = on_result
        self.executions = 0
        self.branches: tuple[BranchId, ...] = package.cfg.branch_ids

    def _outcomes_for(self, index: int) -> RandomOutcomes:
        rng = random.Random(derive_seed(self.settings.rng_seed, "exec", index))
        return RandomOutcomes(rng, self.settings.call_failure_rate)

    def _run(self, seed: Seed, outcomes: CallOutcomes, record_steps: bool = False) -> list[ExecutionTrace]:
        traces, _ = execute_sequence(
            self.package,
            seed.inputs,
            self.settings.env,
            accounts=self.settings.accounts,
            outcomes=outcomes,
            record_steps=record_steps,
            initial_balance=self.settings.initial_balance,
        )
        return traces

    def _annotate(self, seed: Seed, traces: list[ExecutionTrace], outcomes: CallOutcomes) -> None:
        seed.traces = traces
        seed.outcomes = list(outcomes.recorded)
        seed.covered_branches = coverage_of(traces)
        uncovered = [b for b in self.branches if b not in seed.covered_branches]
        seed.min_distances = seed_distances(traces, uncovered)

    def execute(self, seed: Seed) -> list[ExecutionTrace]:
        """Execute one seed and report it to the result callback."""
        return self.execute_batch([seed])[0]

    def execute_batch(self, seeds: list[Seed]) -> list[list[ExecutionTrace]]:
        """Execute seeds, in parallel when more than one worker is configured."""
        if not seeds:
            return []
        first = self.executions
        self.executions += len(seeds)
        jobs = [(seed, first + offset) for offset, seed in enumerate(seeds)]

        def work(job: tuple[Seed, int]) -> tuple[list[ExecutionTrace], CallOutcomes]:
            seed, index = job
            outcomes = self._outcomes_for(index)
            return self._run(seed, outcomes), outcomes

        if self.settings.workers > 1 and len(seeds) > 1:
            with ThreadPoolExecutor(max_workers=self.settings.workers) as pool:
                results = list(pool.map(work, jobs))
        else:
            results = [work(job) for job in jobs]

        all_traces = []
        for (seed, index), (traces, outcomes) in zip(jobs, results):
            seed.execution_index = index
            self._annotate(seed, traces, outcomes)
            if self.on_result is not None:
                self.on_result(seed, traces)
            all_traces.append(traces)
        return all_traces

    def replay(self, seed: Seed, outcomes: list[bool], record_steps: bool = False) -> list[ExecutionTrace]:
        """Re-execute a seed with a recorded call-outcome stream. Does not count as an execution."""
        scripted = ScriptedOutcomes(outcomes)
        traces = self._run(seed, scripted, record_steps=record_steps)
        self._annotate(seed, traces, scripted)
        return traces
