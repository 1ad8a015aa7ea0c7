"""Mask-guided mutation rounds under an energy budget."""

import logging
import random
import time
from dataclasses import dataclass, field

from statefuzz.bytecode.cfg import BranchId
from statefuzz.corpus.execution import SeedExecutor
from statefuzz.corpus.models import Seed
from statefuzz.corpus.queue import SeedQueue
from statefuzz.energy.allocation import DEFAULT_REFUND, seed_priority, update_energy
from statefuzz.energy.models import BranchWeightTable
from statefuzz.maskmut.interesting import InterestingValues, render
from statefuzz.maskmut.mask import (
    choose_target,
    compute_mask,
    effective_distance,
    nested_hit,
    ok_to_mutate,
    preserves_critical,
)
from statefuzz.maskmut.models import KIND_ORDER, Mutation, MutationKind, MutationMask
from statefuzz.maskmut.operators import clip_to_segment, mutate_inputs

logger = logging.getLogger(__name__)

MUTATION_SIZES = (1, 2, 4, 8, 16, 32)


@dataclass(frozen=True)
class MutantRecord:
    parent: bytes
    child: bytes
    mutation: Mutation
    mask: MutationMask


@dataclass
class RoundOutcome:
    """What one mutation round produced and spent."""

    new_seeds: list[Seed] = field(default_factory=list)
    candidates: list[Seed] = field(default_factory=list)
    energy_left: int = 0
    executions: int = 0
    probe_executions: int = 0
    seeds_fuzzed: int = 0
    mutants: list[MutantRecord] = field(default_factory=list)


class MaskGuidedMutator:
    """Mutates queued seeds byte-wise, gated by per-seed mutation masks.

    With `use_mask` off every position permits every kind and no probes run;
    with `use_energy` off seeds are visited in admission order.
    """

    def __init__(
        self,
        executor: SeedExecutor,
        table: BranchWeightTable,
        interesting: InterestingValues,
        rng: random.Random,
        use_mask: bool = True,
        use_energy: bool = True,
        refund: int = DEFAULT_REFUND,
        record_mutants: bool = False,
    ) -> None:
        self.executor = executor
        self.table = table
        self.interesting = interesting
        self.rng = rng
        self.use_mask = use_mask
        self.use_energy = use_energy
        self.refund = refund
        self.record_mutants = record_mutants
        self.cfg = executor.package.cfg

    def _target_branch(self, seed: Seed, target: BranchId | None, uncovered: set[BranchId]) -> BranchId | None:
        if target is not None:
            return target
        reachable = [b for b in uncovered if b in seed.min_distances]
        if not reachable:
            return None
        return min(reachable, key=lambda b: (effective_distance(seed, b), b))

    def _seed_energy(self, branch: BranchId | None) -> int:
        if branch is None:
            return max(1, min((e.allocated for e in self.table.entries.values()), default=1))
        return max(1, self.table.allocation_of(branch))

    def _random_mutation(self, stream: bytes, position: int, kind: MutationKind, bounds: list[tuple[int, int]]) -> Mutation:
        n = self.rng.choice(MUTATION_SIZES)
        shape = clip_to_segment(Mutation(MutationKind.DELETE, n, position), bounds)
        if kind == MutationKind.DELETE:
            return shape
        if kind == MutationKind.REPLACE:
            value = self.rng.choice(self.interesting.values)
            return Mutation(kind, shape.n, position, render(value, shape.n))
        payload = bytes(self.rng.getrandbits(8) for _ in range(shape.n))
        return Mutation(kind, shape.n, position, payload)

    def mutation_round(
        self,
        queue: SeedQueue,
        energy: int,
        uncovered: set[BranchId],
        deadline: float | None = None,
    ) -> RoundOutcome:
        """Fuzz queued seeds until `energy` executions (probes included) are spent.

        Seeds that neither reach a nested branch nor made distance progress
        are skipped. Mutants covering new branches are admitted right away;
        mutants that only get closer to an uncovered branch are returned as
        candidates for the next selection. `deadline` is a `time.monotonic()`
        value checked between seeds.
        """
        outcome = RoundOutcome(energy_left=max(0, energy))
        if energy <= 0:
            return outcome
        uncovered = set(uncovered)

        ordered = seed_priority(queue.seeds, self.table) if self.use_energy else list(queue.seeds)
        for seed in ordered:
            if outcome.energy_left <= 0:
                break
            if deadline is not None and time.monotonic() >= deadline:
                logger.debug("Round stopped at the deadline")
                break
            target_info = choose_target(nested_hit(seed, self.cfg))
            if self.use_mask and target_info is None and not seed.distance_gain:
                continue
            stream = seed.stream
            if not stream:
                continue

            if self.use_mask:
                if len(KIND_ORDER) * len(stream) > outcome.energy_left:
                    logger.debug(f"Seed {seed.seed_id} needs more probes than the energy left")
                    continue
                mask, probes = compute_mask(
                    seed, target_info, uncovered, self.executor, self.interesting, self.rng
                )
                outcome.probe_executions += probes
                outcome.energy_left -= probes
            else:
                mask = MutationMask.full(len(stream))

            branch = self._target_branch(
                seed, target_info.branch_id if target_info else None, uncovered
            )
            cap = self._seed_energy(branch)
            seed_energy = cap
            outcome.seeds_fuzzed += 1
            self._fuzz_seed(seed, mask, queue, uncovered, seed_energy, cap, branch, outcome)
            seed.distance_gain = False

        logger.debug(
            f"Round: {outcome.executions} mutants, {outcome.probe_executions} probes, "
            f"{len(outcome.new_seeds)} new seeds, {outcome.energy_left} energy left"
        )
        return outcome

    def _fuzz_seed(
        self,
        seed: Seed,
        mask: MutationMask,
        queue: SeedQueue,
        uncovered: set[BranchId],
        seed_energy: int,
        cap: int,
        branch: BranchId | None,
        outcome: RoundOutcome,
    ) -> None:
        stream = seed.stream
        bounds = self.executor.codec.segment_bounds(seed.functions)
        for position in range(len(stream)):
            for kind in KIND_ORDER:
                if seed_energy <= 0 or outcome.energy_left <= 0:
                    return
                mutation = self._random_mutation(stream, position, kind, bounds)
                if not ok_to_mutate(mask, mutation):
                    continue
                inputs = mutate_inputs(seed.inputs, self.executor.codec, mutation)
                mutant = Seed(seed.template, inputs, origin="mutant")
                child = mutant.stream
                if child == stream or not preserves_critical(stream, child, mask):
                    continue

                self.executor.execute(mutant)
                outcome.executions += 1
                outcome.energy_left -= 1
                if self.record_mutants:
                    outcome.mutants.append(MutantRecord(stream, child, mutation, mask))
                if branch is not None and branch in self.table:
                    entry = self.table.get(branch)
                    entry.spent = min(entry.allocated, entry.spent + 1)

                new_coverage = bool(queue.new_branches(mutant))
                if new_coverage:
                    queue.admit(mutant)
                    queue.record_distances(mutant)
                    outcome.new_seeds.append(mutant)
                    uncovered -= mutant.covered_branches
                elif queue.improves_distance(mutant):
                    outcome.candidates.append(mutant)
                seed_energy = update_energy(new_coverage, seed_energy, cap, self.refund)
