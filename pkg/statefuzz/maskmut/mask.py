"""Mutation masks: which byte positions of a seed may change, and how."""

import logging
import math
import random
from collections.abc import Iterable

from statefuzz.bytecode.cfg import BranchId, ControlFlowGraph
from statefuzz.corpus.execution import SeedExecutor
from statefuzz.corpus.models import Seed
from statefuzz.maskmut.interesting import InterestingValues
from statefuzz.maskmut.models import KIND_ORDER, Mutation, MutationKind, MutationMask, NestedBranchInfo
from statefuzz.maskmut.operators import clip_to_segment, mutate_inputs

logger = logging.getLogger(__name__)

MIN_NESTING = 2


def nested_hit(seed: Seed, cfg: ControlFlowGraph) -> set[NestedBranchInfo]:
    """Covered branches enclosed by at least one other conditional."""
    hits = set()
    for branch in seed.covered_branches:
        score = cfg.nesting_score(branch)
        if score >= MIN_NESTING:
            hits.add(NestedBranchInfo(branch, score))
    return hits


def choose_target(nested: Iterable[NestedBranchInfo]) -> NestedBranchInfo | None:
    """The most deeply nested branch; lowest branch id on ties."""
    ranked = sorted(nested, key=lambda info: (-info.nested_score, info.branch_id))
    return ranked[0] if ranked else None


def effective_distance(seed: Seed, branch: BranchId) -> float:
    """Covered counts as 0, a branch whose JUMPI never ran as infinitely far."""
    if branch in seed.covered_branches:
        return 0
    distance = seed.min_distances.get(branch)
    return distance.magnitude if distance is not None else math.inf


def decreases_distance(parent: Seed, mutant: Seed, uncovered: Iterable[BranchId]) -> bool:
    return any(effective_distance(mutant, b) < effective_distance(parent, b) for b in uncovered)


def probe_mutation(
    stream: bytes,
    position: int,
    kind: MutationKind,
    n: int,
    bounds: list[tuple[int, int]],
    interesting: InterestingValues,
) -> Mutation:
    """The deterministic probe of one kind at one position.

    Overwrites and inserts use the complement of the bytes they cover,
    replacements use the first interesting value that changes those bytes.
    """
    shape = clip_to_segment(Mutation(MutationKind.DELETE, n, position), bounds)
    original = stream[position : position + shape.n]
    original = original + bytes(shape.n - len(original))
    if kind == MutationKind.DELETE:
        return shape
    if kind == MutationKind.REPLACE:
        return Mutation(kind, shape.n, position, interesting.first_differing(original))
    return Mutation(kind, shape.n, position, bytes(b ^ 0xFF for b in original))


def compute_mask(
    seed: Seed,
    branch: NestedBranchInfo | None,
    uncovered: set[BranchId],
    executor: SeedExecutor,
    interesting: InterestingValues,
    rng: random.Random,
    n: int | None = None,
) -> tuple[MutationMask, int]:
    """Probe every (position, kind) once and keep the kinds that preserve progress.

    A probe passes when its mutant still covers `branch`, or gets closer to
    some uncovered branch than the seed is. The affected byte count is drawn
    once from [1, |seed|] unless given.

    Returns:
        The mask and the number of probe executions (always 4 * |seed|).
    """
    stream = seed.stream
    size = len(stream)
    mask = MutationMask.empty(size)
    if size == 0:
        return mask, 0
    if n is None:
        n = rng.randint(1, size)

    bounds = executor.codec.segment_bounds(seed.functions)
    probes: list[tuple[int, MutationKind, Seed]] = []
    for position in range(size):
        for kind in KIND_ORDER:
            mutation = probe_mutation(stream, position, kind, n, bounds, interesting)
            inputs = mutate_inputs(seed.inputs, executor.codec, mutation)
            probes.append((position, kind, Seed(seed.template, inputs, origin="probe")))

    executor.execute_batch([mutant for _, _, mutant in probes])
    for position, kind, mutant in probes:
        keeps_branch = branch is not None and branch.branch_id in mutant.covered_branches
        if keeps_branch or decreases_distance(seed, mutant, uncovered):
            mask.allow(position, kind)

    logger.debug(
        f"Mask for seed {seed.seed_id}: {size - len(mask.critical_positions())}/{size} "
        f"positions mutable (n={n})"
    )
    return mask, len(probes)


def ok_to_mutate(mask: MutationMask, mutation: Mutation) -> bool:
    """True when every byte the mutation touches permits its kind."""
    return all(
        j < len(mask) and mutation.kind in mask[j]
        for j in range(mutation.position, mutation.position + mutation.n)
    )


def preserves_critical(parent: bytes, child: bytes, mask: MutationMask) -> bool:
    """True when no position with an empty mask changed."""
    return all(
        j < len(child) and parent[j] == child[j] for j in mask.critical_positions()
    )
