"""Seed queue with branch-distance-feedback selection."""

import logging
from collections import Counter
from collections.abc import Iterable, Iterator

from statefuzz.bytecode.cfg import BranchId
from statefuzz.corpus.models import Distance, Seed

logger = logging.getLogger(__name__)

DEFAULT_QUEUE_CAP = 1024


class SeedQueue:
    """Retained seeds plus the global coverage they achieve.

    `best_distances` holds the smallest distance any executed seed reached for
    each branch; it is the baseline deciding whether a seed made distance
    progress.
    """

    def __init__(self, branches: Iterable[BranchId], cap: int = DEFAULT_QUEUE_CAP) -> None:
        self.branches: tuple[BranchId, ...] = tuple(branches)
        self.cap = cap
        self.seeds: list[Seed] = []
        self.global_coverage: set[BranchId] = set()
        self.best_distances: dict[BranchId, Distance] = {}
        self.evicted = 0
        self._next_id = 0

    def __len__(self) -> int:
        return len(self.seeds)

    def __iter__(self) -> Iterator[Seed]:
        return iter(self.seeds)

    @property
    def uncovered(self) -> set[BranchId]:
        return {b for b in self.branches if b not in self.global_coverage}

    @property
    def coverage_percent(self) -> float:
        if not self.branches:
            return 100.0
        return 100.0 * len(self.global_coverage) / len(self.branches)

    @property
    def complete(self) -> bool:
        return len(self.global_coverage) == len(self.branches)

    def new_branches(self, seed: Seed) -> set[BranchId]:
        return seed.covered_branches - self.global_coverage

    def admit(self, seed: Seed) -> None:
        """Add a seed and fold its coverage in; evicts when over capacity."""
        if seed.seed_id is None:
            seed.seed_id = self._next_id
            self._next_id += 1
        self.seeds.append(seed)
        self.global_coverage |= seed.covered_branches & set(self.branches)
        if len(self.seeds) > self.cap:
            self._evict()

    def record_distances(self, seed: Seed) -> bool:
        """Fold a seed's distances into the baseline. True if any improved."""
        improved = False
        for branch, distance in seed.min_distances.items():
            if branch in self.global_coverage:
                continue
            best = self.best_distances.get(branch)
            if best is None or distance < best:
                self.best_distances[branch] = distance
                improved = True
        return improved

    def improves_distance(self, seed: Seed) -> bool:
        for branch, distance in seed.min_distances.items():
            if branch in self.global_coverage:
                continue
            best = self.best_distances.get(branch)
            if best is None or distance < best:
                return True
        return False

    def _evict(self) -> None:
        holders: Counter[BranchId] = Counter()
        for seed in self.seeds:
            holders.update(seed.covered_branches)

        def unique_count(seed: Seed) -> int:
            return sum(1 for branch in seed.covered_branches if holders[branch] == 1)

        victim = min(self.seeds, key=lambda s: (unique_count(s), s.seed_id or 0))
        self.seeds.remove(victim)
        self.evicted += 1
        logger.debug(f"Evicted seed {victim.seed_id} from a full queue")


def select_seeds(queue: SeedQueue, executed: Iterable[Seed]) -> list[Seed]:
    """Admit executed seeds that cover new branches or are closest to an uncovered one.

    A seed covering a branch outside global coverage is admitted. Then, for
    every still-uncovered branch, the seed with the smallest distance (earliest
    on ties) is admitted when it beats the queue's best-known distance for
    that branch; such seeds are flagged with `distance_gain`.

    Returns:
        The newly admitted seeds, each once, in execution order.
    """
    candidates = list(executed)
    admitted: list[Seed] = []
    baseline = dict(queue.best_distances)

    for seed in candidates:
        if queue.new_branches(seed):
            queue.admit(seed)
            admitted.append(seed)

    for branch in sorted(queue.uncovered):
        best_seed: Seed | None = None
        best: Distance | None = None
        for seed in candidates:
            distance = seed.min_distances.get(branch)
            if distance is not None and (best is None or distance < best):
                best_seed, best = seed, distance
        if best_seed is None or best is None:
            continue
        known = baseline.get(branch)
        if known is not None and not best < known:
            continue
        best_seed.distance_gain = True
        queue.best_distances[branch] = best
        if best_seed not in admitted:
            queue.admit(best_seed)
            admitted.append(best_seed)

    for seed in admitted:
        queue.record_distances(seed)
    admitted.sort(key=lambda s: candidates.index(s))
    return admitted
