"""Energy allocation over weighted branches and seed ordering."""

from collections.abc import Iterable, Mapping

from statefuzz.bytecode.cfg import BranchId
from statefuzz.corpus.models import Seed
from statefuzz.energy.models import BranchWeightTable

DEFAULT_REFUND = 2


def allocate_shares(shares: Mapping[BranchId, int], total_budget: int) -> dict[BranchId, int]:
    """Split `total_budget` proportionally to integer shares.

    Floors each share, gives every branch at least one unit when the budget
    allows it, then settles the difference on the highest-share branch
    (earliest branch id on ties) so the result sums to the budget exactly.
    """
    if total_budget <= 0:
        raise ValueError(f"total budget must be positive, got {total_budget}")
    if not shares:
        return {}
    branches = sorted(shares)
    total_share = sum(shares[b] for b in branches)
    if total_share <= 0:
        raise ValueError("shares must sum to a positive value")

    allocation = {b: total_budget * shares[b] // total_share for b in branches}
    if total_budget >= len(branches):
        for b in branches:
            allocation[b] = max(1, allocation[b])

    leader = max(branches, key=lambda b: (shares[b], -branches.index(b)))
    difference = total_budget - sum(allocation.values())
    if difference >= 0:
        allocation[leader] += difference
    else:
        while difference < 0:
            donor = max(branches, key=lambda b: (allocation[b], shares[b], -branches.index(b)))
            allocation[donor] -= 1
            difference += 1
    return allocation


def allocate(table: BranchWeightTable, total_budget: int) -> BranchWeightTable:
    """Fill `allocated` on every entry in proportion to 1 + w1 + w2."""
    allocation = allocate_shares(
        {branch: entry.share for branch, entry in table.entries.items()}, total_budget
    )
    for branch, units in allocation.items():
        table.entries[branch].allocated = units
    return table


def update_energy(new_coverage: bool, energy: int, cap: int, refund: int = DEFAULT_REFUND) -> int:
    """Charge one execution; refund on new coverage without exceeding the allocation cap."""
    spent = max(0, energy - 1)
    if not new_coverage:
        return spent
    return min(spent + refund, max(spent, cap))


def seed_priority(seeds: Iterable[Seed], table: BranchWeightTable) -> list[Seed]:
    """Seeds by descending best weight over their covered branches, admission order on ties."""

    def best_weight(seed: Seed) -> int:
        return max((table.weight_of(b) for b in seed.covered_branches), default=0)

    ordered = sorted(seeds, key=lambda s: s.seed_id if s.seed_id is not None else 0)
    return sorted(ordered, key=best_weight, reverse=True)
