"""Branch distance over recorded comparison events."""

from collections.abc import Iterable

from statefuzz.bytecode.cfg import BranchId
from statefuzz.corpus.models import ZERO, Distance
from statefuzz.vm.models import CmpEvent, ExecutionTrace

NO_PROVENANCE = Distance(1)


def comparison_distance(events: list[CmpEvent], index: int, want_true: bool) -> Distance:
    """Distance for the comparison at `index` to evaluate to `want_true`."""
    event = events[index]
    a, b = event.a, event.b
    if event.op == "ISZERO":
        if event.inner is not None:
            return comparison_distance(events, event.inner, not want_true)
        if want_true:
            return Distance(a)
        return ZERO if a != 0 else Distance(1)
    if event.op == "EQ":
        if want_true:
            return Distance(abs(a - b))
        return ZERO if a != b else Distance(1)
    if event.op == "LT":
        if want_true:
            return ZERO if a < b else Distance(a - b + 1)
        return ZERO if a >= b else Distance(b - a)
    if event.op == "GT":
        if want_true:
            return ZERO if a > b else Distance(b - a + 1)
        return ZERO if a <= b else Distance(a - b)
    raise ValueError(f"unsupported comparison {event.op}")


def branch_distance(trace: ExecutionTrace, branch: BranchId) -> Distance | None:
    """Minimum distance to `branch` over every execution of its JUMPI in the trace.

    Returns None when the owning JUMPI never ran. A covered branch is ZERO.
    """
    best: Distance | None = None
    for event in trace.branch_events:
        if event.branch_id[0] != branch[0]:
            continue
        if event.branch_id == branch:
            return ZERO
        want_true = not event.taken
        if event.cond_provenance is None:
            distance = NO_PROVENANCE
        else:
            distance = comparison_distance(trace.cmp_events, event.cond_provenance, want_true)
        if best is None or distance < best:
            best = distance
    return best


def seed_distances(
    traces: Iterable[ExecutionTrace], branches: Iterable[BranchId]
) -> dict[BranchId, Distance]:
    """Minimum distance per branch across a seed's traces, for branches whose JUMPI ran."""
    trace_list = list(traces)
    distances: dict[BranchId, Distance] = {}
    for branch in branches:
        for trace in trace_list:
            distance = branch_distance(trace, branch)
            if distance is not None and (branch not in distances or distance < distances[branch]):
                distances[branch] = distance
    return distances
