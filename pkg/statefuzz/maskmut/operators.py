"""Mutation operators over byte streams and seed inputs."""

from statefuzz.maskmut.models import Mutation, MutationError, MutationKind
from statefuzz.vm.codec import InputCodec
from statefuzz.vm.models import TxInput


def mutate(stream: bytes, mutation: Mutation) -> bytes:
    """Apply one mutation. Length changes are left for the caller to canonicalize.

    Raises:
        MutationError: If the mutation does not fit within `stream`.
    """
    i, n = mutation.position, mutation.n
    limit = len(stream) if mutation.kind == MutationKind.INSERT else len(stream) - n
    if i < 0 or i > limit:
        raise MutationError(f"{mutation} is out of bounds for a {len(stream)}-byte stream")
    if mutation.kind == MutationKind.INSERT:
        return stream[:i] + mutation.payload + stream[i:]
    if mutation.kind == MutationKind.DELETE:
        return stream[:i] + stream[i + n :]
    return stream[:i] + mutation.payload + stream[i + n :]


def canonicalize(stream: bytes, width: int) -> bytes:
    return stream[:width] + bytes(max(0, width - len(stream)))


def apply_mutation(stream: bytes, mutation: Mutation) -> bytes:
    """Mutate and restore the original width."""
    return canonicalize(mutate(stream, mutation), len(stream))


def segment_of(bounds: list[tuple[int, int]], position: int) -> int:
    """Index of the transaction segment holding `position`; the stream end maps to the last one."""
    for index, (start, end) in enumerate(bounds):
        if start <= position < end:
            return index
    if bounds and position == bounds[-1][1]:
        return len(bounds) - 1
    raise MutationError(f"position {position} is outside the seed stream")


def clip_to_segment(mutation: Mutation, bounds: list[tuple[int, int]]) -> Mutation:
    """Shrink `n` (and the payload) so the mutation stays inside one segment."""
    start, end = bounds[segment_of(bounds, mutation.position)]
    room = max(1, end - mutation.position)
    n = min(mutation.n, room)
    if n == mutation.n:
        return mutation
    payload = mutation.payload[:n] if mutation.kind != MutationKind.DELETE else b""
    return Mutation(mutation.kind, n, mutation.position, payload)


def mutate_inputs(inputs: list[TxInput], codec: InputCodec, mutation: Mutation) -> list[TxInput]:
    """Apply a stream-level mutation to the one transaction segment it falls in.

    The mutation is clipped to the segment, applied there, and the segment is
    re-canonicalized to its width, so every other transaction is untouched.
    """
    functions = [tx.function for tx in inputs]
    bounds = codec.segment_bounds(functions)
    index = segment_of(bounds, mutation.position)
    start, _ = bounds[index]
    clipped = clip_to_segment(mutation, bounds)
    local = Mutation(clipped.kind, clipped.n, clipped.position - start, clipped.payload)
    segment = inputs[index].raw_bytes
    mutated = canonicalize(mutate(segment, local), len(segment))
    result = list(inputs)
    result[index] = codec.decode(inputs[index].function, mutated)
    return result
