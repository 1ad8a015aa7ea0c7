"""State-variable dependency analysis and transaction-sequence templates."""

from statefuzz.depgraph.models import DependencyGraph, SequenceTemplate
from statefuzz.depgraph.sequence import (
    DEFAULT_MAX_DUP,
    build_graph,
    mutate_sequence,
    mutate_to_fixpoint,
    order_sequence,
    replay_readers,
    template_family,
)

__all__ = [
    "DEFAULT_MAX_DUP",
    "DependencyGraph",
    "SequenceTemplate",
    "build_graph",
    "mutate_sequence",
    "mutate_to_fixpoint",
    "order_sequence",
    "replay_readers",
    "template_family",
]
