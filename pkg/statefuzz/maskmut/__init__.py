"""Byte-level mutation operators, mutation masks and mask-guided rounds."""

from statefuzz.maskmut.interesting import BOUNDARY_VALUES, InterestingValues, harvest_constants
from statefuzz.maskmut.mask import (
    choose_target,
    compute_mask,
    nested_hit,
    ok_to_mutate,
    preserves_critical,
    probe_mutation,
)
from statefuzz.maskmut.models import (
    ALL_KINDS,
    Mutation,
    MutationError,
    MutationKind,
    MutationMask,
    NestedBranchInfo,
)
from statefuzz.maskmut.operators import apply_mutation, canonicalize, mutate, mutate_inputs
from statefuzz.maskmut.round import MaskGuidedMutator, MutantRecord, RoundOutcome

__all__ = [
    "ALL_KINDS",
    "BOUNDARY_VALUES",
    "InterestingValues",
    "MaskGuidedMutator",
    "MutantRecord",
    "Mutation",
    "MutationError",
    "MutationKind",
    "MutationMask",
    "NestedBranchInfo",
    "RoundOutcome",
    "apply_mutation",
    "canonicalize",
    "choose_target",
    "compute_mask",
    "harvest_constants",
    "mutate",
    "mutate_inputs",
    "nested_hit",
    "ok_to_mutate",
    "preserves_critical",
    "probe_mutation",
]
