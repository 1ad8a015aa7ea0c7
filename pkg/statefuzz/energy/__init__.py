"""Branch weighting and energy accounting."""

from statefuzz.energy.allocation import (
    DEFAULT_REFUND,
    allocate,
    allocate_shares,
    seed_priority,
    update_energy,
)
from statefuzz.energy.models import BranchWeight, BranchWeightTable, VulnerableInstLoc
from statefuzz.energy.weighting import (
    DEFAULT_W2,
    branch_weighted,
    prefix_inference,
    vulnerable_locations,
    weight_assign,
)

__all__ = [
    "DEFAULT_REFUND",
    "DEFAULT_W2",
    "BranchWeight",
    "BranchWeightTable",
    "VulnerableInstLoc",
    "allocate",
    "allocate_shares",
    "branch_weighted",
    "prefix_inference",
    "seed_priority",
    "update_energy",
    "vulnerable_locations",
    "weight_assign",
]
