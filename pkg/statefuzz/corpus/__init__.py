"""Seed corpus: distances, execution, queue and seed files."""

from statefuzz.corpus.distance import branch_distance, comparison_distance, seed_distances
from statefuzz.corpus.execution import ExecutionSettings, SeedExecutor, derive_seed
from statefuzz.corpus.models import ZERO, Distance, Seed
from statefuzz.corpus.queue import DEFAULT_QUEUE_CAP, SeedQueue, select_seeds
from statefuzz.corpus.seedfile import SEED_SCHEMA, PackageMismatchError, SeedFile, SeedFileError

__all__ = [
    "DEFAULT_QUEUE_CAP",
    "SEED_SCHEMA",
    "ZERO",
    "Distance",
    "ExecutionSettings",
    "PackageMismatchError",
    "Seed",
    "SeedExecutor",
    "SeedFile",
    "SeedFileError",
    "SeedQueue",
    "branch_distance",
    "comparison_distance",
    "derive_seed",
    "seed_distances",
    "select_seeds",
]
