"""Data models for seeds and branch distances."""

from dataclasses import dataclass, field

from statefuzz.bytecode.cfg import BranchId
from statefuzz.depgraph.models import SequenceTemplate
from statefuzz.vm.models import ExecutionTrace, TxInput


@dataclass(frozen=True, order=True)
class Distance:
    """How far an input is from flipping a branch; zero means satisfied."""

    magnitude: int

    @property
    def satisfied(self) -> bool:
        return self.magnitude == 0


ZERO = Distance(0)


@dataclass(eq=False)
class Seed:
    """A sequence template instantiated with concrete transaction inputs.

    Coverage, distances, traces and the recorded call-outcome stream are
    filled in by the executor after each run.
    """

    template: SequenceTemplate
    inputs: list[TxInput]
    origin: str = "initial"
    covered_branches: set[BranchId] = field(default_factory=set)
    min_distances: dict[BranchId, Distance] = field(default_factory=dict)
    traces: list[ExecutionTrace] = field(default_factory=list)
    outcomes: list[bool] = field(default_factory=list)
    execution_index: int | None = None
    seed_id: int | None = None
    distance_gain: bool = False

    def __post_init__(self) -> None:
        if len(self.inputs) != len(self.template.calls):
            raise ValueError(
                f"seed has {len(self.inputs)} inputs for a template of {len(self.template.calls)} calls"
            )

    @property
    def functions(self) -> list[str]:
        return list(self.template.calls)

    @property
    def stream(self) -> bytes:
        """The concatenated byte stream of every transaction's input."""
        return b"".join(tx.raw_bytes for tx in self.inputs)

    @property
    def executed(self) -> bool:
        return self.execution_index is not None
