"""Campaign configuration, loaded from the [tool.statefuzz] table of a pyproject.toml."""

import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import toml

from statefuzz.corpus.queue import DEFAULT_QUEUE_CAP
from statefuzz.depgraph.sequence import DEFAULT_MAX_DUP
from statefuzz.energy.allocation import DEFAULT_REFUND
from statefuzz.energy.weighting import DEFAULT_W2
from statefuzz.vm.codec import AccountSet
from statefuzz.vm.interpreter import DEFAULT_INITIAL_BALANCE
from statefuzz.vm.models import BlockEnv

logger = logging.getLogger(__name__)

DEFAULT_TIME_BUDGET = 600.0
DEFAULT_ENERGY_BUDGET = 50_000


@dataclass
class CampaignConfig:
    """Budgets, switches and the account model of one fuzzing campaign.

    `rng_seed` fully determines a run with one worker.
    """

    time_budget: float = DEFAULT_TIME_BUDGET
    energy_budget: int = DEFAULT_ENERGY_BUDGET
    rng_seed: int = 0
    max_dup: int = DEFAULT_MAX_DUP
    w2_const: int = DEFAULT_W2
    refund_new: int = DEFAULT_REFUND
    accounts: list[str] = field(default_factory=lambda: ["owner", "user", "attacker"])
    attacker: str = "attacker"
    initial_balance: int = DEFAULT_INITIAL_BALANCE
    report_path: Path | None = None
    workers: int = 1
    seq_mutation: bool = True
    mask: bool = True
    energy: bool = True
    harvest_constants: bool = True
    se_include_ordering: bool = False
    call_failure_rate: float = 0.5
    seeds_per_sender: int = 4
    queue_cap: int = DEFAULT_QUEUE_CAP
    saturation_rounds: int = 5
    block_timestamp: int = BlockEnv.timestamp
    block_number: int = BlockEnv.number

    def __post_init__(self) -> None:
        positive = {
            "time_budget": self.time_budget,
            "energy_budget": self.energy_budget,
            "max_dup": self.max_dup,
            "workers": self.workers,
            "seeds_per_sender": self.seeds_per_sender,
            "queue_cap": self.queue_cap,
            "saturation_rounds": self.saturation_rounds,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.w2_const < 0 or self.refund_new < 0:
            raise ValueError("w2_const and refund_new must not be negative")
        if not 0.0 <= self.call_failure_rate <= 1.0:
            raise ValueError(f"call_failure_rate must be within [0, 1], got {self.call_failure_rate}")
        if self.rng_seed < 0 or self.rng_seed >= 1 << 64:
            raise ValueError(f"rng_seed must fit in 64 bits, got {self.rng_seed}")
        if self.attacker not in self.accounts:
            raise ValueError(f"attacker {self.attacker!r} is not one of {self.accounts}")
        if self.report_path is not None:
            self.report_path = Path(self.report_path)

    @property
    def account_set(self) -> AccountSet:
        return AccountSet(tuple(self.accounts), self.attacker)

    @property
    def env(self) -> BlockEnv:
        return BlockEnv(timestamp=self.block_timestamp, number=self.block_number)

    def with_overrides(self, **overrides: Any) -> "CampaignConfig":
        """A copy with every non-None override applied (CLI flags win over the file)."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            data[f.name] = str(value) if isinstance(value, Path) else value
        return data

    @classmethod
    def from_pyproject(cls, project_path: Path) -> "CampaignConfig":
        """Load configuration from pyproject.toml if it exists."""
        pyproject_path = project_path / "pyproject.toml"
        config = cls()

        if pyproject_path.exists():
            try:
                data = toml.load(pyproject_path)
                table = data.get("tool", {}).get("statefuzz", {})
                known = {f.name for f in fields(cls)}
                for key in table:
                    if key.replace("-", "_") not in known:
                        logger.warning(f"Ignoring unknown [tool.statefuzz] key: {key}")
                config = cls(
                    **{k.replace("-", "_"): v for k, v in table.items() if k.replace("-", "_") in known}
                )
            except Exception as e:
                # If we can't parse the config, use defaults
                logger.warning(f"Could not load [tool.statefuzz] from {pyproject_path}: {e}")
                config = cls()

        return config
