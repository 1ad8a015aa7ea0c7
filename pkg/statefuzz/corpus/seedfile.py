"""JSON serialization of seeds for replay."""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from statefuzz.corpus.models import Seed
from statefuzz.depgraph.models import SequenceTemplate
from statefuzz.frontend.models import ContractPackage
from statefuzz.vm.codec import AccountSet, InputCodec
from statefuzz.vm.interpreter import DEFAULT_INITIAL_BALANCE
from statefuzz.vm.models import BlockEnv

SEED_SCHEMA = "statefuzz.seed/1"


class SeedFileError(Exception):
    """Raised for unreadable seed files or an unknown schema."""


class PackageMismatchError(Exception):
    """Raised when a seed file was recorded against a different package."""

    def __init__(self, expected: str, actual: str) -> None:
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"seed file was recorded for package {expected[:12]}, got {actual[:12]}"
        )


@dataclass
class SeedFile:
    """A seed with everything needed to replay it deterministically."""

    package_hash: str
    template: SequenceTemplate
    inputs: list[tuple[str, bytes]]
    outcomes: list[bool] = field(default_factory=list)
    accounts: AccountSet = AccountSet()
    env: BlockEnv = BlockEnv()
    initial_balance: int = DEFAULT_INITIAL_BALANCE
    finding: dict[str, Any] | None = None

    @classmethod
    def from_seed(
        cls,
        seed: Seed,
        package: ContractPackage,
        accounts: AccountSet,
        env: BlockEnv,
        finding: dict[str, Any] | None = None,
        initial_balance: int = DEFAULT_INITIAL_BALANCE,
    ) -> "SeedFile":
        return cls(
            package_hash=package.package_hash,
            template=seed.template,
            inputs=[(tx.function, tx.raw_bytes) for tx in seed.inputs],
            outcomes=list(seed.outcomes),
            accounts=accounts,
            env=env,
            initial_balance=initial_balance,
            finding=finding,
        )

    def to_seed(self, package: ContractPackage) -> Seed:
        """Decode the inputs against `package`.

        Raises:
            PackageMismatchError: If the package hash differs from the recorded one.
        """
        if package.package_hash != self.package_hash:
            raise PackageMismatchError(self.package_hash, package.package_hash)
        codec = InputCodec(package, self.accounts)
        inputs = [codec.decode(function, raw) for function, raw in self.inputs]
        return Seed(template=self.template, inputs=inputs, origin="replay")

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "schema": SEED_SCHEMA,
            "packageHash": self.package_hash,
            "accounts": {"names": list(self.accounts.names), "attacker": self.accounts.attacker_name},
            "env": {
                "timestamp": self.env.timestamp,
                "number": self.env.number,
                "blockInterval": self.env.block_interval,
            },
            "initialBalance": self.initial_balance,
            "template": self.template.to_dict(),
            "inputs": [{"function": name, "raw": raw.hex()} for name, raw in self.inputs],
            "outcomes": [int(failed) for failed in self.outcomes],
        }
        if self.finding is not None:
            data["finding"] = self.finding
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SeedFile":
        if data.get("schema") != SEED_SCHEMA:
            raise SeedFileError(
                f"unsupported seed schema {data.get('schema')!r}, expected {SEED_SCHEMA!r}"
            )
        try:
            accounts = AccountSet(
                names=tuple(data["accounts"]["names"]), attacker_name=data["accounts"]["attacker"]
            )
            env_data = data.get("env", {})
            env = BlockEnv(
                timestamp=int(env_data.get("timestamp", BlockEnv.timestamp)),
                number=int(env_data.get("number", BlockEnv.number)),
                block_interval=int(env_data.get("blockInterval", BlockEnv.block_interval)),
            )
            initial_balance = int(data.get("initialBalance", DEFAULT_INITIAL_BALANCE))
            inputs = [(item["function"], bytes.fromhex(item["raw"])) for item in data["inputs"]]
            template = SequenceTemplate.from_dict(data["template"])
        except (KeyError, ValueError, TypeError) as e:
            raise SeedFileError(f"malformed seed file: {e}") from e
        if [name for name, _ in inputs] != list(template.calls):
            raise SeedFileError("seed inputs do not match the template calls")
        return cls(
            package_hash=str(data.get("packageHash", "")),
            template=template,
            inputs=inputs,
            outcomes=[bool(x) for x in data.get("outcomes", [])],
            accounts=accounts,
            env=env,
            initial_balance=initial_balance,
            finding=data.get("finding"),
        )

    def write(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")

    @classmethod
    def read(cls, path: Path) -> "SeedFile":
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise SeedFileError(f"cannot read seed file {path}: {e}") from e
        if not isinstance(data, dict):
            raise SeedFileError(f"seed file {path} is not a JSON object")
        return cls.from_dict(data)
