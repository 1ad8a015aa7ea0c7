"""Byte-stream encoding of transaction inputs.

Each transaction is one segment laid out as::

    sender (1 byte) | value (32 bytes) | arg0 | arg1 | ...

with uint256 arguments taking 32 big-endian bytes and address or bool
arguments taking one byte. Sender and address bytes index into the account
set (addresses may also name the contract itself). Any byte string of the
right width decodes, so mutated streams only need re-canonicalizing to width.
"""

from dataclasses import dataclass

from statefuzz.frontend.models import ContractPackage, FunctionAbi
from statefuzz.vm.models import CONTRACT_ADDRESS, TxInput, UnknownFunctionError

WORD_BYTES = 32
SENDER_BYTES = 1

_PARAM_WIDTHS = {"uint256": WORD_BYTES, "address": 1, "bool": 1}


@dataclass(frozen=True)
class AccountSet:
    """Named synthetic accounts. The attacker is the account whose name is `attacker`."""

    names: tuple[str, ...] = ("owner", "user", "attacker")
    attacker_name: str = "attacker"

    def __post_init__(self) -> None:
        if not self.names:
            raise ValueError("at least one account is required")
        if self.attacker_name not in self.names:
            raise ValueError(f"attacker {self.attacker_name!r} is not one of {list(self.names)}")

    @property
    def addresses(self) -> tuple[int, ...]:
        return tuple(0x1000 * (index + 1) for index in range(len(self.names)))

    @property
    def attacker(self) -> int:
        return self.address_of(self.attacker_name)

    @property
    def owner(self) -> int:
        return self.addresses[0]

    def address_of(self, name: str) -> int:
        return self.addresses[self.names.index(name)]

    def name_of(self, address: int) -> str:
        if address == CONTRACT_ADDRESS:
            return "contract"
        try:
            return self.names[self.addresses.index(address)]
        except ValueError:
            return hex(address)

    def sender_at(self, index: int) -> int:
        return self.addresses[index % len(self.names)]

    def address_arg_at(self, index: int) -> int:
        """Address arguments range over the accounts plus the contract itself."""
        choices = self.addresses + (CONTRACT_ADDRESS,)
        return choices[index % len(choices)]

    def index_of_address_arg(self, address: int) -> int:
        choices = self.addresses + (CONTRACT_ADDRESS,)
        return choices.index(address) if address in choices else 0

    def to_dict(self) -> dict[str, str]:
        return {name: hex(address) for name, address in zip(self.names, self.addresses)}


class InputCodec:
    """Encodes TxInputs of one package to and from fixed-width byte segments."""

    def __init__(self, package: ContractPackage, accounts: AccountSet) -> None:
        self.package = package
        self.accounts = accounts

    def abi(self, function: str) -> FunctionAbi:
        fn = self.package.function(function)
        if fn is None:
            raise UnknownFunctionError(function)
        return fn

    def width(self, function: str) -> int:
        """Encoded width of one transaction calling `function`."""
        fn = self.abi(function)
        return SENDER_BYTES + WORD_BYTES + sum(_PARAM_WIDTHS[t] for t in fn.param_types)

    def segment_bounds(self, functions: list[str]) -> list[tuple[int, int]]:
        """(start, end) offsets of each transaction's segment in a sequence stream."""
        bounds = []
        offset = 0
        for name in functions:
            end = offset + self.width(name)
            bounds.append((offset, end))
            offset = end
        return bounds

    def canonicalize(self, function: str, raw: bytes) -> bytes:
        """Pad with zeros or truncate `raw` to the width of `function`."""
        width = self.width(function)
        return raw[:width] + bytes(max(0, width - len(raw)))

    def encode(
        self, function: str, sender: int, value: int = 0, args: tuple[int, ...] | list[int] = ()
    ) -> TxInput:
        fn = self.abi(function)
        if len(args) != len(fn.params):
            raise ValueError(f"{function} expects {len(fn.params)} arguments, got {len(args)}")
        sender_index = self.accounts.addresses.index(sender) if sender in self.accounts.addresses else 0
        raw = bytearray([sender_index])
        raw += (value % (1 << 256)).to_bytes(WORD_BYTES, "big")
        for ptype, arg in zip(fn.param_types, args):
            if ptype == "uint256":
                raw += (arg % (1 << 256)).to_bytes(WORD_BYTES, "big")
            elif ptype == "address":
                raw.append(self.accounts.index_of_address_arg(arg))
            else:
                raw.append(1 if arg else 0)
        return self.decode(function, bytes(raw))

    def decode(self, function: str, raw: bytes) -> TxInput:
        """Decode one segment; `raw` is canonicalized first, so decoding is total."""
        fn = self.abi(function)
        raw = self.canonicalize(function, raw)
        # The deployer is always the owner, whatever the sender byte says.
        sender = self.accounts.owner if fn.is_constructor else self.accounts.sender_at(raw[0])
        value = int.from_bytes(raw[1 : 1 + WORD_BYTES], "big")
        offset = SENDER_BYTES + WORD_BYTES
        args = []
        for ptype in fn.param_types:
            width = _PARAM_WIDTHS[ptype]
            chunk = raw[offset : offset + width]
            if ptype == "uint256":
                args.append(int.from_bytes(chunk, "big"))
            elif ptype == "address":
                args.append(self.accounts.address_arg_at(chunk[0]))
            else:
                args.append(chunk[0] & 1)
            offset += width
        return TxInput(function, sender, value, tuple(args), raw)
