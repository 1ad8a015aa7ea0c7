"""Sources deciding whether an external call that could succeed is made to fail."""

import random
from abc import ABC, abstractmethod


class CallOutcomes(ABC):
    """Decides call failures and records every decision it makes."""

    def __init__(self) -> None:
        self.recorded: list[bool] = []

    @abstractmethod
    def _draw(self) -> bool:
        """Return True when the next call should fail."""
        pass

    def should_fail(self) -> bool:
        failed = self._draw()
        self.recorded.append(failed)
        return failed


class NeverFail(CallOutcomes):
    def _draw(self) -> bool:
        return False


class RandomOutcomes(CallOutcomes):
    """Fails each call independently with probability `rate`."""

    def __init__(self, rng: random.Random, rate: float = 0.5) -> None:
        super().__init__()
        self.rng = rng
        self.rate = rate

    def _draw(self) -> bool:
        return self.rng.random() < self.rate


class ScriptedOutcomes(CallOutcomes):
    """Replays a recorded outcome list; calls past its end succeed."""

    def __init__(self, outcomes: list[bool]) -> None:
        super().__init__()
        self._script = list(outcomes)
        self._position = 0

    def _draw(self) -> bool:
        if self._position >= len(self._script):
            return False
        failed = self._script[self._position]
        self._position += 1
        return failed
