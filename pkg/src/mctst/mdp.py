"""The deterministic environment contract shared by planners and benchmarks."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import NamedTuple, Tuple

State = Tuple[float, ...]


class ContractViolation(ValueError):
    """Raised when a caller breaks an environment precondition."""


class StepOutcome(NamedTuple):
    next_state: State
    reward: float
    terminal: bool


class Environment(ABC):
    """A deterministic MDP with a pure transition function.

    ``step`` depends only on its arguments, so a planner can simulate from
    any node of its tree without snapshot/restore. Episode step caps belong
    to the harness, not to the environment.
    """

    name: str = "env"
    num_actions: int = 2
    #: L2 loop-detection threshold used when a search config leaves it unset.
    default_eta: float = 1e-6
    #: Harness step cap used when an experiment leaves it unset.
    default_step_cap: int = 400

    @abstractmethod
    def reset(self, seed: int = 0) -> State:
        """Return the initial state; deterministic in ``seed``."""

    @abstractmethod
    def step(self, state: State, action: int) -> StepOutcome:
        """Apply ``action`` in ``state``."""

    def check_action(self, action: int) -> None:
        if not 0 <= action < self.num_actions:
            raise ContractViolation(
                f"action {action} out of range [0, {self.num_actions})"
            )

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


def as_state(values) -> State:
    """Convert a sequence of numbers into a finite ``State`` tuple."""
    state = tuple(float(v) for v in values)
    if not all(math.isfinite(v) for v in state):
        raise ContractViolation(f"non-finite state {state}")
    return state
