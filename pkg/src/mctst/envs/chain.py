"""Chain and cyclic Chain corridors with a sparse reward at the far end.

Positions run from 1 to N. At each position one action advances and the
other is "wrong": on the plain Chain a wrong action ends the episode with
reward 0, on the cyclic Chain it sends the agent back to position 1.
Reaching past position N with the correct action pays 1 and terminates.

States are 1-vectors holding the position. Terminal outcomes use position 0
(fell off) and N + 1 (goal), so stepping from them is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mctst.mdp import ContractViolation, Environment, State, StepOutcome
from mctst.seeding import stable_hash

SCHEMES = ("seed-hashed", "fixed-zero")


@dataclass(frozen=True)
class ChainSpec:
    length: int = 10
    scheme: str = "seed-hashed"
    seed: int = 0
    correct: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.length < 2:
            raise ValueError(f"chain length must be >= 2, got {self.length}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.scheme == "fixed-zero":
            correct = (0,) * self.length
        else:
            correct = tuple(
                stable_hash("chain", self.seed, i) % 2 for i in range(1, self.length + 1)
            )
        object.__setattr__(self, "correct", correct)

    def correct_action(self, position: int) -> int:
        return self.correct[position - 1]


class Chain(Environment):
    num_actions = 2

    def __init__(self, spec: ChainSpec | None = None):
        self.spec = spec or ChainSpec()
        self.name = f"chain:{self.spec.length}"
        self._correct = self.spec.correct
        self._length = self.spec.length
        self._goal = (float(self._length + 1),)

    @property
    def length(self) -> int:
        return self._length

    def reset(self, seed: int = 0) -> State:
        return (1.0,)

    def _position(self, state: State) -> int:
        position = int(state[0])
        if not 1 <= position <= self._length or position != state[0]:
            raise ContractViolation(
                f"position {state[0]} outside [1, {self._length}] (terminal or invalid)"
            )
        return position

    def _wrong(self, position: int) -> StepOutcome:
        return StepOutcome((0.0,), 0.0, True)

    def step(self, state: State, action: int) -> StepOutcome:
        if action != 0 and action != 1:
            self.check_action(action)
        position = self._position(state)
        if action != self._correct[position - 1]:
            return self._wrong(position)
        if position == self._length:
            return StepOutcome(self._goal, 1.0, True)
        return StepOutcome((float(position + 1),), 0.0, False)


class CyclicChain(Chain):
    """Chain whose wrong action loops back to position 1 instead of terminating."""

    def __init__(self, spec: ChainSpec | None = None):
        super().__init__(spec)
        self.name = f"cyclic_chain:{self.spec.length}"
        self.default_step_cap = 2 * self._length

    def _wrong(self, position: int) -> StepOutcome:
        return StepOutcome((1.0,), 0.0, False)
