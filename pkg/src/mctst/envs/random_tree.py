"""Random tree-shaped deterministic MDPs for checking planners against the oracle.

States are ``(index, depth)`` with heap-style indices, so every state is
reached by exactly one action sequence and no trace ever loops. Each
transition terminates with probability ``terminal_prob`` (always at
``depth``), and a terminating transition pays 1 with probability
``goal_prob``, otherwise 0. All draws are hashed from ``seed``.
"""

from __future__ import annotations

from mctst.mdp import ContractViolation, Environment, State, StepOutcome
from mctst.seeding import stable_hash

_SCALE = float(1 << 63)


class RandomTreeMDP(Environment):
    def __init__(
        self,
        num_actions: int = 2,
        depth: int = 6,
        terminal_prob: float = 0.3,
        goal_prob: float = 0.3,
        seed: int = 0,
    ):
        if num_actions < 2 or depth < 1:
            raise ValueError("need num_actions >= 2 and depth >= 1")
        self.num_actions = num_actions
        self.depth = depth
        self.terminal_prob = terminal_prob
        self.goal_prob = goal_prob
        self.seed = seed
        self.name = f"random_tree:{num_actions},{depth},seed={seed}"

    def reset(self, seed: int = 0) -> State:
        return (0.0, 0.0)

    def _uniform(self, *parts) -> float:
        return stable_hash("random_tree", self.seed, *parts) / _SCALE

    def step(self, state: State, action: int) -> StepOutcome:
        self.check_action(action)
        index, depth = int(state[0]), int(state[1])
        if depth < 0 or depth >= self.depth:
            raise ContractViolation(f"state {state} is terminal or out of range")
        child = (float(index * self.num_actions + action + 1), float(depth + 1))
        terminal = depth + 1 == self.depth or self._uniform("term", index, action) < self.terminal_prob
        if not terminal:
            return StepOutcome(child, 0.0, False)
        # terminal children sit at the depth limit so stepping from them fails
        reward = 1.0 if self._uniform("goal", index, action) < self.goal_prob else 0.0
        return StepOutcome((child[0], float(self.depth)), reward, True)
