"""Exhaustive depth-limited enumeration of a deterministic MDP.

Gives ground truth for small instances: the optimal discounted return, every
optimal first action, the number of terminating traces and the size of the
full search tree.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from mctst.mdp import Environment, State
from mctst.planners import detect_loop


class OracleRefusal(RuntimeError):
    """Raised when the full tree would exceed the node limit."""


@dataclass(frozen=True)
class EnumerationReport:
    optimal_return: float
    optimal_first_action: frozenset[int]
    terminating_trace_count: int
    node_count: int
    depth_capped: bool
    first_action_values: tuple[float, ...] = ()


def enumerate_tree(
    env: Environment,
    state: State,
    depth_cap: int,
    gamma: float = 1.0,
    loop_aware: bool = False,
    eta: float | None = None,
    max_nodes: int = 10**7,
) -> EnumerationReport:
    """Expand every action sequence from ``state`` until termination or ``depth_cap``.

    Non-terminal nodes at the depth cap contribute zero future return and set
    ``depth_capped``. With ``loop_aware`` a child repeating a state on its own
    trace (within ``eta``) is kept as a node but not expanded, and contributes
    zero future return, which mirrors the loop-blocked tree. ``state`` itself
    must be non-terminal.
    """
    if depth_cap < 1:
        raise ValueError(f"depth_cap must be >= 1, got {depth_cap}")
    if eta is None:
        eta = env.default_eta
    num_actions = env.num_actions
    step = env.step
    counts = {"nodes": 1, "traces": 0}
    capped = False
    path: list[State] = []

    def value(s: State, depth: int) -> float:
        nonlocal capped
        if depth == depth_cap:
            capped = True
            return 0.0
        path.append(s)
        best = -math.inf
        for a in range(num_actions):
            v = action_value(s, a, depth)
            if v > best:
                best = v
        path.pop()
        return best

    def action_value(s: State, a: int, depth: int) -> float:
        nxt, reward, terminal = step(s, a)
        counts["nodes"] += 1
        if counts["nodes"] > max_nodes:
            raise OracleRefusal(f"enumeration exceeds {max_nodes} nodes")
        if terminal:
            counts["traces"] += 1
            return reward
        if loop_aware and detect_loop(path, nxt, eta):
            return reward
        return reward + gamma * value(nxt, depth + 1)

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 2 * depth_cap + 100))
    try:
        path.append(state)
        q = tuple(action_value(state, a, 0) for a in range(num_actions))
        path.pop()
    finally:
        sys.setrecursionlimit(limit)

    best = max(q)
    optimal = frozenset(
        a for a, v in enumerate(q) if math.isclose(v, best, rel_tol=1e-12, abs_tol=1e-12)
    )
    return EnumerationReport(best, optimal, counts["traces"], counts["nodes"], capped, q)
