"""Search loops for vanilla MCTS, MCTS-T and MCTS-T+.

All three variants share one select / expand / evaluate / back-up loop and
differ only in the tree policy, the back-up and loop handling:

* ``vanilla``: PUCT selection, running-mean value back-up, recommend by count.
* ``mcts_t``: selection bonus scaled by subtree uncertainty sigma, shadow
  counts, reweighted value back-up, recommend by value.
* ``mcts_t_plus``: ``mcts_t`` plus in-trace loop detection; a looped leaf gets
  sigma 0 and a loop value instead of a roll-out.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from mctst.mdp import Environment, State
from mctst.seeding import stable_hash
from mctst.tree import (
    SearchError,
    SearchTree,
    Trace,
    TreeNode,
    backup_trace_vanilla,
    backup_reweighted_with_sigma,
    select_action_vanilla,
    select_sigma_and_shadow,
)

VARIANTS = ("vanilla", "mcts_t", "mcts_t_plus")
LOOP_VALUE_MODES = ("saturating", "zero")
RECOMMEND_MODES = ("count", "value")
MAX_DEFAULT_ROLLOUT_DEPTH = 100


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one planning call.

    ``rollout_depth`` and ``eta`` default to ``min(horizon, 100)`` and the
    environment's ``default_eta``. ``horizon`` is the number of real steps
    left in the episode (``None`` for unbounded); it feeds the default
    roll-out depth and the loop value. ``include_leaf_estimate`` keeps each
    node's own first roll-out in the reweighted value back-up, which makes it
    coincide with the running mean whenever shadow and real counts agree.
    """

    variant: str = "mcts_t_plus"
    c: float = 1.0
    gamma: float = 1.0
    budget: int = 100
    rollout_depth: Optional[int] = None
    eta: Optional[float] = None
    seed: int = 0
    early_stop: bool = False
    loop_value_mode: str = "saturating"
    value_bound: float = 1e6
    recommend: Optional[str] = None
    horizon: Optional[int] = None
    include_leaf_estimate: bool = True
    record_traces: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.rollout_depth is not None and self.rollout_depth < 0:
            raise ValueError("rollout_depth must be >= 0")
        if self.eta is not None and self.eta < 0:
            raise ValueError("eta must be >= 0")
        if self.loop_value_mode not in LOOP_VALUE_MODES:
            raise ValueError(f"loop_value_mode must be one of {LOOP_VALUE_MODES}")
        if not self.value_bound > 0:
            raise ValueError("value_bound must be positive")
        if self.recommend is not None and self.recommend not in RECOMMEND_MODES:
            raise ValueError(f"recommend must be one of {RECOMMEND_MODES}")
        if self.horizon is not None and self.horizon < 0:
            raise ValueError("horizon must be >= 0")

    def resolved_rollout_depth(self) -> int:
        if self.rollout_depth is not None:
            return self.rollout_depth
        if self.horizon is None:
            return MAX_DEFAULT_ROLLOUT_DEPTH
        return min(self.horizon, MAX_DEFAULT_ROLLOUT_DEPTH)


class ActionStats(NamedTuple):
    n: int
    n_tilde: int
    q: float
    child_sigma: Optional[float]


@dataclass
class SearchResult:
    recommended: int
    root_stats: list[ActionStats]
    traces_used: int
    root_sigma: float
    tree: SearchTree = field(repr=False)
    traces: Optional[list[tuple[int, ...]]] = field(default=None, repr=False)


def rollout(
    env: Environment, leaf_state: State, depth: int, gamma: float, rng: random.Random
) -> float:
    """Discounted return of at most ``depth`` uniformly random steps from ``leaf_state``."""
    ret = 0.0
    discount = 1.0
    num_actions = env.num_actions
    step = env.step
    state = leaf_state
    for _ in range(depth):
        state, reward, terminal = step(state, int(rng.random() * num_actions))
        ret += discount * reward
        if terminal:
            break
        discount *= gamma
    return ret


def find_loop(trace_states: Sequence[State], candidate: State, eta: float) -> Optional[int]:
    """Index of the deepest state within L2 distance ``eta`` of ``candidate``, if any."""
    dim = len(candidate)
    dist = math.dist
    for i in range(len(trace_states) - 1, -1, -1):
        s = trace_states[i]
        if len(s) != dim:
            raise ValueError(f"state dimension mismatch: {len(s)} vs {dim}")
        if dist(candidate, s) < eta:
            return i
    return None


def detect_loop(trace_states: Sequence[State], candidate: State, eta: float) -> bool:
    """True when ``candidate`` repeats (within ``eta``) a state already on the trace."""
    return find_loop(trace_states, candidate, eta) is not None


def loop_value(
    loop_reward_sum: float,
    gamma: float,
    remaining_horizon: Optional[int],
    loop_length: int,
    mode: str = "saturating",
    value_bound: float = 1e6,
) -> float:
    """Value of repeating a detected loop for the rest of the horizon.

    With ``gamma == 1`` and no horizon the loop is worth ``+-value_bound`` (by
    the sign of its reward sum). Otherwise the loop's mean per-step reward is
    repeated, discounted, for ``remaining_horizon`` steps (forever if
    ``None``). Results are clipped to ``[-value_bound, value_bound]``.
    """
    if loop_length < 1:
        raise ValueError(f"loop_length must be >= 1, got {loop_length}")
    if mode == "zero" or loop_reward_sum == 0:
        return 0.0
    if remaining_horizon is None and gamma == 1.0:
        return math.copysign(value_bound, loop_reward_sum)
    per_step = loop_reward_sum / loop_length
    if gamma == 1.0:
        value = per_step * remaining_horizon
    elif remaining_horizon is None:
        value = per_step / (1.0 - gamma)
    else:
        value = per_step * (1.0 - gamma**remaining_horizon) / (1.0 - gamma)
    return max(-value_bound, min(value_bound, value))


def recommend(
    root: TreeNode, variant: str, rng: random.Random, mode: Optional[str] = None
) -> int:
    """Pick the root action: most visited for vanilla, highest Q for the T variants.

    ``mode`` (``"count"`` or ``"value"``) overrides the variant default. Under
    ``"value"`` exact Q ties are split by visit count before the RNG.
    """
    tried = root.tried()
    if not tried:
        raise SearchError("cannot recommend from a root without tried edges")
    if mode is None:
        mode = "count" if variant == "vanilla" else "value"
    if mode == "count":
        key = [root.edges[a].n for a in tried]
    else:
        # equal values fall back to visit counts, then to the RNG
        key = [(root.edges[a].q, root.edges[a].n) for a in tried]
    best = max(key)
    ties = [a for a, k in zip(tried, key) if k == best]
    if len(ties) == 1:
        return ties[0]
    return ties[rng.randrange(len(ties))]


def run_search(env: Environment, root_state: State, config: SearchConfig) -> SearchResult:
    """Plan from ``root_state`` with a fresh tree and return the root recommendation.

    The root must be non-terminal. Deterministic given ``config`` and ``env``.
    """
    rng = random.Random(config.seed)
    shadow_rng = random.Random(stable_hash(config.seed, "shadow"))
    tree = SearchTree(root_state, env.num_actions)
    root = tree.root
    variant = config.variant
    uses_sigma = variant != "vanilla"
    blocks_loops = variant == "mcts_t_plus"
    c = config.c
    gamma = config.gamma
    depth = config.resolved_rollout_depth()
    eta = env.default_eta if config.eta is None else config.eta
    horizon = config.horizon
    include_leaf = config.include_leaf_estimate
    step = env.step
    traces: Optional[list[tuple[int, ...]]] = [] if config.record_traces else None

    used = 0
    for _ in range(config.budget):
        trace = Trace()
        steps = trace.steps
        node = root
        while True:
            if node.terminal or node.looped:
                trace.leaf_value = node.value
                break
            if uses_sigma:
                action = select_sigma_and_shadow(node, c, rng, shadow_rng)
            else:
                action = select_action_vanilla(node, c, rng)
            steps.append((node, action))
            child = node.edges[action].child
            if child is not None:
                node = child
                continue
            leaf = tree.expand(node, action, step(node.state, action))
            if leaf.terminal:
                trace.leaf_value = 0.0
            elif blocks_loops and (hit := _loop_start(steps, leaf.state, eta)) is not None:
                leaf.looped = True
                leaf.sigma = 0.0
                loop_steps = steps[hit:]
                remaining = None if horizon is None else max(horizon - leaf.depth, 0)
                leaf.value = loop_value(
                    sum(n.edges[a].reward for n, a in loop_steps),
                    gamma,
                    remaining,
                    len(loop_steps),
                    config.loop_value_mode,
                    config.value_bound,
                )
                trace.leaf_value = leaf.value
            else:
                leaf.value = rollout(env, leaf.state, depth, gamma, rng)
                trace.leaf_value = leaf.value
            break

        if uses_sigma:
            backup_reweighted_with_sigma(trace, gamma, include_leaf)
        else:
            backup_trace_vanilla(trace, gamma)
        used += 1
        if traces is not None:
            traces.append(trace.actions)
        if config.early_stop and root.sigma == 0.0:
            break

    return SearchResult(
        recommended=recommend(root, variant, rng, config.recommend),
        root_stats=[
            ActionStats(e.n, e.n_tilde, e.q, None if e.child is None else e.child.sigma)
            for e in root.edges
        ],
        traces_used=used,
        root_sigma=root.sigma,
        tree=tree,
        traces=traces,
    )


def _loop_start(steps: list[tuple[TreeNode, int]], state: State, eta: float) -> Optional[int]:
    dim = len(state)
    dist = math.dist
    for i in range(len(steps) - 1, -1, -1):
        s = steps[i][0].state
        if len(s) != dim:
            raise ValueError(f"state dimension mismatch: {len(s)} vs {dim}")
        if dist(state, s) < eta:
            return i
    return None
