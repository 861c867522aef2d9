"""Small hand-built MDPs and a step-by-step search driver built from the public tree operations."""

from __future__ import annotations

import random
from typing import Optional

from mctst.mdp import ContractViolation, Environment, State, StepOutcome
from mctst.planners import SearchConfig, loop_value, rollout
from mctst.seeding import stable_hash
from mctst.tree import (
    SearchTree,
    Trace,
    backup_sigma,
    backup_trace_vanilla,
    backup_value_reweighted,
    select_action_sigma,
    select_action_vanilla,
    update_shadow_counts,
)


class TableMDP(Environment):
    """Transitions given as ``{state: [(next_state, reward, terminal), ...]}``."""

    def __init__(self, table, start, num_actions=2):
        self.table = {tuple(map(float, k)): v for k, v in table.items()}
        self.start = tuple(map(float, start))
        self.num_actions = num_actions
        self.name = "table"

    def reset(self, seed: int = 0) -> State:
        return self.start

    def step(self, state: State, action: int) -> StepOutcome:
        self.check_action(action)
        try:
            nxt, reward, terminal = self.table[tuple(state)][action]
        except KeyError:
            raise ContractViolation(f"no transitions from {state}") from None
        return StepOutcome(tuple(map(float, nxt)), float(reward), bool(terminal))


def walkthrough_mdp() -> TableMDP:
    """Root with one terminal arm and one arm leading to a node with two terminal arms."""
    return TableMDP(
        {
            (0,): [((1,), 0, False), ((2,), 0, True)],
            (1,): [((3,), 0, True), ((4,), 0, True)],
        },
        (0,),
    )


class RewardWalk(Environment):
    """Loop-free, terminal-free walk whose transition rewards are hashed from the path."""

    num_actions = 2

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.name = "reward_walk"

    def reset(self, seed: int = 0) -> State:
        return (0.0, 0.0)

    def step(self, state: State, action: int) -> StepOutcome:
        self.check_action(action)
        index, depth = int(state[0]), int(state[1])
        reward = (stable_hash("walk", self.seed, index, action) % 1000) / 1000.0
        return StepOutcome((float(2 * index + action + 1), float(depth + 1)), reward, False)


def play_scripted(tree: SearchTree, env: Environment, actions, gamma=1.0, c=1.0,
                  rng: Optional[random.Random] = None, leaf_value=0.0) -> Trace:
    """Follow ``actions`` from the root, expanding the final edge, then run the MCTS-T back-ups."""
    rng = rng or random.Random(0)
    trace = Trace()
    node = tree.root
    for a in actions:
        trace.steps.append((node, a))
        child = node.edges[a].child
        if child is None:
            child = tree.expand(node, a, env.step(node.state, a))
            child.value = 0.0 if child.terminal else leaf_value
        node = child
    trace.leaf_value = node.value
    update_shadow_counts(trace, c, rng)
    backup_value_reweighted(trace, gamma)
    backup_sigma(trace)
    return trace


def composed_search(env: Environment, root_state: State, config: SearchConfig):
    """Reference search loop assembled from the per-operation functions.

    Mirrors the planner's RNG usage so its trees can be compared exactly.
    Returns ``(tree, traces)``.
    """
    rng = random.Random(config.seed)
    shadow_rng = random.Random(stable_hash(config.seed, "shadow"))
    tree = SearchTree(root_state, env.num_actions)
    eta = env.default_eta if config.eta is None else config.eta
    depth = config.resolved_rollout_depth()
    traces = []
    for _ in range(config.budget):
        trace = Trace()
        node = tree.root
        while not (node.terminal or node.looped):
            if config.variant == "vanilla":
                a = select_action_vanilla(node, config.c, rng)
            else:
                a = select_action_sigma(node, config.c, rng)
            trace.steps.append((node, a))
            child = node.edges[a].child
            if child is None:
                child = tree.expand(node, a, env.step(node.state, a))
                if child.terminal:
                    child.value = 0.0
                else:
                    hit = None
                    if config.variant == "mcts_t_plus":
                        for i in range(len(trace.steps) - 1, -1, -1):
                            s = trace.steps[i][0].state
                            if sum((x - y) ** 2 for x, y in zip(s, child.state)) ** 0.5 < eta:
                                hit = i
                                break
                    if hit is not None:
                        loop = trace.steps[hit:]
                        child.looped = True
                        child.sigma = 0.0
                        remaining = None if config.horizon is None else max(config.horizon - child.depth, 0)
                        child.value = loop_value(
                            sum(n.edges[x].reward for n, x in loop), config.gamma, remaining,
                            len(loop), config.loop_value_mode, config.value_bound,
                        )
                    else:
                        child.value = rollout(env, child.state, depth, config.gamma, rng)
                node = child
                break
            node = child
        trace.leaf_value = node.value
        if config.variant == "vanilla":
            backup_trace_vanilla(trace, config.gamma)
        else:
            update_shadow_counts(trace, config.c, shadow_rng)
            backup_value_reweighted(trace, config.gamma, config.include_leaf_estimate)
            backup_sigma(trace)
        traces.append(trace.actions)
        if config.early_stop and tree.root.sigma == 0.0:
            break
    return tree, traces
