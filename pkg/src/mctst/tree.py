"""Search tree storage, tree policies and statistic back-ups.

Nodes are positional: the same environment state reached along two
different traces gets two nodes. Each node keeps one ``ActionEdge`` per
action; an edge owns the visit count ``n``, the shadow count ``n_tilde``,
the running return sum ``w`` (vanilla only), the value ``q``, the
immediate reward observed when it was expanded and the child node.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from mctst.mdp import State, StepOutcome

INF = math.inf


class SearchError(RuntimeError):
    """Raised when a tree operation is applied to a node that cannot take it."""


@dataclass(slots=True, eq=False)
class ActionEdge:
    n: int = 0
    n_tilde: int = 0
    w: float = 0.0
    q: float = 0.0
    reward: float = 0.0
    child: TreeNode | None = None


@dataclass(slots=True, eq=False)
class TreeNode:
    state: State
    terminal: bool
    edges: list[ActionEdge]
    sigma: float = 1.0
    looped: bool = False
    n: int = 0
    depth: int = 0
    # future-return estimate used when a trace ends here without expanding
    value: float = 0.0

    @property
    def is_leaf_end(self) -> bool:
        """Whether selection stops at this node (terminal or loop-blocked)."""
        return self.terminal or self.looped

    def tried(self) -> list[int]:
        return [a for a, e in enumerate(self.edges) if e.n > 0]


@dataclass(slots=True, eq=False)
class Trace:
    """One root-to-leaf descent: ``(node, action)`` pairs plus the leaf estimate."""

    steps: list[tuple[TreeNode, int]] = field(default_factory=list)
    leaf_value: float = 0.0

    @property
    def leaf(self) -> TreeNode:
        node, action = self.steps[-1]
        child = node.edges[action].child
        if child is None:
            raise SearchError("trace does not end in an expanded edge")
        return child

    @property
    def actions(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.steps)


class SearchTree:
    """Owns the root and hands out new leaves."""

    def __init__(self, root_state: State, num_actions: int):
        self.num_actions = num_actions
        self.root = TreeNode(root_state, False, self._fresh_edges(), n=1)
        self.node_count = 1

    def _fresh_edges(self) -> list[ActionEdge]:
        return [ActionEdge() for _ in range(self.num_actions)]

    def expand(self, parent: TreeNode, action: int, outcome: StepOutcome) -> TreeNode:
        """Attach the outcome of ``action`` below ``parent`` as a new leaf.

        The leaf starts with sigma 0 when terminal and 1 otherwise, and with
        ``n == 1`` for its expansion visit; later traces that end on it again
        (terminal or looped) only count on the parent edge.
        """
        edge = parent.edges[action]
        if edge.child is not None:
            raise SearchError(f"edge {action} at depth {parent.depth} is already expanded")
        leaf = TreeNode(
            outcome.next_state,
            outcome.terminal,
            self._fresh_edges(),
            sigma=0.0 if outcome.terminal else 1.0,
            n=1,
            depth=parent.depth + 1,
        )
        edge.child = leaf
        edge.reward = outcome.reward
        self.node_count += 1
        return leaf

    def nodes(self):
        """Yield ``(node, action_into_node)`` in depth-first preorder."""
        stack: list[tuple[TreeNode, int | None]] = [(self.root, None)]
        while stack:
            node, action = stack.pop()
            yield node, action
            for a in range(len(node.edges) - 1, -1, -1):
                child = node.edges[a].child
                if child is not None:
                    stack.append((child, a))


def _pick(candidates: list[int], rng: random.Random) -> int:
    if len(candidates) == 1:
        return candidates[0]
    return candidates[rng.randrange(len(candidates))]


def _check_selectable(node: TreeNode) -> None:
    if node.terminal or node.looped:
        raise SearchError("cannot select an action at a terminal or looped node")


def vanilla_argmax(node: TreeNode, c: float) -> list[int]:
    """All actions maximising ``Q + c * sqrt(n(s)) / n(s, a)``; untried edges win outright."""
    sqrt_n = math.sqrt(node.n)
    best = -INF
    ties: list[int] = []
    for a, e in enumerate(node.edges):
        score = INF if e.n == 0 else e.q + c * sqrt_n / e.n
        if score > best:
            best = score
            ties = [a]
        elif score == best:
            ties.append(a)
    return ties


def sigma_argmax(node: TreeNode, c: float) -> list[int]:
    """Like :func:`vanilla_argmax` with each bonus scaled by the child's sigma."""
    sqrt_n = math.sqrt(node.n)
    best = -INF
    ties: list[int] = []
    for a, e in enumerate(node.edges):
        if e.n == 0:
            score = INF
        else:
            # c * sigma keeps the float result identical to the vanilla score when sigma == 1
            score = e.q + c * e.child.sigma * sqrt_n / e.n
        if score > best:
            best = score
            ties = [a]
        elif score == best:
            ties.append(a)
    return ties


def select_action_vanilla(node: TreeNode, c: float, rng: random.Random) -> int:
    _check_selectable(node)
    return _pick(vanilla_argmax(node, c), rng)


def select_action_sigma(node: TreeNode, c: float, rng: random.Random) -> int:
    _check_selectable(node)
    return _pick(sigma_argmax(node, c), rng)


def backup_trace_vanilla(trace: Trace, gamma: float) -> None:
    """Discounted return accumulation: ``W += R``, ``n += 1``, ``Q = W / n`` along the trace."""
    ret = trace.leaf_value
    for node, action in reversed(trace.steps):
        edge = node.edges[action]
        ret = edge.reward + gamma * ret
        edge.w += ret
        edge.n += 1
        edge.q = edge.w / edge.n
        node.n += 1


def update_sigma(node: TreeNode) -> float:
    """Recompute ``node.sigma`` as the count-weighted mean of its children's sigma.

    Untried actions count as tried once with sigma 1.
    """
    num = 0.0
    den = 0
    for e in node.edges:
        if e.n >= 1:
            num += e.n * e.child.sigma
            den += e.n
        else:
            num += 1.0
            den += 1
    node.sigma = num / den
    return node.sigma


def backup_sigma(trace: Trace) -> None:
    """Propagate sigma from the leaf's parent up to the root.

    Must run after the visit counts of this trace have been incremented.
    """
    for node, _ in reversed(trace.steps):
        update_sigma(node)


def update_shadow_counts(trace: Trace, c: float, rng: random.Random) -> None:
    """Credit ``n_tilde`` to the action plain PUCT would have picked at each trace node.

    Call after the forward pass and before any back-up, so the scores are the
    ones selection saw. When the action actually taken is among the PUCT
    maximisers it gets the credit; only a genuine disagreement draws from
    ``rng``, which should be a stream separate from the selection RNG.
    """
    for node, action in trace.steps:
        best = vanilla_argmax(node, c)
        target = action if action in best else _pick(best, rng)
        node.edges[target].n_tilde += 1


def backup_value_reweighted(trace: Trace, gamma: float, include_leaf: bool = True) -> None:
    """Set each trace edge to ``r + gamma * (n_tilde-weighted mean of the child's Q)``.

    With ``include_leaf`` the child's own first estimate (``child.value``, its
    roll-out) joins the mean with weight 1, so the result equals the vanilla
    running mean whenever ``n_tilde == n``. A child without tried edges (the
    fresh, terminal or looped leaf) contributes the trace's leaf estimate.
    Visit counts increment as in the vanilla back-up.
    """
    leaf_weight = 1.0 if include_leaf else 0.0
    leaf = trace.leaf
    for node, action in reversed(trace.steps):
        edge = node.edges[action]
        child = edge.child
        num = 0.0
        den = 0
        tried = False
        for ce in child.edges:
            if ce.n > 0:
                tried = True
                num += ce.n_tilde * ce.q
                den += ce.n_tilde
        if tried:
            assert den > 0, "shadow counts must be updated before the value back-up"
            edge.q = edge.reward + gamma * (
                (num + leaf_weight * child.value) / (den + leaf_weight)
            )
        else:
            assert child is leaf, "only the trace leaf may lack tried edges"
            edge.q = edge.reward + gamma * trace.leaf_value
        edge.n += 1
        node.n += 1


def select_sigma_and_shadow(
    node: TreeNode, c: float, rng: random.Random, shadow_rng: random.Random
) -> int:
    """:func:`select_action_sigma` and the shadow-count credit in a single pass."""
    _check_selectable(node)
    sqrt_n = math.sqrt(node.n)
    best = best_v = -INF
    ties: list[int] = []
    ties_v: list[int] = []
    for a, e in enumerate(node.edges):
        n = e.n
        if n == 0:
            score = score_v = INF
        else:
            score = e.q + c * e.child.sigma * sqrt_n / n
            score_v = e.q + c * sqrt_n / n
        if score > best:
            best = score
            ties = [a]
        elif score == best:
            ties.append(a)
        if score_v > best_v:
            best_v = score_v
            ties_v = [a]
        elif score_v == best_v:
            ties_v.append(a)
    action = ties[0] if len(ties) == 1 else ties[rng.randrange(len(ties))]
    target = action if action in ties_v else _pick(ties_v, shadow_rng)
    node.edges[target].n_tilde += 1
    return action


def backup_reweighted_with_sigma(trace: Trace, gamma: float, include_leaf: bool = True) -> None:
    """:func:`backup_value_reweighted` followed by :func:`backup_sigma`, fused per level."""
    leaf_weight = 1.0 if include_leaf else 0.0
    leaf = trace.leaf
    for node, action in reversed(trace.steps):
        edge = node.edges[action]
        child = edge.child
        if child is leaf:
            # fresh, terminal or looped leaf: no tried edges below it
            edge.q = edge.reward + gamma * trace.leaf_value
        else:
            num = 0.0
            den = 0
            for ce in child.edges:
                if ce.n > 0:
                    num += ce.n_tilde * ce.q
                    den += ce.n_tilde
            assert den > 0, "shadow counts must be updated before the value back-up"
            edge.q = edge.reward + gamma * ((num + leaf_weight * child.value) / (den + leaf_weight))
        edge.n += 1
        node.n += 1
        # sigma with the freshly incremented counts
        num = 0.0
        den = 0
        for e in node.edges:
            n = e.n
            if n:
                num += n * e.child.sigma
                den += n
            else:
                num += 1.0
                den += 1
        node.sigma = num / den


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def dump_tree(tree: SearchTree) -> str:
    """Render the tree one node per line, indented two spaces per depth.

    Each line reads ``<label> s=<state> <flags> sigma=<s> n=<n> | <edges>`` where
    the label is ``root`` or ``a<action>``, flags are ``T`` (terminal), ``L``
    (looped) or ``-``, and every edge is written as ``<a>:(n,n_tilde,q)``.
    """
    lines = []
    for node, action in tree.nodes():
        label = "root" if action is None else f"a{action}"
        flags = ("T" if node.terminal else "") + ("L" if node.looped else "") or "-"
        state = ",".join(_fmt(v) for v in node.state)
        edges = " ".join(f"{a}:({e.n},{e.n_tilde},{_fmt(e.q)})" for a, e in enumerate(node.edges))
        lines.append(
            f"{'  ' * node.depth}{label} s=({state}) {flags} sigma={_fmt(node.sigma)} n={node.n} | {edges}"
        )
    return "\n".join(lines) + "\n"
