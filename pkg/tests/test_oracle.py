import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import TableMDP
from mctst import OracleRefusal, enumerate_tree, make_env
from mctst.envs import RandomTreeMDP


@pytest.mark.parametrize("n", range(3, 15))
def test_chain_counts(n):
    env = make_env(f"chain:{n},seed={n}")
    for loop_aware in (False, True):
        rep = enumerate_tree(env, env.reset(), n + 1, loop_aware=loop_aware)
        assert rep.terminating_trace_count == n + 1
        # one terminal child per position plus the advancing child
        assert rep.node_count == 2 * n + 1
        assert rep.optimal_first_action == {env.spec.correct_action(1)}
        assert not rep.depth_capped


def test_chain_ten():
    rep = enumerate_tree(make_env("chain:10"), (1.0,), 20)
    assert (rep.optimal_return, rep.terminating_trace_count) == (1.0, 11)


def test_discounted_chain_return():
    rep = enumerate_tree(make_env("chain:6"), (1.0,), 10, gamma=0.9)
    assert rep.optimal_return == pytest.approx(0.9**5)


def test_depth_cap_below_solution_depth():
    rep = enumerate_tree(make_env("chain:3"), (1.0,), 1)
    assert rep.depth_capped
    assert rep.optimal_return == 0.0


def test_cyclic_chain_loop_pruned_tree_matches_plain_chain():
    cyclic = enumerate_tree(make_env("cyclic_chain:3"), (1.0,), 50, loop_aware=True)
    plain = enumerate_tree(make_env("chain:3"), (1.0,), 50)
    assert cyclic.node_count == plain.node_count == 7
    assert cyclic.optimal_return == 1.0 and not cyclic.depth_capped


def test_cyclic_chain_without_loop_pruning_hits_the_cap():
    rep = enumerate_tree(make_env("cyclic_chain:3"), (1.0,), 8)
    assert rep.depth_capped


def test_ties_report_every_optimal_action():
    env = TableMDP({(0,): [((1,), 1, True), ((2,), 0, True), ((3,), 1, True)]}, (0,), num_actions=3)
    rep = enumerate_tree(env, (0.0,), 2)
    assert rep.optimal_first_action == {0, 2}
    assert rep.first_action_values == (1.0, 0.0, 1.0)


def test_refuses_oversized_enumeration():
    with pytest.raises(OracleRefusal):
        enumerate_tree(make_env("gridlake:open=6"), (0.0, 0.0), 12, max_nodes=1000)


def test_rejects_non_positive_cap():
    with pytest.raises(ValueError):
        enumerate_tree(make_env("chain:3"), (1.0,), 0)


def _brute_force(env, depth):
    """Best return over every full-length action sequence, ignoring actions after termination."""
    best = {}
    for seq in itertools.product(range(env.num_actions), repeat=depth):
        state, total = env.reset(), 0.0
        for a in seq:
            state, r, done = env.step(state, a)
            total += r
            if done:
                break
        best[seq[0]] = max(best.get(seq[0], float("-inf")), total)
    return best


@settings(max_examples=40, deadline=None)
@given(
    num_actions=st.integers(2, 3), depth=st.integers(1, 6),
    terminal_prob=st.floats(0, 0.7), goal_prob=st.floats(0, 1), seed=st.integers(0, 10**6),
)
def test_random_trees_agree_with_brute_force(num_actions, depth, terminal_prob, goal_prob, seed):
    env = RandomTreeMDP(num_actions, depth, terminal_prob, goal_prob, seed)
    rep = enumerate_tree(env, env.reset(), depth)
    best = _brute_force(env, depth)
    top = max(best.values())
    assert rep.optimal_return == top
    assert rep.optimal_first_action == {a for a, v in best.items() if v == top}
    assert not rep.depth_capped
    assert rep.node_count >= 1 + num_actions
