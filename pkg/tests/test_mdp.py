import math
import random

import pytest

from mctst import ContractViolation, make_env
from mctst.mdp import StepOutcome, as_state

ENV_NAMES = ["chain:10", "cyclic_chain:10", "gridlake:4x4", "gridlake:8x8", "cartpole", "random_tree:3,5"]


def _random_pairs(env, count, seed=0):
    """Reachable (state, action) pairs gathered by random walks from the start."""
    rng = random.Random(seed)
    pairs = []
    state = env.reset(seed)
    while len(pairs) < count:
        action = rng.randrange(env.num_actions)
        pairs.append((state, action))
        out = env.step(state, action)
        state = env.reset(rng.randrange(100)) if out.terminal else out.next_state
    return pairs


@pytest.mark.parametrize("name", ENV_NAMES)
def test_step_is_deterministic_over_1000_pairs(name):
    env = make_env(name)
    pairs = _random_pairs(env, 1000)
    first = [env.step(s, a) for s, a in pairs]
    second = [env.step(s, a) for s, a in pairs]
    assert first == second
    assert all(isinstance(o, StepOutcome) for o in first)


@pytest.mark.parametrize("name", ENV_NAMES)
def test_interleaved_stepping_does_not_change_outcomes(name):
    env = make_env(name)
    pairs = _random_pairs(env, 300, seed=1)
    in_order = [env.step(s, a) for s, a in pairs]
    shuffled = list(range(len(pairs)))
    random.Random(5).shuffle(shuffled)
    out_of_order = {i: env.step(*pairs[i]) for i in shuffled}
    assert [out_of_order[i] for i in range(len(pairs))] == in_order


@pytest.mark.parametrize("name", ENV_NAMES)
def test_states_have_fixed_dimension_and_finite_entries(name):
    env = make_env(name)
    dims = set()
    for s, a in _random_pairs(env, 500, seed=2):
        out = env.step(s, a)
        dims.add(len(s))
        dims.add(len(out.next_state))
        assert all(math.isfinite(v) for v in out.next_state)
        assert math.isfinite(out.reward)
    assert len(dims) == 1


@pytest.mark.parametrize("name", ENV_NAMES)
def test_out_of_range_action_is_a_contract_violation(name):
    env = make_env(name)
    state = env.reset(0)
    for bad in (-1, env.num_actions):
        with pytest.raises(ContractViolation):
            env.step(state, bad)


@pytest.mark.parametrize("name", [n.replace("cyclic_chain:10", "cyclic_chain:3") for n in ENV_NAMES])
def test_stepping_from_terminal_is_a_contract_violation(name):
    env = make_env(name)
    for s, a in _random_pairs(env, 2000, seed=3):
        out = env.step(s, a)
        if out.terminal:
            with pytest.raises(ContractViolation):
                env.step(out.next_state, 0)
            return
    pytest.fail("no terminal transition found")


@pytest.mark.parametrize(
    "name, expected", [("chain:7", 2), ("cyclic_chain:7", 2), ("gridlake:4x4", 4), ("cartpole", 2)]
)
def test_num_actions(name, expected):
    assert make_env(name).num_actions == expected


def test_as_state_rejects_non_finite():
    assert as_state([1, 2]) == (1.0, 2.0)
    with pytest.raises(ContractViolation):
        as_state([0.0, float("nan")])


def test_unknown_environment_name():
    with pytest.raises(ValueError, match="unknown environment"):
        make_env("pong")
