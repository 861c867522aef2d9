"""Benchmark environments and lookup by name."""

from __future__ import annotations

from mctst.envs.cartpole import CartPoleDet, CartPoleSpec
from mctst.envs.chain import Chain, ChainSpec, CyclicChain
from mctst.envs.grid import GridLake, GridSpec
from mctst.envs.random_tree import RandomTreeMDP
from mctst.mdp import Environment

__all__ = [
    "CartPoleDet",
    "CartPoleSpec",
    "Chain",
    "ChainSpec",
    "CyclicChain",
    "GridLake",
    "GridSpec",
    "RandomTreeMDP",
    "make_env",
    "parse_env_string",
]


def _chain(length=10, scheme="seed-hashed", seed=0, cls=Chain):
    return cls(ChainSpec(int(length), scheme, int(seed)))


def _cyclic(length=10, scheme="seed-hashed", seed=0):
    return _chain(length, scheme, seed, cls=CyclicChain)


def _gridlake(map="4x4", open=None):
    if open is not None:
        return GridLake(GridSpec.open_grid(int(open)))
    return GridLake(GridSpec.load(str(map)))


def _cartpole(config=None):
    return CartPoleDet(CartPoleSpec.load(config))


def _random_tree(num_actions=2, depth=6, terminal_prob=0.3, goal_prob=0.3, seed=0):
    return RandomTreeMDP(
        int(num_actions), int(depth), float(terminal_prob), float(goal_prob), int(seed)
    )


_REGISTRY = {
    "chain": _chain,
    "cyclic_chain": _cyclic,
    "gridlake": _gridlake,
    "cartpole": _cartpole,
    "random_tree": _random_tree,
}


def parse_env_string(text: str) -> tuple[str, list[str], dict[str, str]]:
    """Split ``"name:arg1,key=value"`` into name, positional and keyword parts."""
    name, _, rest = text.partition(":")
    args: list[str] = []
    kwargs: dict[str, str] = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        if "=" in item:
            key, _, value = item.partition("=")
            kwargs[key.strip().replace("-", "_")] = value.strip()
        else:
            args.append(item)
    return name.strip().replace("-", "_"), args, kwargs


def make_env(text: str, *args, **kwargs) -> Environment:
    """Build an environment from a name such as ``"chain:25"`` or ``"gridlake:8x8"``.

    Extra positional and keyword arguments are appended to those parsed from
    ``text``.
    """
    name, parsed_args, parsed_kwargs = parse_env_string(text)
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown environment {name!r}; choose from {sorted(_REGISTRY)}"
        ) from None
    env = factory(*parsed_args, *args, **{**parsed_kwargs, **kwargs})
    env.name = text
    return env
