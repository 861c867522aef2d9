"""Deterministic cart-pole with explicit Euler integration.

The dynamics are the classic Barto-Sutton-Anderson cart-pole. The reward
is ``alive_reward`` per step while the cart and pole stay inside their
bounds and ``fail_reward`` (terminal) on the step that leaves them, so a
400-step survivor collects 2.0 at the default constants.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

from mctst.mdp import ContractViolation, Environment, State, StepOutcome


@dataclass(frozen=True)
class CartPoleSpec:
    gravity: float = 9.8
    mass_cart: float = 1.0
    mass_pole: float = 0.1
    half_length: float = 0.5
    force: float = 10.0
    dt: float = 0.02
    x_threshold: float = 2.4
    theta_threshold_deg: float = 12.0
    alive_reward: float = 0.005
    fail_reward: float = -1.0
    init_noise: float = 0.05

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "fail_reward" or f.name == "init_noise":
                continue
            if not value > 0:
                raise ValueError(f"{f.name} must be positive, got {value}")

    @property
    def theta_threshold(self) -> float:
        return math.radians(self.theta_threshold_deg)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "CartPoleSpec":
        """Read constants from a JSON file; ``None`` loads the bundled defaults."""
        if path is None:
            text = resources.files("mctst.envs").joinpath("data/cartpole.json").read_text()
        else:
            text = Path(path).read_text()
        return cls(**json.loads(text))


class CartPoleDet(Environment):
    """State is (cart position, cart velocity, pole angle, pole angular velocity)."""

    num_actions = 2
    default_eta = 1e-3

    def __init__(self, spec: CartPoleSpec | None = None):
        self.spec = spec or CartPoleSpec()
        self.name = "cartpole"
        s = self.spec
        self._total_mass = s.mass_cart + s.mass_pole
        self._pml = s.mass_pole * s.half_length
        self._theta_thr = s.theta_threshold

    def reset(self, seed: int = 0) -> State:
        rng = random.Random(seed)
        noise = self.spec.init_noise
        return tuple(rng.uniform(-noise, noise) for _ in range(4))

    def failed(self, state: State) -> bool:
        return abs(state[0]) > self.spec.x_threshold or abs(state[2]) > self._theta_thr

    def step(self, state: State, action: int) -> StepOutcome:
        if action != 0 and action != 1:
            self.check_action(action)
        if len(state) != 4:
            raise ContractViolation(f"cart-pole state must have 4 entries, got {len(state)}")
        if self.failed(state):
            raise ContractViolation(f"cannot step from failed state {state}")
        s = self.spec
        x, x_dot, theta, theta_dot = state
        force = s.force if action == 1 else -s.force
        cos_t = math.cos(theta)
        sin_t = math.sin(theta)
        temp = (force + self._pml * theta_dot * theta_dot * sin_t) / self._total_mass
        theta_acc = (s.gravity * sin_t - cos_t * temp) / (
            s.half_length * (4.0 / 3.0 - s.mass_pole * cos_t * cos_t / self._total_mass)
        )
        x_acc = temp - self._pml * theta_acc * cos_t / self._total_mass
        nxt = (
            x + s.dt * x_dot,
            x_dot + s.dt * x_acc,
            theta + s.dt * theta_dot,
            theta_dot + s.dt * theta_acc,
        )
        if self.failed(nxt):
            return StepOutcome(nxt, s.fail_reward, True)
        return StepOutcome(nxt, s.alive_reward, False)
