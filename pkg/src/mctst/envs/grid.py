"""Deterministic FrozenLake-style grid world.

Maps are plain text, one row per line, using ``S`` (start), ``F`` (frozen),
``H`` (hole) and ``G`` (goal). Actions follow the FrozenLake convention:
0 left, 1 down, 2 right, 3 up. Moving off the grid leaves the agent in
place. Entering a hole ends the episode with reward 0, entering the goal
ends it with reward 1.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from mctst.mdp import ContractViolation, Environment, State, StepOutcome

Cell = tuple[int, int]

MOVES: tuple[Cell, ...] = ((0, -1), (1, 0), (0, 1), (-1, 0))
BUILTIN_MAPS = ("4x4", "8x8")


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int
    holes: frozenset[Cell]
    goal: Cell
    start: Cell = (0, 0)

    def __post_init__(self):
        for name, cell in (("start", self.start), ("goal", self.goal)):
            if not self.in_bounds(cell):
                raise ValueError(f"{name} {cell} outside {self.height}x{self.width} grid")
            if cell in self.holes:
                raise ValueError(f"{name} {cell} is a hole")
        if not self._goal_reachable():
            raise ValueError("goal is not reachable from start")

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.height and 0 <= cell[1] < self.width

    def _goal_reachable(self) -> bool:
        seen = {self.start}
        queue = deque([self.start])
        while queue:
            row, col = queue.popleft()
            if (row, col) == self.goal:
                return True
            for dr, dc in MOVES:
                nxt = (row + dr, col + dc)
                if self.in_bounds(nxt) and nxt not in self.holes and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return False

    @classmethod
    def from_text(cls, text: str) -> "GridSpec":
        rows = [line.strip() for line in text.strip().splitlines() if line.strip()]
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("grid map must be a non-empty rectangle")
        holes, start, goal = set(), None, None
        for r, line in enumerate(rows):
            for c, ch in enumerate(line):
                if ch == "H":
                    holes.add((r, c))
                elif ch == "S":
                    start = (r, c)
                elif ch == "G":
                    goal = (r, c)
                elif ch != "F":
                    raise ValueError(f"unexpected map character {ch!r} at ({r}, {c})")
        if start is None or goal is None:
            raise ValueError("grid map needs exactly one S and one G")
        return cls(len(rows[0]), len(rows), frozenset(holes), goal, start)

    @classmethod
    def load(cls, name_or_path: str | Path) -> "GridSpec":
        """Load a builtin map (``"4x4"``, ``"8x8"``) or a map file."""
        if str(name_or_path) in BUILTIN_MAPS:
            text = resources.files("mctst.envs").joinpath(f"data/{name_or_path}.txt").read_text()
        else:
            text = Path(name_or_path).read_text()
        return cls.from_text(text)

    @classmethod
    def open_grid(cls, size: int) -> "GridSpec":
        """Hole-free ``size`` x ``size`` grid with the goal in the far corner."""
        return cls(size, size, frozenset(), (size - 1, size - 1), (0, 0))


class GridLake(Environment):
    num_actions = 4

    def __init__(self, spec: GridSpec | None = None):
        self.spec = spec or GridSpec.load("4x4")
        self.name = f"gridlake:{self.spec.height}x{self.spec.width}"
        self._holes = self.spec.holes
        self._goal = self.spec.goal
        self._h = self.spec.height
        self._w = self.spec.width

    def reset(self, seed: int = 0) -> State:
        return (float(self.spec.start[0]), float(self.spec.start[1]))

    def step(self, state: State, action: int) -> StepOutcome:
        if not 0 <= action < 4:
            self.check_action(action)
        row, col = int(state[0]), int(state[1])
        cell = (row, col)
        if not (0 <= row < self._h and 0 <= col < self._w):
            raise ContractViolation(f"cell {cell} outside the grid")
        if cell in self._holes or cell == self._goal:
            raise ContractViolation(f"cannot step from terminal cell {cell}")
        dr, dc = MOVES[action]
        nr, nc = row + dr, col + dc
        if not (0 <= nr < self._h and 0 <= nc < self._w):
            return StepOutcome(state, 0.0, False)
        nxt = (nr, nc)
        if nxt == self._goal:
            return StepOutcome((float(nr), float(nc)), 1.0, True)
        return StepOutcome((float(nr), float(nc)), 0.0, nxt in self._holes)
