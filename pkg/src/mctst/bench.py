"""Episode and experiment harness: per-timestep planning, budget sweeps, CSV output."""

from __future__ import annotations

import csv
import io
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import yaml

from mctst.envs import make_env
from mctst.mdp import Environment
from mctst.planners import VARIANTS, SearchConfig, run_search
from mctst.seeding import stable_hash
from mctst.tree import dump_tree

log = logging.getLogger(__name__)

EPISODE_HEADER = ("env", "variant", "budget", "episode", "seed", "return", "steps", "mean_plan_ms")
AGGREGATE_HEADER = (
    "env", "variant", "budget", "episodes", "mean_return", "stderr_return", "mean_steps",
)
SEED_MODULUS = 2**31


@dataclass
class EpisodeResult:
    env: str
    variant: str
    budget: int
    episode: int
    seed: int
    total_return: float
    steps: int
    mean_plan_ms: float
    traces_used: list[int] = field(default_factory=list, repr=False)
    root_sigmas: list[float] = field(default_factory=list, repr=False)
    plan_seconds: float = 0.0

    @property
    def seconds_per_trace(self) -> float:
        total = sum(self.traces_used)
        return self.plan_seconds / total if total else 0.0


def run_episode(
    env: Environment,
    config: SearchConfig,
    step_cap: int,
    seed: int,
    reset_seed: Optional[int] = None,
    episode: int = 0,
    dump_path: Optional[Path] = None,
) -> EpisodeResult:
    """Play one episode, planning from scratch with ``config`` at every real step.

    ``seed`` drives the planner; ``reset_seed`` (default ``seed``) drives the
    initial state. When ``dump_path`` is given the first planning tree is
    written there.
    """
    state = env.reset(seed if reset_seed is None else reset_seed)
    total = 0.0
    steps = 0
    traces_used: list[int] = []
    sigmas: list[float] = []
    plan_seconds = 0.0
    while steps < step_cap:
        step_config = replace(config, seed=stable_hash(seed, steps), horizon=step_cap - steps)
        start = time.perf_counter()
        result = run_search(env, state, step_config)
        plan_seconds += time.perf_counter() - start
        traces_used.append(result.traces_used)
        sigmas.append(result.root_sigma)
        if dump_path is not None and steps == 0:
            dump_path.parent.mkdir(parents=True, exist_ok=True)
            dump_path.write_text(dump_tree(result.tree))
        outcome = env.step(state, result.recommended)
        total += outcome.reward
        steps += 1
        if outcome.terminal:
            break
        state = outcome.next_state
    return EpisodeResult(
        env=env.name,
        variant=config.variant,
        budget=config.budget,
        episode=episode,
        seed=seed,
        total_return=total,
        steps=steps,
        mean_plan_ms=1000.0 * plan_seconds / steps if steps else 0.0,
        traces_used=traces_used,
        root_sigmas=sigmas,
        plan_seconds=plan_seconds,
    )


@dataclass
class ExperimentConfig:
    """A full (variant x budget x episode) grid on one environment.

    ``step_cap`` and ``eta`` left as ``None`` fall back to the environment's
    defaults. ``out`` is a directory receiving ``episodes.csv``,
    ``aggregate.csv``, ``plot.dat`` and, with ``dump_trees``, ``trees/``.
    """

    env: str = "chain:10"
    variants: list[str] = field(default_factory=lambda: list(VARIANTS))
    budgets: list[int] = field(default_factory=lambda: [2**k for k in range(3, 12)])
    episodes: int = 25
    step_cap: Optional[int] = None
    c: float = 1.0
    gamma: float = 1.0
    eta: Optional[float] = None
    rollout_depth: Optional[int] = None
    early_stop: bool = False
    loop_value_mode: str = "saturating"
    value_bound: float = 1e6
    recommend: Optional[str] = None
    include_leaf_estimate: bool = True
    seed: int = 0
    out: Optional[str] = None
    dump_trees: bool = False
    record_timing: bool = True
    workers: int = 1

    def __post_init__(self):
        if not self.variants:
            raise ValueError("need at least one variant")
        for v in self.variants:
            if v not in VARIANTS:
                raise ValueError(f"unknown variant {v!r}; choose from {VARIANTS}")
        if not self.budgets or any(b < 1 for b in self.budgets):
            raise ValueError("budgets must be positive")
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.step_cap is not None and self.step_cap < 0:
            raise ValueError("step_cap must be >= 0")

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        """Load a YAML (or JSON) mapping and apply non-``None`` ``overrides``."""
        data = yaml.safe_load(Path(path).read_text()) or {}
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def search_config(self, variant: str, budget: int) -> SearchConfig:
        return SearchConfig(
            variant=variant,
            c=self.c,
            gamma=self.gamma,
            budget=budget,
            rollout_depth=self.rollout_depth,
            eta=self.eta,
            early_stop=self.early_stop,
            loop_value_mode=self.loop_value_mode,
            value_bound=self.value_bound,
            recommend=self.recommend,
            include_leaf_estimate=self.include_leaf_estimate,
        )


def episode_seed(base_seed: int, variant: str, budget: int, episode: int) -> int:
    return stable_hash(base_seed, variant, budget, episode) % SEED_MODULUS


def reset_seed(base_seed: int, episode: int) -> int:
    """Initial-state seed, shared across variants and budgets so cells are paired."""
    return stable_hash(base_seed, "reset", episode) % SEED_MODULUS


def _run_cell(args) -> EpisodeResult:
    cfg, variant, budget, episode = args
    env = make_env(cfg.env)
    step_cap = env.default_step_cap if cfg.step_cap is None else cfg.step_cap
    dump = None
    if cfg.dump_trees and cfg.out is not None:
        dump = Path(cfg.out) / "trees" / f"{variant}_b{budget}_e{episode}.txt"
    return run_episode(
        env,
        cfg.search_config(variant, budget),
        step_cap,
        episode_seed(cfg.seed, variant, budget, episode),
        reset_seed=reset_seed(cfg.seed, episode),
        episode=episode,
        dump_path=dump,
    )


def run_experiment(config: ExperimentConfig) -> list[EpisodeResult]:
    """Run every (variant, budget, episode) cell and write outputs if ``config.out`` is set."""
    out = None
    if config.out is not None:
        out = Path(config.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / ".write_test").write_text("")
            (out / ".write_test").unlink()
        except OSError as exc:
            raise OSError(f"output path {out} is not writable: {exc}") from exc

    cells = [
        (config, v, b, i)
        for v in config.variants
        for b in config.budgets
        for i in range(config.episodes)
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_cell, cells, chunksize=4))
    else:
        results = []
        for cell in cells:
            results.append(_run_cell(cell))
            r = results[-1]
            log.debug("%s b=%d ep=%d return=%.3f", r.variant, r.budget, r.episode, r.total_return)
    order = {v: k for k, v in enumerate(config.variants)}
    results.sort(key=lambda r: (order[r.variant], r.budget, r.episode))

    if out is not None:
        aggregates = aggregate(results)
        (out / "episodes.csv").write_text(episodes_csv(results, config.record_timing))
        (out / "aggregate.csv").write_text(aggregate_csv(aggregates))
        (out / "plot.dat").write_text(emit_plot_data(aggregates))
    return results


def _g(x: float) -> str:
    return f"{x:.6g}"


def episodes_csv(results: Iterable[EpisodeResult], record_timing: bool = True) -> str:
    """Per-episode CSV; without ``record_timing`` the timing column is 0 so output is reproducible."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EPISODE_HEADER)
    for r in results:
        writer.writerow(
            (
                r.env, r.variant, r.budget, r.episode, r.seed, _g(r.total_return), r.steps,
                _g(r.mean_plan_ms if record_timing else 0.0),
            )
        )
    return buf.getvalue()


@dataclass(frozen=True)
class AggregateRow:
    env: str
    variant: str
    budget: int
    episodes: int
    mean_return: float
    stderr_return: float
    mean_steps: float


def aggregate(results: Sequence[EpisodeResult]) -> list[AggregateRow]:
    """Mean and standard error of the return per (variant, budget), in first-seen order."""
    groups: dict[tuple[str, str, int], list[EpisodeResult]] = {}
    for r in results:
        groups.setdefault((r.env, r.variant, r.budget), []).append(r)
    rows = []
    for (env, variant, budget), rs in groups.items():
        returns = [r.total_return for r in rs]
        stderr = statistics.stdev(returns) / math.sqrt(len(returns)) if len(returns) > 1 else 0.0
        rows.append(
            AggregateRow(
                env, variant, budget, len(rs), statistics.fmean(returns), stderr,
                statistics.fmean(r.steps for r in rs),
            )
        )
    return rows


def aggregate_csv(rows: Iterable[AggregateRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AGGREGATE_HEADER)
    for row in rows:
        d = asdict(row)
        writer.writerow(
            [_g(d[k]) if isinstance(d[k], float) else d[k] for k in AGGREGATE_HEADER]
        )
    return buf.getvalue()


def emit_plot_data(rows: Iterable[AggregateRow]) -> str:
    """Whitespace-separated series blocks, one per variant, gnuplot ``index`` style.

    Each block starts with ``# series: <variant>`` followed by
    ``budget mean_return stderr_return`` lines; blocks are separated by two
    blank lines.
    """
    series: dict[str, list[AggregateRow]] = {}
    for row in rows:
        series.setdefault(row.variant, []).append(row)
    parts = ["# columns: budget mean_return stderr_return\n"]
    blocks = []
    for variant, rs in series.items():
        lines = [f"# series: {variant}"]
        lines += [f"{r.budget} {_g(r.mean_return)} {_g(r.stderr_return)}" for r in sorted(rs, key=lambda r: r.budget)]
        blocks.append("\n".join(lines) + "\n")
    parts.append("\n\n".join(blocks))
    return "".join(parts)
