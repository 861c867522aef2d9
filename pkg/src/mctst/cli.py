"""Command-line entry point: ``mctst-bench``."""

from __future__ import annotations

import argparse
import logging
import sys

from mctst.bench import ExperimentConfig, aggregate, run_experiment


def _csv_list(cast):
    def parse(text: str):
        return [cast(item) for item in text.split(",") if item.strip()]

    return parse


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mctst-bench",
        description="Run MCTS / MCTS-T / MCTS-T+ planning episodes over a budget grid.",
    )
    p.add_argument("--config", help="YAML experiment file; flags given here override it")
    p.add_argument("--env", help='environment, e.g. "chain:10", "cyclic_chain:25", "gridlake:8x8", "cartpole"')
    p.add_argument("--variant", type=_csv_list(str), help="comma list of vanilla,mcts_t,mcts_t_plus")
    p.add_argument("--budget", type=_csv_list(int), help="comma list of traces per timestep")
    p.add_argument("--episodes", type=int)
    p.add_argument("--step-cap", type=int)
    p.add_argument("--c", type=float, help="exploration constant")
    p.add_argument("--gamma", type=float)
    p.add_argument("--eta", type=float, help="loop-detection L2 threshold")
    p.add_argument("--rollout-depth", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--early-stop", action="store_true", default=None,
                   help="stop a search once the root subtree is fully enumerated")
    p.add_argument("--loop-value-mode", choices=("saturating", "zero"))
    p.add_argument("--recommend", choices=("count", "value"),
                   help="override the variant's root recommendation rule")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--no-timing", dest="record_timing", action="store_false", default=None,
                   help="write 0 in the timing column so the CSV is byte-reproducible")
    p.add_argument("--out", help="output directory")
    p.add_argument("--dump-trees", action="store_true", default=None,
                   help="write the first planning tree of every episode")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {
        "env": args.env,
        "variants": args.variant,
        "budgets": args.budget,
        "episodes": args.episodes,
        "step_cap": args.step_cap,
        "c": args.c,
        "gamma": args.gamma,
        "eta": args.eta,
        "rollout_depth": args.rollout_depth,
        "seed": args.seed,
        "early_stop": args.early_stop,
        "loop_value_mode": args.loop_value_mode,
        "recommend": args.recommend,
        "workers": args.workers,
        "record_timing": args.record_timing,
        "out": args.out,
        "dump_trees": args.dump_trees,
    }
    if args.config:
        return ExperimentConfig.from_file(args.config, **overrides)
    return ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
        results = run_experiment(config)
    except (ValueError, OSError) as exc:
        print(f"mctst-bench: error: {exc}", file=sys.stderr)
        return 2
    for row in aggregate(results):
        print(
            f"{row.variant:12s} budget={row.budget:<6d} return={row.mean_return:.4f} "
            f"+- {row.stderr_return:.4f} steps={row.mean_steps:.1f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
