"""Command-line entry point.

    simulate --config cfg.json --strategy all --scenarios 500 \
             --iterations 2000 --aps 8 --seed 1 --workers 4 --out results/

Flags override config-file values. A single --aps value produces the
batch outputs (fig3..fig6 CSVs); several values produce the density
comparison (fig7). A summary JSON is always written.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .agents import Strategy
from .errors import MlosimError
from .harness import ALL_STRATEGIES, ExperimentConfig, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Multi-link Wi-Fi link-activation simulator",
    )
    parser.add_argument("--config", help="JSON file mirroring ExperimentConfig fields")
    parser.add_argument(
        "--strategy",
        choices=[s.value for s in Strategy] + ["all"],
        help="run a single strategy instead of all four",
    )
    parser.add_argument("--scenarios", type=int, help="number of sampled worlds")
    parser.add_argument("--iterations", type=int, help="iterations per run")
    parser.add_argument(
        "--aps", help="comma-separated AP counts, e.g. 8 or 2,4,8,12,16"
    )
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--workers", type=int, help="parallel scenario workers")
    parser.add_argument("--out", help="output directory")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    config = ExperimentConfig.from_json_dict(data)

    overrides: dict = {}
    if args.strategy:
        overrides["strategies"] = (
            ALL_STRATEGIES if args.strategy == "all" else (Strategy.from_name(args.strategy),)
        )
    if args.scenarios is not None:
        overrides["num_scenarios"] = args.scenarios
    if args.iterations is not None:
        overrides["iterations"] = args.iterations
    if args.aps is not None:
        overrides["n_values"] = tuple(int(v) for v in args.aps.split(","))
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["output_dir"] = args.out
    return replace(config, **overrides) if overrides else config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        summaries = run_experiment(config)
    except (MlosimError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"simulate: error: {exc}", file=sys.stderr)
        return 1
    for n, summary in summaries.items():
        for strategy, stats in summary.per_strategy.items():
            print(
                f"n={n} {strategy.value:6s} mean min rate = "
                f"{stats.mean_min_rate_bps / 1e6:.3f} Mbps "
                f"(p90 {stats.p90_bps / 1e6:.3f} Mbps)"
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
