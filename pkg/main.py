"""Gelfand-Shilov weight toolkit - scenario command line"""

import argparse
import sys
from typing import Optional

from src.agents.scenario_runner import EXIT_CONFIG, EXIT_OK, list_jobs, load_scenario, run_scenario
from src.utils.config import settings
from src.utils.errors import ConfigError
from src.utils.logger import logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Numerical verification of weight-family, conjugate and seminorm inequalities"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run the jobs of a scenario file")
    run.add_argument("file", help="Scenario YAML file")
    run.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="Jobs executed in parallel (default: 1)"
    )
    run.add_argument(
        "--seed",
        type=int,
        default=settings.default_seed,
        help=f"Seed for random test points (default: {settings.default_seed:#x})"
    )
    run.add_argument(
        "--out",
        default=None,
        help="Output directory (default: the scenario's output_dir, else settings.output_dir)"
    )
    run.add_argument(
        "--list",
        action="store_true",
        help="List the jobs without running them"
    )
    run.add_argument(
        "--budget-scale",
        type=float,
        default=1.0,
        help="Multiply every truncation budget, for convergence studies"
    )
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point; returns the exit status"""
    args = build_parser().parse_args(argv)

    if args.list:
        try:
            scenario = load_scenario(args.file)
        except ConfigError as e:
            logger.error(f"Config error: {e}")
            return EXIT_CONFIG
        for line in list_jobs(scenario):
            print(line)
        return EXIT_OK

    return run_scenario(
        args.file,
        jobs=args.jobs,
        seed=args.seed,
        out=args.out,
        budget_scale=args.budget_scale,
    )


if __name__ == "__main__":
    sys.exit(main())
