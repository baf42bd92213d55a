"""
CLI entry point for varsvm.

Usage:
    varsvm gen spec.json --seed 7 --output data.csv
    varsvm train data.csv --method variance --output model.json
    varsvm predict model.json data.csv
    varsvm compare data.csv --holdout test.csv
    varsvm verify data.csv
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from varsvm.cli.commands import CLICommands, method_names
from varsvm.core.models import DatasetError, GradientMode, InvalidHyperplaneError, SigmaMode
from varsvm.datagen import GaussianSpecError
from varsvm.logging import setup_logging
from varsvm.solvers.config import ConfigError, SolverConfig
from varsvm.storage.serializer import CompatibilityError, ModelFormatError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SPEC_ERROR = 2
EXIT_DATA_ERROR = 3
EXIT_COMPATIBILITY_ERROR = 4


def setup_cli_logging(verbose: bool = False) -> None:
    """DEBUG with --verbose, else LOG_LEVEL (default WARNING)."""
    if verbose:
        level = logging.DEBUG
    else:
        level = getattr(logging, os.environ.get("LOG_LEVEL", "WARNING").upper(), logging.WARNING)
    setup_logging(level=level)


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cost", type=float, help="Regularization C (default: 1.0)")
    parser.add_argument("--kkt-tol", type=float, help="KKT residual tolerance (default: 1e-6)")
    parser.add_argument("--outer-tol", type=float, help="Alternating-loop direction tolerance (default: 1e-8)")
    parser.add_argument("--max-outer", type=int, help="Alternating iterations allowed (default: 100)")
    parser.add_argument("--max-passes", type=int, help="Pair updates per point (default: 10000)")
    parser.add_argument(
        "--sigma-mode",
        choices=[mode.value for mode in SigmaMode],
        help="Directional sigma normalization (default: normalized)",
    )
    parser.add_argument(
        "--gradient-mode",
        choices=[mode.value for mode in GradientMode],
        help="Sigma-gradient expression for diagnostics (default: exact)",
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="Seed for every random choice (default: 0)")
    common.add_argument(
        "--verbose", "-v", action="store_true", help="Debug logging (and extra report detail)"
    )

    parser = argparse.ArgumentParser(
        prog="varsvm",
        description="Classical and variance-adjusted linear SVMs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Generate two Gaussian classes
  varsvm gen spec.json --seed 7 --output data.csv

  # Train and score
  varsvm train data.csv --method variance --cost 10 --output model.json
  varsvm predict model.json data.csv --output predictions.csv

  # Side-by-side report and self-checks
  varsvm compare data.csv --holdout test.csv
  varsvm verify data.csv

Exit codes:
  0  success (including flagged non-convergence)
  2  spec or configuration error
  3  data error
  4  model compatibility error
        """,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", parents=[common], help="Generate a Gaussian dataset")
    gen.add_argument("spec", help="Gaussian spec JSON file")
    gen.add_argument("--output", help="Dataset CSV path (default: standard output)")

    train = commands.add_parser("train", parents=[common], help="Train a model")
    train.add_argument("data", help="Labeled dataset CSV")
    train.add_argument("--method", choices=method_names(), default="variance", help="(default: variance)")
    train.add_argument("--output", default="model.json", help="Model JSON path (default: model.json)")
    _add_solver_flags(train)

    predict = commands.add_parser("predict", parents=[common], help="Score a dataset")
    predict.add_argument("model", help="Model JSON file")
    predict.add_argument("data", help="Dataset CSV (label column optional)")
    predict.add_argument("--output", help="Predictions CSV path (default: standard output)")

    compare = commands.add_parser("compare", parents=[common], help="Train both methods and compare")
    compare.add_argument("data", help="Labeled dataset CSV")
    compare.add_argument("--holdout", help="Held-out labeled dataset CSV")
    _add_solver_flags(compare)

    verify = commands.add_parser("verify", parents=[common], help="Run the verification battery")
    verify.add_argument("data", help="Labeled dataset CSV")
    _add_solver_flags(verify)

    return parser


def _config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig().with_overrides(
        cost=getattr(args, "cost", None),
        kkt_tol=getattr(args, "kkt_tol", None),
        outer_tol=getattr(args, "outer_tol", None),
        max_outer=getattr(args, "max_outer", None),
        max_passes=getattr(args, "max_passes", None),
        sigma_mode=getattr(args, "sigma_mode", None),
        gradient_mode=getattr(args, "gradient_mode", None),
        seed=args.seed,
    )


def _dispatch(args: argparse.Namespace) -> int:
    cli = CLICommands(config=_config(args), verbose=args.verbose)
    if args.command == "gen":
        return cli.gen(args.spec, args.output)
    if args.command == "train":
        return cli.train(args.data, args.method, args.output)
    if args.command == "predict":
        return cli.predict(args.model, args.data, args.output)
    if args.command == "compare":
        return cli.compare(args.data, args.holdout)
    return cli.verify(args.data)


def _fail(code: int, exc: Exception) -> int:
    print(f"❌ Error: {exc}", file=sys.stderr)
    logger.debug("command_failed", extra={"exit_code": code})
    return code


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    setup_cli_logging(verbose=args.verbose)

    try:
        return _dispatch(args)
    except (GaussianSpecError, ConfigError) as exc:
        return _fail(EXIT_SPEC_ERROR, exc)
    except (CompatibilityError, ModelFormatError) as exc:
        return _fail(EXIT_COMPATIBILITY_ERROR, exc)
    except (DatasetError, InvalidHyperplaneError) as exc:
        return _fail(EXIT_DATA_ERROR, exc)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
