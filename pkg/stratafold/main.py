import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

load_dotenv()

# Import sub-commands from the `stratafold` package so `python -m stratafold.main` resolves them
from stratafold import __version__
from stratafold.config import CommandKind, OutputFormat, numerics_config
from stratafold.errors import StratafoldError
from stratafold.models.run_config import RunConfig
from stratafold.routes import algebra_check, dec_spectrum, fisher, lindblad

logger = logging.getLogger(__name__)

# Flags every sub-command shares; values left as None fall back to the config file, then defaults
SHARED_FLAGS = ("t_max", "dt", "sites", "spacing", "format", "seed", "samples", "output")
COMMAND_FLAGS = ("stride", "backward", "outcomes", "suites")


def _shared_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", type=Path, help="JSON config file")
    shared.add_argument("--output", type=Path, help="Output file (stdout when omitted)")
    shared.add_argument("--t-max", dest="t_max", type=float, help="Integration window")
    shared.add_argument("--dt", type=float, help="Integration step")
    shared.add_argument("--sites", type=int, help="Ring size N")
    shared.add_argument("--spacing", type=float, help="Ring edge length l")
    shared.add_argument("--format", choices=[f.value for f in OutputFormat], help="Output format")
    shared.add_argument("--seed", type=int, help="Root seed for randomized runs")
    shared.add_argument("--samples", type=int, help="Randomized cases or sample points")
    return shared


def create_parser() -> argparse.ArgumentParser:
    """
    Parser factory for the stratafold command-line driver.

    Each route module registers its own sub-command and handler.
    """
    parser = argparse.ArgumentParser(
        prog="stratafold",
        description="Algebraic differential calculus, discrete exterior calculus and stratified quantum dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [_shared_parser()]

    lindblad.register(subparsers, parents)
    dec_spectrum.register(subparsers, parents)
    algebra_check.register(subparsers, parents)
    fisher.register(subparsers, parents)
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    overrides = {name: getattr(args, name, None) for name in SHARED_FLAGS + COMMAND_FLAGS}
    return RunConfig.from_sources(CommandKind(args.command), args.config, overrides)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one sub-command; returns the process exit code."""
    logging.basicConfig(
        level=numerics_config.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    parser = create_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return args.handler(cfg)
    except StratafoldError as e:
        logger.error(f"{type(e).__name__}: {e.detail}")
        sys.stderr.write(f"error: {e.detail}\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
