"""algebra-check sub-command: run the invariant suites and report pass/fail per check."""

import logging
import sys

from pydantic import ValidationError

from stratafold.config import CommandKind
from stratafold.errors import ConfigError, InvariantFailure
from stratafold.models.documents import LieAlgebraDocument
from stratafold.models.run_config import RunConfig
from stratafold.output import Table, write_table
from stratafold.services.check_suites import run_suites

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        CommandKind.ALGEBRA_CHECK.value,
        parents=parents,
        help="Run the exterior, Clifford, quantum and DEC invariant suites",
        description="Randomized invariant checks; an optional --config adds a user Lie algebra.",
    )
    parser.add_argument("--suite", action="append", dest="suites", help="Run only the named suite (repeatable)")
    parser.set_defaults(handler=run_algebra_check)


def run_algebra_check(cfg: RunConfig) -> int:
    """
    Print one PASS/FAIL line per check.

    Raises:
        ConfigError: Malformed Lie algebra document or unknown suite name
        InvariantFailure: At least one check failed
    """
    user_spec = None
    if cfg.payload:
        try:
            user_spec = LieAlgebraDocument.model_validate(cfg.payload).to_spec()
        except ValidationError as e:
            raise ConfigError(f"invalid Lie algebra document: {e.errors()[0]['msg']}") from e
    try:
        results = run_suites(samples=cfg.samples, seed=cfg.seed, user_spec=user_spec, names=cfg.suites)
    except KeyError as e:
        raise ConfigError(str(e.args[0])) from e

    if cfg.output is None:
        for result in results:
            sys.stdout.write(result.line() + "\n")
    else:
        table = Table(["suite", "check", "max_residual", "tol", "passed"])
        for result in results:
            table.add_row([result.suite, result.name, result.max_residual, result.tol, result.passed])
        write_table(table, cfg.output, cfg.format)

    failed = [r for r in results if not r.passed]
    if failed:
        raise InvariantFailure(f"{len(failed)} of {len(results)} checks failed: " + ", ".join(f"{r.suite}/{r.name}" for r in failed))
    logger.info(f"All {len(results)} checks passed")
    return 0
