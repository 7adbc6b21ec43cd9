"""fisher sub-command: square-root embedding of probability vectors and the pullback residual."""

import logging

import numpy as np
from pydantic import ValidationError

from stratafold.config import CommandKind
from stratafold.errors import ConfigError
from stratafold.models.documents import ProbabilityDocument
from stratafold.models.run_config import RunConfig
from stratafold.output import Table, write_table
from stratafold.services.statgeom import (
    ProbabilityVector,
    pullback_residual,
    random_tangent,
    sqrt_embed,
)

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        CommandKind.FISHER.value,
        parents=parents,
        help="Fisher-Rao metric against the square-root sphere embedding",
        description="Evaluates the configured probability vector, or --samples random interior points.",
    )
    parser.add_argument("--outcomes", type=int, help="Number of outcomes for sampled points")
    parser.set_defaults(handler=run_fisher)


def _points(cfg: RunConfig, rng: np.random.Generator):
    if cfg.payload:
        try:
            return [ProbabilityDocument.model_validate(cfg.payload).to_vector()]
        except ValidationError as e:
            raise ConfigError(f"invalid probability document: {e.errors()[0]['msg']}") from e
    return [ProbabilityVector.random_interior(cfg.outcomes, rng) for _ in range(cfg.samples)]


def run_fisher(cfg: RunConfig) -> int:
    """
    Write index, p_j, x_j = sqrt(p_j) and the pullback residual per point.

    Raises:
        BoundaryPointError: A configured point lies on a face of the simplex
    """
    rng = np.random.default_rng(cfg.seed)
    points = _points(cfg, rng)
    size = points[0].size
    table = Table(["index"] + [f"p_{j}" for j in range(1, size + 1)] + [f"x_{j}" for j in range(1, size + 1)] + ["residual"])
    for index, p in enumerate(points):
        u, v = random_tangent(p.size, rng), random_tangent(p.size, rng)
        table.add_row([index, *p.values, *sqrt_embed(p), pullback_residual(p, u, v)])
    write_table(table, cfg.output, cfg.format)
    logger.info(f"Evaluated {len(points)} probability vectors")
    return 0
