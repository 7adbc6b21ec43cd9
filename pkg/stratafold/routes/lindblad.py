"""lindblad sub-command: integrate a Lindblad spec and write the trajectory."""

import logging

from pydantic import ValidationError

from stratafold.config import CommandKind
from stratafold.errors import ConfigError
from stratafold.models.documents import LindbladDocument
from stratafold.models.run_config import RunConfig
from stratafold.output import Table, write_table
from stratafold.services.lindblad import integrate, rank_transitions

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        CommandKind.LINDBLAD.value,
        parents=parents,
        help="Integrate Lindblad dynamics with stratum tracking",
        description="RK4 integration of a Lindblad spec read from --config.",
    )
    parser.add_argument("--stride", type=int, help="Record every stride-th step")
    parser.add_argument("--backward", action="store_true", default=None, help="Integrate towards negative time")
    parser.set_defaults(handler=run_lindblad)


def load_document(cfg: RunConfig) -> LindbladDocument:
    if not cfg.payload:
        raise ConfigError("lindblad needs a --config file holding the Lindblad spec")
    try:
        return LindbladDocument.model_validate(cfg.payload)
    except ValidationError as e:
        raise ConfigError(f"invalid Lindblad document: {e.errors()[0]['msg']}") from e


def run_lindblad(cfg: RunConfig) -> int:
    """
    Integrate the configured spec and write one row per sample.

    Columns: tau, x_1 .. x_{n^2-1}, purity, min_eig, rank.
    """
    document = load_document(cfg)
    spec = document.to_spec()
    rho0 = document.to_state()
    logger.info(f"Integrating {spec} for t_max={cfg.t_max} dt={cfg.dt}")

    trajectory = integrate(spec, rho0, cfg.t_max, cfg.dt, backward=cfg.backward, stride=cfg.stride)

    n = spec.dim
    columns = ["tau"] + [f"x_{mu}" for mu in range(1, n * n)] + ["purity", "min_eig", "rank"]
    table = Table(columns)
    for sample in trajectory:
        table.add_row([sample.tau, *sample.coords[1:], sample.purity, sample.min_eigenvalue, sample.rank])
    for event in rank_transitions(trajectory):
        table.comments.append(
            f"rank {event.rank_before}->{event.rank_after} between tau={event.tau_before:.17g} and tau={event.tau_after:.17g}"
        )
    write_table(table, cfg.output, cfg.format)
    return 0
