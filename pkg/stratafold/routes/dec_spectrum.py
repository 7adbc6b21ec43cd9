"""dec-spectrum sub-command: Dirac-Kahler spectrum of a ring against the lattice dispersion."""

import logging

from stratafold.config import CommandKind
from stratafold.models.run_config import RunConfig
from stratafold.output import Table, write_table
from stratafold.services.dec import SimplicialRing, spectrum_table

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        CommandKind.DEC_SPECTRUM.value,
        parents=parents,
        help="Dirac-Kahler spectrum on a periodic ring",
        description="Eigenvalues of i(d - delta) on a ring of --sites vertices with edge length --spacing.",
    )
    parser.set_defaults(handler=run_dec_spectrum)


def run_dec_spectrum(cfg: RunConfig) -> int:
    """Write m, k_m, numeric and analytic eigenvalues; the last line reports the worst error."""
    spacing = cfg.payload.get("lengths", cfg.spacing)
    ring = SimplicialRing(cfg.sites, spacing)
    rows = spectrum_table(ring)

    table = Table(["m", "k_m", "eig_numeric", "eig_analytic", "abs_error"])
    for row in rows:
        table.add_row([row.m, row.k_m, row.numeric, row.analytic, row.abs_error])
    errors = [row.abs_error for row in rows if row.abs_error is not None]
    if errors:
        worst = max(errors)
        table.comments.append(f"max_abs_error={worst:.17g}")
        logger.info(f"{ring}: max dispersion error {worst:.3e}")
    else:
        table.comments.append("max_abs_error=n/a (non-uniform ring)")
    write_table(table, cfg.output, cfg.format)
    return 0
