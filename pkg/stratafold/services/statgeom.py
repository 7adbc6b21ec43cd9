"""
Classical probability simplex with the Fisher-Rao metric.

The square-root map p -> sqrt(p) sends the simplex onto the positive
octant of the unit sphere and pulls the round metric back to
g_jk = delta_jk / (4 p_j). Faces of the simplex (some p_j = 0) are
stratum boundaries where metric queries raise instead of returning inf.
"""

import logging
from typing import Sequence

import numpy as np

from stratafold.errors import BoundaryPointError, DomainError

logger = logging.getLogger(__name__)

SIMPLEX_TOL = 1e-12


class ProbabilityVector:
    """Nonnegative weights summing to one."""

    def __init__(self, values: Sequence[float], tol: float = SIMPLEX_TOL):
        p = np.array(values, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DomainError("probability vector must be a non-empty 1-D array")
        if not np.all(np.isfinite(p)):
            raise DomainError("probability vector entries must be finite")
        if np.any(p < 0):
            raise DomainError(f"probability vector has negative entries: {p[p < 0]}")
        if abs(p.sum() - 1.0) > tol:
            raise DomainError(f"probability vector sums to {p.sum():.17g}, not 1")
        p.setflags(write=False)
        self.values = p

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def support(self) -> int:
        """Number of outcomes with positive probability."""
        return int(np.count_nonzero(self.values))

    @property
    def is_interior(self) -> bool:
        return self.support == self.size

    @classmethod
    def uniform(cls, outcomes: int) -> "ProbabilityVector":
        return cls(np.full(outcomes, 1.0 / outcomes))

    @classmethod
    def random_interior(cls, outcomes: int, rng: np.random.Generator) -> "ProbabilityVector":
        """Dirichlet(1, ..., 1) sample, renormalized to absorb rounding."""
        p = rng.dirichlet(np.ones(outcomes))
        return cls(p / p.sum())

    def __repr__(self) -> str:
        return f"ProbabilityVector({self.values.tolist()})"


def _require_interior(p: ProbabilityVector, indices: Sequence[int]) -> None:
    for i in indices:
        if not 0 <= i < p.size:
            raise DomainError(f"outcome index {i} out of range for {p.size} outcomes")
        if p.values[i] == 0.0:
            raise BoundaryPointError(f"p_{i} = 0: the Fisher-Rao metric is undefined on this face")


def fisher_metric(p: ProbabilityVector, i: int, j: int) -> float:
    """
    Fisher-Rao metric component g_ij = delta_ij / (4 p_i).

    Args:
        p: Point of the simplex
        i: Row index
        j: Column index

    Returns:
        The metric component

    Raises:
        BoundaryPointError: p_i or p_j vanishes
    """
    _require_interior(p, (i, j))
    if i != j:
        return 0.0
    return 1.0 / (4.0 * p.values[i])


def fisher_metric_matrix(p: ProbabilityVector) -> np.ndarray:
    _require_interior(p, range(p.size))
    return np.diag(1.0 / (4.0 * p.values))


def sqrt_embed(p: ProbabilityVector) -> np.ndarray:
    """x_j = sqrt(p_j), a point on the positive octant of the unit sphere."""
    return np.sqrt(p.values)


def sqrt_embed_inverse(x: Sequence[float]) -> ProbabilityVector:
    return ProbabilityVector(np.square(np.asarray(x, dtype=float)))


def random_tangent(outcomes: int, rng: np.random.Generator) -> np.ndarray:
    """Random vector with zero sum, tangent to the simplex."""
    u = rng.standard_normal(outcomes)
    return u - u.mean()


def pullback_residual(p: ProbabilityVector, u: Sequence[float], v: Sequence[float], tol: float = 1e-9) -> float:
    """
    |g_Fisher(u, v) - <D sqrt(p) u, D sqrt(p) v>| for tangent vectors u, v.

    The differential of the square-root map is dx_j = dp_j / (2 sqrt(p_j)).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (p.size,) or v.shape != (p.size,):
        raise DomainError(f"tangent vectors need {p.size} components")
    scale = max(1.0, float(np.max(np.abs(u), initial=0.0)), float(np.max(np.abs(v), initial=0.0)))
    if abs(u.sum()) > tol * scale or abs(v.sum()) > tol * scale:
        raise DomainError("tangent vectors to the simplex must sum to zero")
    fisher = float(u @ fisher_metric_matrix(p) @ v)
    root = np.sqrt(p.values)
    embedded = float(np.dot(u / (2.0 * root), v / (2.0 * root)))
    return abs(fisher - embedded)
