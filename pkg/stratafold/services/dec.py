"""
Discrete exterior calculus on a periodic 1-D simplicial complex.

The ring has vertices v_0..v_{N-1} and oriented edges [v_j, v_{j+1}]
(indices mod N). Dual cells are midpoints: |*v_j| = (l_{j-1} + l_j) / 2,
|*sigma_j| = 1, and every orientation factor is +1.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Union

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix, diags

from stratafold.errors import AlgebraMismatchError, DomainError, GradeMismatchError

logger = logging.getLogger(__name__)

NULL_SPACE_TOL = 1e-10


@dataclass(frozen=True)
class DualCell:
    """Dual of a primal simplex: a midpoint for an edge, a dual edge for a vertex."""
    primal_id: int
    degree: int
    volume: float
    orientation: int = 1


class SimplicialRing:
    """
    Periodic chain of N vertices with per-edge lengths.

    Args:
        sites: Number of vertices (and edges), at least 3
        spacing: One length for every edge, or one length per edge
    """

    def __init__(self, sites: int, spacing: Union[float, Sequence[float]] = 1.0):
        if int(sites) != sites or sites < 3:
            raise DomainError(f"a ring needs at least 3 sites, got {sites}")
        self.sites = int(sites)
        lengths = np.array(spacing, dtype=float)
        if lengths.ndim == 0:
            lengths = np.full(self.sites, float(lengths))
        if lengths.shape != (self.sites,):
            raise DomainError(f"expected {self.sites} edge lengths, got {lengths.size}")
        if not np.all(np.isfinite(lengths)) or np.any(lengths <= 0):
            raise DomainError("edge lengths must be positive and finite")
        lengths.setflags(write=False)
        self.lengths = lengths

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.lengths == self.lengths[0]))

    @property
    def spacing(self) -> Optional[float]:
        """Common edge length, or None for a non-uniform ring."""
        return float(self.lengths[0]) if self.is_uniform else None

    def is_compatible(self, other: "SimplicialRing") -> bool:
        return self is other or (self.sites == other.sites and np.array_equal(self.lengths, other.lengths))

    def rescaled(self, factor: float) -> "SimplicialRing":
        return SimplicialRing(self.sites, factor * self.lengths)

    def primal_volumes(self, degree: int) -> np.ndarray:
        _check_degree(degree)
        return np.ones(self.sites) if degree == 0 else self.lengths.copy()

    def dual_volumes(self, degree: int) -> np.ndarray:
        """Volumes of the cells dual to primal simplices of the given degree."""
        _check_degree(degree)
        if degree == 0:
            return 0.5 * (np.roll(self.lengths, 1) + self.lengths)
        return np.ones(self.sites)

    def dual_cells(self, degree: int) -> List[DualCell]:
        volumes = self.dual_volumes(degree)
        return [DualCell(j, degree, float(volumes[j])) for j in range(self.sites)]

    def hodge_ratio(self, degree: int) -> np.ndarray:
        """|*sigma| / |sigma| for every primal simplex of the given degree."""
        return self.dual_volumes(degree) / self.primal_volumes(degree)

    def coboundary_matrix(self) -> csr_matrix:
        """(d alpha)_j = alpha_{j+1} - alpha_j."""
        N = self.sites
        rows = np.concatenate([np.arange(N), np.arange(N)])
        cols = np.concatenate([np.arange(N), (np.arange(N) + 1) % N])
        data = np.concatenate([-np.ones(N), np.ones(N)])
        return csr_matrix((data, (rows, cols)), shape=(N, N))

    def codifferential_matrix(self) -> csr_matrix:
        """delta = W0^-1 D^T W1, the adjoint of d in the metric inner product."""
        W0_inv = diags(1.0 / self.hodge_ratio(0))
        W1 = diags(self.hodge_ratio(1))
        return csr_matrix(W0_inv @ self.coboundary_matrix().T @ W1)

    def inner_product(self, a: "Cochain", b: "Cochain") -> complex:
        """sum_j (|*sigma_j| / |sigma_j|) a_j conj(b_j) for primal cochains of equal degree."""
        a._check_compatible(b)
        if a.dual:
            raise DomainError("inner product is defined on primal cochains")
        value = np.sum(self.hodge_ratio(a.degree) * a.values * np.conj(b.values))
        return complex(value) if np.iscomplexobj(value) else float(value)

    def __repr__(self) -> str:
        if self.is_uniform:
            return f"SimplicialRing(sites={self.sites}, spacing={self.spacing:g})"
        return f"SimplicialRing(sites={self.sites}, non-uniform)"


def _check_degree(degree: int) -> None:
    if degree not in (0, 1):
        raise DomainError(f"unsupported degree {degree} on a 1-D complex")


class Cochain:
    """Coefficient vector of a degree-0 or degree-1 cochain, primal or dual."""

    def __init__(self, ring: SimplicialRing, degree: int, values, dual: bool = False):
        _check_degree(degree)
        arr = np.array(values, dtype=complex if np.iscomplexobj(values) else float)
        if arr.shape != (ring.sites,):
            raise DomainError(f"cochain needs {ring.sites} values, got shape {arr.shape}")
        arr.setflags(write=False)
        self.ring = ring
        self.degree = degree
        self.dual = dual
        self.values = arr

    @classmethod
    def zeros(cls, ring: SimplicialRing, degree: int, dual: bool = False) -> "Cochain":
        return cls(ring, degree, np.zeros(ring.sites), dual)

    @classmethod
    def constant(cls, ring: SimplicialRing, degree: int, value: float = 1.0) -> "Cochain":
        return cls(ring, degree, np.full(ring.sites, value))

    def _check_compatible(self, other: "Cochain") -> None:
        if not self.ring.is_compatible(other.ring):
            raise AlgebraMismatchError("cochains live on different rings")
        if self.degree != other.degree or self.dual != other.dual:
            raise GradeMismatchError("cochains have different degrees")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check_compatible(other)
        return Cochain(self.ring, self.degree, self.values + other.values, self.dual)

    def __neg__(self) -> "Cochain":
        return Cochain(self.ring, self.degree, -self.values, self.dual)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def __mul__(self, scalar) -> "Cochain":
        if not np.isscalar(scalar):
            return NotImplemented
        return Cochain(self.ring, self.degree, scalar * self.values, self.dual)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def allclose(self, other: "Cochain", tol: float = 1e-12) -> bool:
        return (self - other).norm() <= tol

    def __repr__(self) -> str:
        kind = "dual" if self.dual else "primal"
        return f"Cochain({kind}, degree={self.degree}, values={self.values})"


def boundary(chain: Sequence[float], k: int = 1) -> np.ndarray:
    """
    Boundary of a chain on the ring.

    k = 1 maps edge coefficients to vertex coefficients with
    d[v_j, v_{j+1}] = v_{j+1} - v_j. Vertices have empty boundary (k = 0).
    """
    c = np.asarray(chain)
    if k == 1:
        return np.roll(c, 1) - c
    if k == 0:
        return np.zeros(0, dtype=c.dtype)
    raise DomainError(f"unsupported degree {k} on a 1-D complex")


def coboundary(a: Cochain) -> Cochain:
    """
    Coboundary d.

    Primal: (d alpha)_j = alpha_{j+1} - alpha_j on edge j. Dual: the dual
    edge *v_j runs from *sigma_{j-1} to *sigma_j. Degree-1 input has no
    higher cells and maps to the zero cochain of its own degree.
    """
    if a.degree == 1:
        return Cochain.zeros(a.ring, 1, a.dual)
    if a.dual:
        return Cochain(a.ring, 1, a.values - np.roll(a.values, 1), dual=True)
    return Cochain(a.ring, 1, np.roll(a.values, -1) - a.values)


def discrete_hodge(a: Cochain) -> Cochain:
    """
    Hodge star between primal k-cochains and dual (1-k)-cochains.

    (1/|sigma|) <alpha, sigma> = (1/|*sigma|) <*alpha, *sigma>, applied in
    the inverse direction on dual input.
    """
    if a.dual:
        primal_degree = 1 - a.degree
        return Cochain(a.ring, primal_degree, a.values / a.ring.hodge_ratio(primal_degree))
    return Cochain(a.ring, 1 - a.degree, a.values * a.ring.hodge_ratio(a.degree), dual=True)


def discrete_wedge(a: Cochain, b: Cochain) -> Cochain:
    """Primal wedge; a 0-cochain enters an edge as the average of its two endpoint values."""
    if a.dual or b.dual:
        raise DomainError("wedge is defined on primal cochains")
    if not a.ring.is_compatible(b.ring):
        raise AlgebraMismatchError("cochains live on different rings")
    if a.degree + b.degree > 1:
        raise GradeMismatchError(f"wedge of degrees {a.degree} and {b.degree} exceeds the ring dimension")
    if a.degree == 0 and b.degree == 0:
        return Cochain(a.ring, 0, a.values * b.values)
    function, edge = (a, b) if a.degree == 0 else (b, a)
    endpoint_average = 0.5 * (function.values + np.roll(function.values, -1))
    return Cochain(a.ring, 1, endpoint_average * edge.values)


def discrete_codifferential(b: Cochain) -> Cochain:
    """delta = +/- * d * on primal 1-cochains; degree 0 maps to zero."""
    if b.dual:
        raise DomainError("codifferential acts on primal cochains")
    if b.degree == 0:
        return Cochain.zeros(b.ring, 0)
    n, k = 1, b.degree
    # (-1)^(nk) makes <d alpha, beta> = <alpha, delta beta> with dual edges oriented like primal ones
    sign = (-1) ** (n * k)
    return sign * discrete_hodge(coboundary(discrete_hodge(b)))


class DiracVariant(str, Enum):
    """First-order operators on the full cochain space."""
    I_D_MINUS_DELTA = "i(d-delta)"
    D_PLUS_DELTA = "d+delta"


def _orthonormal_scaling(ring: SimplicialRing) -> np.ndarray:
    return np.sqrt(np.concatenate([ring.hodge_ratio(0), ring.hodge_ratio(1)]))


def dirac_matrix(
    ring: SimplicialRing,
    variant: DiracVariant = DiracVariant.I_D_MINUS_DELTA,
    orthonormal: bool = True,
) -> np.ndarray:
    """
    Dense 2N x 2N matrix on (all 0-cochain coordinates, all 1-cochain coordinates).

    Args:
        ring: The complex
        variant: i(d - delta) or d + delta
        orthonormal: Coordinates orthonormal for the metric inner product,
            where i(d - delta) is Hermitian for every spacing. False gives
            the primal-coefficient matrix, Hermitian only at unit spacing

    Returns:
        Complex matrix acting on orthonormal (or primal) coefficients
    """
    D = ring.coboundary_matrix().toarray()
    delta = ring.codifferential_matrix().toarray()
    Z = np.zeros_like(D)
    if variant is DiracVariant.I_D_MINUS_DELTA:
        M = 1j * np.block([[Z, -delta], [D, Z]])
    else:
        M = np.block([[Z, delta], [D, Z]]).astype(complex)
    if orthonormal:
        s = _orthonormal_scaling(ring)
        M = (s[:, None] * M) / s[None, :]
    return M


def dirac_kahler_matrix(ring: SimplicialRing, orthonormal: bool = True) -> np.ndarray:
    """Matrix of i(d - delta) on the cochain space of the ring."""
    return dirac_matrix(ring, DiracVariant.I_D_MINUS_DELTA, orthonormal)


def laplacian_matrix(ring: SimplicialRing, orthonormal: bool = True) -> np.ndarray:
    """Block-diagonal d delta + delta d, in the same coordinates as dirac_matrix."""
    D = ring.coboundary_matrix()
    delta = ring.codifferential_matrix()
    L = scipy.linalg.block_diag((delta @ D).toarray(), (D @ delta).toarray())
    if orthonormal:
        s = _orthonormal_scaling(ring)
        L = (s[:, None] * L) / s[None, :]
    return L


def dk_spectrum(ring: SimplicialRing, variant: DiracVariant = DiracVariant.I_D_MINUS_DELTA) -> np.ndarray:
    """Sorted real eigenvalues of the Dirac-Kahler operator."""
    if not ring.is_uniform:
        logger.warning(f"{ring}: no analytic dispersion, returning numeric eigenvalues only")
    eigenvalues = scipy.linalg.eigvalsh(dirac_matrix(ring, variant, orthonormal=True))
    return np.sort(eigenvalues)


@dataclass(frozen=True)
class DispersionMode:
    m: int
    k: float
    eigenvalue: float


def analytic_dispersion(ring: SimplicialRing) -> Optional[List[DispersionMode]]:
    """
    Plane-wave eigenvalues +/- 2|sin(k_m l / 2)| / l with k_m = 2 pi m / (N l).

    Returns None on a non-uniform ring.
    """
    if not ring.is_uniform:
        return None
    N, l = ring.sites, ring.spacing
    modes = []
    for m in range(N):
        k = 2.0 * np.pi * m / (N * l)
        value = 2.0 * abs(np.sin(k * l / 2.0)) / l
        modes.append(DispersionMode(m, k, value))
        modes.append(DispersionMode(m, k, -value))
    return sorted(modes, key=lambda mode: (mode.eigenvalue, mode.m))


@dataclass(frozen=True)
class SpectrumRow:
    m: Optional[int]
    k_m: Optional[float]
    numeric: float
    analytic: Optional[float]
    abs_error: Optional[float]


def spectrum_table(ring: SimplicialRing) -> List[SpectrumRow]:
    """Numeric eigenvalues paired, in sorted order, with the analytic dispersion."""
    numeric = dk_spectrum(ring)
    modes = analytic_dispersion(ring)
    if modes is None:
        return [SpectrumRow(None, None, float(x), None, None) for x in numeric]
    return [
        SpectrumRow(mode.m, mode.k, float(x), mode.eigenvalue, abs(float(x) - mode.eigenvalue))
        for mode, x in zip(modes, numeric)
    ]


@dataclass(frozen=True)
class HodgeDecomposition:
    exact: Cochain
    coexact: Cochain
    harmonic: Cochain


def _project(basis: Optional[np.ndarray], x: np.ndarray) -> np.ndarray:
    if basis is None or basis.shape[1] == 0:
        return np.zeros_like(x)
    return basis @ (basis.T @ x)


def hodge_decompose(a: Cochain) -> HodgeDecomposition:
    """
    Split a primal cochain into exact, coexact and harmonic parts.

    Works in metric-orthonormal coordinates: the harmonic part is the
    projection onto the null space of the Laplacian, the exact part the
    projection onto the range of d and the coexact part the projection
    onto the range of delta.
    """
    if a.dual:
        raise DomainError("Hodge decomposition is defined on primal cochains")
    ring = a.ring
    s0, s1 = np.sqrt(ring.hodge_ratio(0)), np.sqrt(ring.hodge_ratio(1))
    d_tilde = (s1[:, None] * ring.coboundary_matrix().toarray()) / s0[None, :]

    if a.degree == 0:
        scale = s0
        laplacian = d_tilde.T @ d_tilde
        exact_basis, coexact_basis = None, scipy.linalg.orth(d_tilde.T)
    else:
        scale = s1
        laplacian = d_tilde @ d_tilde.T
        exact_basis, coexact_basis = scipy.linalg.orth(d_tilde), None

    eigenvalues, eigenvectors = scipy.linalg.eigh(laplacian)
    cutoff = NULL_SPACE_TOL * max(1.0, float(np.max(np.abs(eigenvalues))))
    harmonic_basis = eigenvectors[:, np.abs(eigenvalues) <= cutoff]

    x = scale * a.values
    parts = [_project(exact_basis, x), _project(coexact_basis, x), _project(harmonic_basis, x)]
    exact, coexact, harmonic = (Cochain(ring, a.degree, part / scale) for part in parts)
    logger.debug(f"{ring}: Hodge decomposition with {harmonic_basis.shape[1]} harmonic modes")
    return HodgeDecomposition(exact, coexact, harmonic)
