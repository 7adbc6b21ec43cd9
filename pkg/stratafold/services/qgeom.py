"""
Geometry of the quantum state space of an n-level system.

Observables are Hermitian n x n matrices with the Lie product
[[a, b]] = -(i/2)(ab - ba) and the Jordan product a . b = (ab + ba)/2.
Elements of the dual space are represented by Hermitian matrices xi with
xi(a) = Tr(xi a), in coordinates x_mu = Tr(xi a_mu) over an
ObservableBasis. States are the trace-one positive elements; the rank of
a state labels its stratum.
"""

import functools
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, field_validator

from stratafold.config import numerics_config
from stratafold.errors import DomainError, OutsideDomainError
from stratafold.services.statgeom import ProbabilityVector

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
UNITARY_TOL = 1e-10
TANGENCY_TOL = 1e-10

# kappa relative to the bare Hamiltonian field (i/2)[h, rho] giving -i[H, rho]
DYNAMICAL_KAPPA = -2.0


class AlgebraConfig(BaseModel):
    """Normalizations of the Lie-Jordan structure."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(1.0, alias="lambda", description="Associator constant; gradient fields carry 1/lambda")
    kappa: float = Field(DYNAMICAL_KAPPA, description="Scale of the Hamiltonian field relative to (i/2)[h, rho]")

    @field_validator("lam")
    @classmethod
    def _nonzero(cls, value: float) -> float:
        if value == 0:
            raise ValueError("lambda must be nonzero")
        return value


BARE_FIELDS = AlgebraConfig(lam=1.0, kappa=1.0)


class HermitianOperator:
    """Observable: a Hermitian n x n matrix."""

    def __init__(self, matrix, tol: float = HERMITIAN_TOL):
        a = np.array(matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise DomainError(f"observable must be a square matrix, got shape {a.shape}")
        scale = max(1.0, float(np.max(np.abs(a))))
        residual = float(np.max(np.abs(a - a.conj().T)))
        if residual > tol * scale:
            raise DomainError(f"matrix is not Hermitian (residual {residual:.3e})")
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        self.matrix = a

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n: int) -> "HermitianOperator":
        return cls(np.eye(n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "HermitianOperator":
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return cls(0.5 * (A + A.conj().T))

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix + _matrix(other))

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(-self.matrix)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix - _matrix(other))

    def __mul__(self, scalar: float) -> "HermitianOperator":
        if not isinstance(scalar, (int, float, np.integer, np.floating)):
            return NotImplemented
        return HermitianOperator(float(scalar) * self.matrix)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.max(np.abs(self.matrix)))

    def allclose(self, other, tol: float = 1e-12) -> bool:
        return float(np.max(np.abs(self.matrix - _matrix(other)))) <= tol

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


@functools.lru_cache(maxsize=None)
def _generalized_gell_mann(n: int) -> tuple:
    """Identity, then symmetric and antisymmetric off-diagonal pairs, then diagonal generators."""
    elements = [np.eye(n, dtype=complex)]
    for j in range(n):
        for k in range(j + 1, n):
            sym = np.zeros((n, n), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            anti = np.zeros((n, n), dtype=complex)
            anti[j, k], anti[k, j] = -1j, 1j
            elements.extend([sym, anti])
    for l in range(1, n):
        diag = np.zeros(n)
        diag[:l] = 1.0
        diag[l] = -l
        elements.append(np.sqrt(2.0 / (l * (l + 1))) * np.diag(diag).astype(complex))
    for element in elements:
        element.setflags(write=False)
    return tuple(elements)


class ObservableBasis:
    """
    Trace-orthogonal Hermitian basis a_0 = I, a_1, ..., a_{n^2-1}.

    Tr(a_mu a_nu) = n_mu delta_mu_nu. Pauli matrices for n = 2, generalized
    Gell-Mann matrices for n >= 3.
    """

    def __init__(self, elements: Sequence[np.ndarray]):
        stack = np.array(elements, dtype=complex)
        n = stack.shape[1]
        if stack.shape != (n * n, n, n):
            raise DomainError(f"an observable basis for n={n} needs {n * n} elements")
        if not np.allclose(stack[0], np.eye(n)):
            raise DomainError("the first basis element must be the identity")
        gram = np.einsum("aij,bji->ab", stack, stack)
        norms = np.real(np.diag(gram))
        if np.max(np.abs(gram - np.diag(norms))) > 1e-12 * n:
            raise DomainError("basis elements are not trace-orthogonal")
        stack.setflags(write=False)
        norms.setflags(write=False)
        self.elements = stack
        self.norms = norms

    @classmethod
    @functools.lru_cache(maxsize=None)
    def for_dimension(cls, n: int) -> "ObservableBasis":
        if n < 1:
            raise DomainError(f"dimension must be positive, got {n}")
        return cls(_generalized_gell_mann(n))

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    @property
    def size(self) -> int:
        return self.elements.shape[0]

    def element(self, mu: int) -> HermitianOperator:
        return HermitianOperator(self.elements[mu])

    def coordinates(self, matrix: np.ndarray) -> np.ndarray:
        """x_mu = Tr(xi a_mu)."""
        return np.real(np.einsum("ij,mji->m", matrix, self.elements))

    def matrix(self, coords: Sequence[float]) -> np.ndarray:
        """xi = sum_mu x_mu a_mu / n_mu."""
        return np.einsum("m,mij->ij", np.asarray(coords, dtype=float) / self.norms, self.elements)


def pauli(k: int) -> HermitianOperator:
    """sigma_0 .. sigma_3."""
    return ObservableBasis.for_dimension(2).element(k)


class DualElement:
    """Element xi of the dual of the observables, stored by coordinates."""

    def __init__(self, coords: Sequence[float], basis: ObservableBasis):
        x = np.array(coords, dtype=float)
        if x.shape != (basis.size,):
            raise DomainError(f"expected {basis.size} coordinates, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError("coordinates must be finite")
        x.setflags(write=False)
        self.coords = x
        self.basis = basis
        self._matrix: Optional[np.ndarray] = None

    @classmethod
    def from_matrix(cls, matrix, basis: Optional[ObservableBasis] = None):
        H = HermitianOperator(matrix, tol=1e-10).matrix
        basis = basis or ObservableBasis.for_dimension(H.shape[0])
        return cls(basis.coordinates(H), basis)

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            m = self.basis.matrix(self.coords)
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def trace(self) -> float:
        """f_I(xi)."""
        return float(self.coords[0])

    def bloch(self) -> np.ndarray:
        """Coordinates x_1 .. x_{n^2-1}."""
        return self.coords[1:].copy()

    def __add__(self, other: "DualElement") -> "DualElement":
        return DualElement(self.coords + other.coords, self.basis)

    def __sub__(self, other: "DualElement") -> "DualElement":
        return DualElement(self.coords - other.coords, self.basis)

    def __mul__(self, scalar: float) -> "DualElement":
        if not isinstance(scalar, (int, float, np.integer, np.floating)):
            return NotImplemented
        return DualElement(float(scalar) * self.coords, self.basis)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.max(np.abs(self.coords)))

    def allclose(self, other: "DualElement", tol: float = 1e-12) -> bool:
        return float(np.max(np.abs(self.coords - other.coords))) <= tol

    def __repr__(self) -> str:
        return f"{type(self).__name__}(coords={self.coords.tolist()})"


class DensityState(DualElement):
    """
    Trace-one positive element of the dual space.

    Args:
        coords: Coordinates x_0 .. x_{n^2-1} with x_0 = 1
        basis: Observable basis the coordinates refer to
        psd_tol: Largest tolerated negative eigenvalue, relative to the
            spectral norm; defaults to the configured rank threshold
        eps: Rank threshold; defaults to the configured value
    """

    def __init__(
        self,
        coords: Sequence[float],
        basis: ObservableBasis,
        psd_tol: Optional[float] = None,
        eps: Optional[float] = None,
    ):
        super().__init__(coords, basis)
        if abs(self.coords[0] - 1.0) > TRACE_TOL:
            raise DomainError(f"state trace is {self.coords[0]:.17g}, not 1")
        self.spectrum = scipy.linalg.eigvalsh(self.matrix)
        tol = numerics_config.rank_eps if psd_tol is None else psd_tol
        if self.spectrum[0] < -tol * max(1.0, float(np.max(np.abs(self.spectrum)))):
            raise DomainError(f"state has a negative eigenvalue {self.spectrum[0]:.3e}")
        self.stratum = rank_and_stratum(self, eps)

    @classmethod
    def from_matrix(cls, matrix, basis: Optional[ObservableBasis] = None, psd_tol: Optional[float] = None) -> "DensityState":
        H = HermitianOperator(matrix, tol=1e-10).matrix
        basis = basis or ObservableBasis.for_dimension(H.shape[0])
        return cls(basis.coordinates(H), basis, psd_tol)

    @classmethod
    def from_coordinates(cls, coords: Sequence[float], n: Optional[int] = None) -> "DensityState":
        """State with coordinates (1, x_1, ..., x_{n^2-1})."""
        coords = np.asarray(coords, dtype=float)
        n = n or int(round(np.sqrt(coords.size + 1)))
        basis = ObservableBasis.for_dimension(n)
        return cls(np.concatenate([[1.0], coords]), basis)

    @classmethod
    def from_bloch(cls, vector: Sequence[float]) -> "DensityState":
        """Qubit state (I + x . sigma) / 2."""
        return cls.from_coordinates(vector, n=2)

    @classmethod
    def pure(cls, psi: Sequence[complex]) -> "DensityState":
        psi = np.asarray(psi, dtype=complex)
        norm = np.vdot(psi, psi).real
        if norm == 0:
            raise DomainError("cannot build a state from the zero vector")
        return cls.from_matrix(np.outer(psi, psi.conj()) / norm)

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityState":
        return cls.from_matrix(np.eye(n) / n)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, rank: Optional[int] = None) -> "DensityState":
        """A A^dagger / Tr for a complex Gaussian n x rank matrix A."""
        k = rank or n
        A = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
        rho = A @ A.conj().T
        return cls.from_matrix(rho / np.trace(rho).real)

    @property
    def rank(self) -> int:
        """Number of eigenvalues above the rank threshold."""
        return self.stratum.k_plus

    @property
    def k_plus(self) -> int:
        return self.stratum.k_plus

    @property
    def k_minus(self) -> int:
        return self.stratum.k_minus

    @property
    def purity(self) -> float:
        return float(np.sum(self.spectrum ** 2))

    @property
    def min_eigenvalue(self) -> float:
        return float(self.spectrum[0])


def _matrix(x) -> np.ndarray:
    if isinstance(x, (HermitianOperator, DualElement)):
        return x.matrix
    return np.asarray(x, dtype=complex)


def _check_dims(*matrices: np.ndarray) -> None:
    shapes = {m.shape for m in matrices}
    if len(shapes) != 1:
        raise DomainError(f"dimension mismatch: {sorted(shapes)}")


def lie_product(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """[[a, b]] = -(i/2)(ab - ba)."""
    A, B = _matrix(a), _matrix(b)
    _check_dims(A, B)
    return HermitianOperator(-0.5j * (A @ B - B @ A))


def jordan_product(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """a . b = (ab + ba)/2."""
    A, B = _matrix(a), _matrix(b)
    _check_dims(A, B)
    return HermitianOperator(0.5 * (A @ B + B @ A))


def linear_function(a: HermitianOperator, xi: DualElement) -> float:
    """f_a(xi) = Tr(xi a)."""
    A, X = _matrix(a), _matrix(xi)
    _check_dims(A, X)
    return float(np.real(np.einsum("ij,ji->", X, A)))


def expectation(a: HermitianOperator, xi: DualElement) -> float:
    """e_a = f_a / f_I, defined where the trace does not vanish."""
    X = _matrix(xi)
    trace = float(np.real(np.trace(X)))
    if abs(trace) <= 1e-14 * max(1.0, float(np.max(np.abs(X)))):
        raise OutsideDomainError("f_I(xi) = 0: expectation values are undefined")
    return linear_function(a, xi) / trace


def lambda_tensor(a: HermitianOperator, b: HermitianOperator, xi: DualElement) -> float:
    """Lambda(df_a, df_b)(xi) = f_[[a,b]](xi)."""
    return linear_function(lie_product(a, b), xi)


def r_tensor(a: HermitianOperator, b: HermitianOperator, xi: DualElement) -> float:
    """R(df_a, df_b)(xi) = f_{a.b}(xi)."""
    return linear_function(jordan_product(a, b), xi)


def lambdaD_tensor(a: HermitianOperator, b: HermitianOperator, rho: DualElement) -> float:
    """Lambda_D(de_a, de_b)(rho) = e_[[a,b]](rho)."""
    return expectation(lie_product(a, b), rho)


def rD_tensor(a: HermitianOperator, b: HermitianOperator, rho: DualElement) -> float:
    """R_D(de_a, de_b)(rho) = e_{a.b}(rho) - e_a(rho) e_b(rho), the covariance of a and b."""
    return expectation(jordan_product(a, b), rho) - expectation(a, rho) * expectation(b, rho)


def jordan_bracket(
    a: HermitianOperator, b: HermitianOperator, rho: DualElement, cfg: AlgebraConfig = BARE_FIELDS
) -> float:
    """
    Symmetric bracket of expectation functions, (e_a, e_b)_D = (1/lambda) R_D(de_a, de_b) + e_a e_b.

    The R_D term is the gradient field Y_a acting on e_b, so at lambda = 1 the
    bracket is e_{a.b}.
    """
    return rD_tensor(a, b, rho) / cfg.lam + expectation(a, rho) * expectation(b, rho)


def hamiltonian_velocity(h, xi, kappa: float = 1.0) -> np.ndarray:
    """kappa (i/2)[h, xi]; kappa = 1 is the field Lambda(df_h, .)."""
    H, X = _matrix(h), _matrix(xi)
    _check_dims(H, X)
    return kappa * 0.5j * (H @ X - X @ H)


def gradient_velocity(g, xi, lam: float = 1.0) -> np.ndarray:
    """(1/lambda)(g . xi - (Tr(g xi) / Tr xi) xi), the trace-preserving gradient field."""
    G, X = _matrix(g), _matrix(xi)
    _check_dims(G, X)
    trace = np.trace(X).real
    return (0.5 * (G @ X + X @ G) - (np.trace(G @ X).real / trace) * X) / lam


def kraus_velocity(collapse_ops: Sequence[np.ndarray], xi) -> np.ndarray:
    """K(xi) - (Tr K(xi) / Tr xi) xi with K(xi) = sum_j V_j xi V_j^dagger."""
    X = _matrix(xi)
    K = sum((V @ X @ V.conj().T for V in collapse_ops), np.zeros_like(X, dtype=complex))
    return K - (np.trace(K).real / np.trace(X).real) * X


def _tangent(velocity: np.ndarray, basis: ObservableBasis) -> DualElement:
    return DualElement.from_matrix(velocity, basis)


def hamiltonian_field(h: HermitianOperator, rho: DualElement, cfg: AlgebraConfig = BARE_FIELDS) -> DualElement:
    """Hamiltonian vector field of e_h; acts on expectations as kappa e_[[h,a]]."""
    return _tangent(hamiltonian_velocity(h, rho, cfg.kappa), rho.basis)


def gradient_field(g: HermitianOperator, rho: DualElement, cfg: AlgebraConfig = BARE_FIELDS) -> DualElement:
    """Gradient vector field of e_g; acts on expectations as (e_{g.a} - e_g e_a) / lambda."""
    return _tangent(gradient_velocity(g, rho, cfg.lam), rho.basis)


def vector_field_commutator(
    A: Callable[[np.ndarray], np.ndarray],
    B: Callable[[np.ndarray], np.ndarray],
    xi,
    step: float = 1e-5,
) -> np.ndarray:
    """
    [A, B](xi) = DB[A] - DA[B] by central differences.

    Args:
        A: Velocity field on matrices
        B: Velocity field on matrices
        xi: Base point
        step: Finite-difference step

    Returns:
        The commutator as a matrix
    """
    X = _matrix(xi)
    a, b = A(X), B(X)
    DB_a = (B(X + step * a) - B(X - step * a)) / (2.0 * step)
    DA_b = (A(X + step * b) - A(X - step * b)) / (2.0 * step)
    return DB_a - DA_b


@dataclass(frozen=True)
class StratumInfo:
    rank: int
    k_plus: int
    k_minus: int
    stratum_dim: int
    is_state: bool


def _threshold(eigenvalues: np.ndarray, eps: Optional[float]) -> float:
    eps = numerics_config.rank_eps if eps is None else eps
    return eps * float(np.max(np.abs(eigenvalues), initial=0.0))


def rank_and_stratum(xi, eps: Optional[float] = None) -> StratumInfo:
    """
    Eigenvalue counts of xi and the dimension of its stratum.

    Eigenvalues count as nonzero above eps times the spectral norm. The
    stratum dimension is 2nk - k^2 - 1 for states and 2nk - k^2 otherwise.
    """
    X = _matrix(xi)
    eigenvalues = scipy.linalg.eigvalsh(X)
    threshold = _threshold(eigenvalues, eps)
    k_plus = int(np.sum(eigenvalues > threshold))
    k_minus = int(np.sum(eigenvalues < -threshold))
    k = k_plus + k_minus
    n = X.shape[0]
    is_state = k_minus == 0 and k > 0 and abs(np.trace(X).real - 1.0) <= TRACE_TOL
    stratum_dim = 2 * n * k - k * k - (1 if is_state else 0) if k else 0
    return StratumInfo(k, k_plus, k_minus, stratum_dim, is_state)


def kernel_basis(xi, eps: Optional[float] = None) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of xi."""
    X = _matrix(xi)
    eigenvalues, eigenvectors = scipy.linalg.eigh(X)
    return eigenvectors[:, np.abs(eigenvalues) <= _threshold(eigenvalues, eps)]


def tangent_space_dimension(xi, state: bool = True, eps: Optional[float] = None) -> int:
    """
    Dimension of the tangent space to the stratum through xi.

    Counts Hermitian directions B (traceless when `state`) with
    <B x|y> = 0 for every x, y in the kernel of xi, as the corank of the
    constraint map on the observable basis.
    """
    X = _matrix(xi)
    basis = ObservableBasis.for_dimension(X.shape[0])
    directions = basis.elements[1:] if state else basis.elements
    K = kernel_basis(X, eps)
    if K.shape[1] == 0:
        return len(directions)
    rows = []
    for B in directions:
        block = K.conj().T @ B @ K
        rows.append(np.concatenate([block.real.ravel(), block.imag.ravel()]))
    constraints = np.array(rows)
    return len(directions) - int(np.linalg.matrix_rank(constraints, tol=1e-10))


def field_span_dimension(rho, cfg: AlgebraConfig = BARE_FIELDS) -> int:
    """Dimension of the span of Hamiltonian and gradient fields of a traceless basis at rho."""
    X = _matrix(rho)
    basis = ObservableBasis.for_dimension(X.shape[0])
    vectors = []
    for a in basis.elements[1:]:
        vectors.append(basis.coordinates(hamiltonian_velocity(a, X, cfg.kappa)))
        vectors.append(basis.coordinates(gradient_velocity(a, X, cfg.lam)))
    M = np.array(vectors)
    scale = max(1.0, float(np.max(np.abs(M))))
    return int(np.linalg.matrix_rank(M, tol=1e-9 * scale))


def tangency_check(xi, tangent, eps: Optional[float] = None, tol: float = TANGENCY_TOL) -> bool:
    """True when the tangent B satisfies |<B x|y>| <= tol on the kernel of xi."""
    K = kernel_basis(xi, eps)
    if K.shape[1] == 0:
        return True
    B = _matrix(tangent)
    return float(np.max(np.abs(K.conj().T @ B @ K))) <= tol


def _check_unitary(U: np.ndarray) -> None:
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DomainError(f"frame must be a square matrix, got shape {U.shape}")
    if np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) > UNITARY_TOL:
        raise DomainError("matrix is not unitary")


def born_probabilities(psi: Sequence[complex], basis: Optional[np.ndarray] = None) -> ProbabilityVector:
    """
    p_j = |<e_j|psi>|^2 / <psi|psi>.

    Args:
        psi: State vector, not necessarily normalized
        basis: Unitary matrix whose columns are the frame e_j; identity by default
    """
    psi = np.asarray(psi, dtype=complex)
    norm = np.vdot(psi, psi).real
    if norm == 0:
        raise DomainError("Born probabilities need a nonzero vector")
    U = np.eye(psi.size, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    _check_unitary(U)
    p = np.abs(U.conj().T @ psi) ** 2 / norm
    return ProbabilityVector(p / p.sum())


def polar_state(p: ProbabilityVector, U) -> DensityState:
    """rho = U^dagger diag(p) U."""
    U = np.asarray(U, dtype=complex)
    _check_unitary(U)
    if U.shape[0] != p.size:
        raise DomainError(f"unitary of size {U.shape[0]} for {p.size} probabilities")
    return DensityState.from_matrix(U.conj().T @ np.diag(p.values) @ U)
