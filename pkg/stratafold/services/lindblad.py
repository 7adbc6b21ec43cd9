"""
Kossakowski-Lindblad dynamics on the space of states.

L(rho) = -i[H, rho] - (1/2){V, rho} + sum_j V_j rho V_j^dagger with
V = sum_j V_j^dagger V_j. The same flow is the vector field
Gamma_L = X_H + Y_G + Z_K with G = -V, and integrate() follows it with a
fixed-step RK4 while tracking the rank of the state at every sample.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from stratafold.errors import DomainError, InvalidSpecError, PositivityViolation, TraceDriftError
from stratafold.services.qgeom import (
    AlgebraConfig,
    DensityState,
    DualElement,
    HermitianOperator,
    ObservableBasis,
    gradient_velocity,
    hamiltonian_velocity,
    kraus_velocity,
    pauli,
)

logger = logging.getLogger(__name__)

DEFAULT_TRACE_TOL = 1e-8
DEFAULT_POSITIVITY_TOL = 1e-8


class LindbladSpec:
    """
    Hamiltonian plus collapse operators.

    Args:
        hamiltonian: Hermitian n x n matrix H
        collapse_ops: Arbitrary complex n x n matrices V_1 .. V_r, r <= n^2 - 1

    Raises:
        InvalidSpecError: H not Hermitian, shape mismatch or too many collapse operators
    """

    def __init__(self, hamiltonian, collapse_ops: Sequence = ()):
        try:
            H = hamiltonian if isinstance(hamiltonian, HermitianOperator) else HermitianOperator(hamiltonian)
        except DomainError as e:
            raise InvalidSpecError(f"Hamiltonian: {e.detail}") from e
        n = H.dim
        ops = []
        for index, op in enumerate(collapse_ops):
            V = np.array(op, dtype=complex)
            if V.shape != (n, n):
                raise InvalidSpecError(f"collapse operator {index} has shape {V.shape}, expected {(n, n)}")
            if not np.all(np.isfinite(V)):
                raise InvalidSpecError(f"collapse operator {index} has non-finite entries")
            V.setflags(write=False)
            ops.append(V)
        if len(ops) > n * n - 1:
            raise InvalidSpecError(f"{len(ops)} collapse operators exceed the bound n^2 - 1 = {n * n - 1}")
        self.hamiltonian = H
        self.collapse_ops = tuple(ops)
        v = sum((V.conj().T @ V for V in ops), np.zeros((n, n), dtype=complex))
        self.v_operator = HermitianOperator(0.5 * (v + v.conj().T))

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    @property
    def basis(self) -> ObservableBasis:
        return ObservableBasis.for_dimension(self.dim)

    def kraus_map(self, xi: np.ndarray) -> np.ndarray:
        """K(xi) = sum_j V_j xi V_j^dagger."""
        return sum((V @ xi @ V.conj().T for V in self.collapse_ops), np.zeros((self.dim, self.dim), dtype=complex))

    def kraus_adjoint(self, a: np.ndarray) -> np.ndarray:
        """K#(a) = sum_j V_j^dagger a V_j, so that Tr(K(xi) a) = Tr(xi K#(a))."""
        return sum((V.conj().T @ a @ V for V in self.collapse_ops), np.zeros((self.dim, self.dim), dtype=complex))

    @classmethod
    def zero(cls, n: int) -> "LindbladSpec":
        return cls(np.zeros((n, n)))

    @classmethod
    def phase_damping(cls, gamma: float) -> "LindbladSpec":
        """Qubit with V_1 = sqrt(1 - gamma) I and V_2 = sqrt(gamma) sigma_3."""
        if not 0.0 <= gamma <= 1.0:
            raise InvalidSpecError(f"phase damping needs 0 <= gamma <= 1, got {gamma}")
        return cls(
            np.zeros((2, 2)),
            [np.sqrt(1.0 - gamma) * np.eye(2), np.sqrt(gamma) * pauli(3).matrix],
        )

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, r: int = 1) -> "LindbladSpec":
        H = HermitianOperator.random(n, rng)
        ops = [
            (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)
            for _ in range(r)
        ]
        return cls(H.matrix, ops)

    def __repr__(self) -> str:
        return f"LindbladSpec(dim={self.dim}, collapse_ops={len(self.collapse_ops)})"


def generator_matrix(spec: LindbladSpec, xi: np.ndarray) -> np.ndarray:
    """L applied to an arbitrary matrix."""
    H = spec.hamiltonian.matrix
    V = spec.v_operator.matrix
    return -1j * (H @ xi - xi @ H) - 0.5 * (V @ xi + xi @ V) + spec.kraus_map(xi)


def _state_matrix(spec: LindbladSpec, rho: DualElement) -> np.ndarray:
    if rho.dim != spec.dim:
        raise DomainError(f"state of dimension {rho.dim} for a Lindblad spec of dimension {spec.dim}")
    return rho.matrix


def lindblad_generator(spec: LindbladSpec, rho: DualElement) -> HermitianOperator:
    """L(rho); traceless by cyclicity of the trace."""
    return HermitianOperator(generator_matrix(spec, _state_matrix(spec, rho)), tol=1e-10)


def kraus_field(spec: LindbladSpec, rho: DualElement) -> DualElement:
    """Z_K: K(rho) - Tr(K(rho)) rho, the component transversal to the rank strata."""
    return DualElement.from_matrix(kraus_velocity(spec.collapse_ops, _state_matrix(spec, rho)), rho.basis)


def kl_vector_field(spec: LindbladSpec, rho: DualElement, cfg: Optional[AlgebraConfig] = None) -> DualElement:
    """
    Gamma_L = X_H + Y_G + Z_K with G = -lambda V.

    The -e_V e_a terms of Y_G and Z_K cancel, so Gamma_L(rho) equals the
    coordinates of L(rho) when cfg.kappa gives the field -i[H, rho].
    """
    cfg = cfg or AlgebraConfig()
    X = _state_matrix(spec, rho)
    velocity = (
        hamiltonian_velocity(spec.hamiltonian, X, cfg.kappa)
        + gradient_velocity(-cfg.lam * spec.v_operator.matrix, X, cfg.lam)
        + kraus_velocity(spec.collapse_ops, X)
    )
    return DualElement.from_matrix(velocity, rho.basis)


@dataclass(frozen=True)
class TrajectorySample:
    tau: float
    state: DensityState

    @property
    def coords(self) -> np.ndarray:
        return self.state.coords

    @property
    def purity(self) -> float:
        return self.state.purity

    @property
    def min_eigenvalue(self) -> float:
        return self.state.min_eigenvalue

    @property
    def rank(self) -> int:
        return self.state.rank


@dataclass
class Trajectory:
    spec: LindbladSpec
    dt: float
    samples: List[TrajectorySample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, index: int) -> TrajectorySample:
        return self.samples[index]

    @property
    def taus(self) -> np.ndarray:
        return np.array([s.tau for s in self.samples])

    @property
    def ranks(self) -> List[int]:
        return [s.rank for s in self.samples]

    def coordinates(self) -> np.ndarray:
        """Rows x_1 .. x_{n^2-1}, one per sample."""
        return np.array([s.coords[1:] for s in self.samples])


@dataclass(frozen=True)
class RankTransition:
    tau_before: float
    tau_after: float
    rank_before: int
    rank_after: int


def _rk4_step(f, x: np.ndarray, h: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    spec: LindbladSpec,
    rho0: DensityState,
    t_max: float,
    dt: float,
    *,
    backward: bool = False,
    stride: int = 1,
    eps: Optional[float] = None,
    trace_tol: float = DEFAULT_TRACE_TOL,
    positivity_tol: float = DEFAULT_POSITIVITY_TOL,
) -> Trajectory:
    """
    Fixed-step RK4 integration of the Lindblad flow on coordinates.

    The trace is renormalized after every step; eigenvalues are never
    clipped, so leaving the state space surfaces as PositivityViolation.

    Args:
        spec: Generator of the flow
        rho0: Initial state
        t_max: Length of the time window
        dt: Step size
        backward: Integrate towards negative tau
        stride: Record every stride-th step
        eps: Rank threshold; defaults to the configured value
        trace_tol: Largest tolerated trace drift within a step
        positivity_tol: Largest tolerated negative eigenvalue

    Returns:
        Trajectory with samples at tau = 0, stride*dt, ... (negated when backward)

    Raises:
        DomainError: Non-positive t_max, dt or stride, or t_max < dt
        TraceDriftError: A step moved the trace by more than trace_tol
        PositivityViolation: A step left the positive cone
    """
    if t_max <= 0 or dt <= 0 or stride < 1:
        raise DomainError(f"need t_max > 0, dt > 0 and stride >= 1 (got {t_max}, {dt}, {stride})")
    if t_max < dt:
        raise DomainError(f"t_max {t_max} is shorter than one step {dt}")
    basis = spec.basis
    if rho0.dim != spec.dim:
        raise DomainError(f"state of dimension {rho0.dim} for a Lindblad spec of dimension {spec.dim}")

    steps = int(round(t_max / dt))
    h = -dt if backward else dt

    def velocity(x: np.ndarray) -> np.ndarray:
        return basis.coordinates(generator_matrix(spec, basis.matrix(x)))

    def check_positive(tau: float, x: np.ndarray) -> None:
        spectrum = scipy.linalg.eigvalsh(basis.matrix(x))
        if spectrum[0] < -positivity_tol:
            logger.error(f"Positivity lost at tau={tau:.6g}: min eigenvalue {spectrum[0]:.3e}")
            raise PositivityViolation(
                f"min eigenvalue {spectrum[0]:.3e} below -{positivity_tol:g} at tau={tau:.6g}",
                tau=tau,
                value=float(spectrum[0]),
            )

    def sample(tau: float, x: np.ndarray) -> TrajectorySample:
        return TrajectorySample(tau, DensityState(x, basis, psd_tol=positivity_tol, eps=eps))

    x = np.array(rho0.coords, dtype=float)
    check_positive(0.0, x)
    trajectory = Trajectory(spec, dt, [sample(0.0, x)])
    for step in range(1, steps + 1):
        x = _rk4_step(velocity, x, h)
        tau = step * h
        drift = abs(x[0] - 1.0)
        if drift > trace_tol:
            logger.error(f"Trace drift {drift:.3e} at tau={tau:.6g}")
            raise TraceDriftError(f"trace drifted by {drift:.3e} at tau={tau:.6g}", tau=tau, value=float(drift))
        x = x / x[0]
        check_positive(tau, x)
        if step % stride == 0 or step == steps:
            trajectory.samples.append(sample(tau, x))

    logger.info(f"Integrated {spec} over {steps} steps of {dt:g}, {len(trajectory)} samples")
    return trajectory


def rank_transitions(trajectory: Trajectory) -> List[RankTransition]:
    """Consecutive samples whose ranks differ, in time order."""
    events = []
    for before, after in zip(trajectory.samples, trajectory.samples[1:]):
        if before.rank != after.rank:
            events.append(RankTransition(before.tau, after.tau, before.rank, after.rank))
    return events
