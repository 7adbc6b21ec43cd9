"""
Tests for the Lie-Jordan algebra of observables, the tensors on the dual
space, Hamiltonian and gradient fields, and the stratification of states.
"""
import numpy as np
import pytest
from pydantic import ValidationError

from stratafold.errors import DomainError, OutsideDomainError
from stratafold.services.qgeom import (
    BARE_FIELDS,
    DYNAMICAL_KAPPA,
    AlgebraConfig,
    DensityState,
    DualElement,
    HermitianOperator,
    ObservableBasis,
    born_probabilities,
    expectation,
    field_span_dimension,
    gradient_field,
    gradient_velocity,
    hamiltonian_field,
    hamiltonian_velocity,
    jordan_bracket,
    jordan_product,
    kernel_basis,
    lambda_tensor,
    lambdaD_tensor,
    lie_product,
    linear_function,
    pauli,
    polar_state,
    r_tensor,
    rD_tensor,
    rank_and_stratum,
    tangency_check,
    tangent_space_dimension,
    vector_field_commutator,
)
from stratafold.services.statgeom import ProbabilityVector

S0, S1, S2, S3 = (pauli(k) for k in range(4))
NORTH = DensityState.from_bloch([0.0, 0.0, 1.0])


def random_bloch(rng, radius=None):
    x = rng.standard_normal(3)
    r = rng.uniform(0.0, 1.0) if radius is None else radius
    return r * x / np.linalg.norm(x)


def random_unitary(n, rng):
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# Observables and bases
# ---------------------------------------------------------------------------

def test_hermitian_operator_rejects_non_hermitian():
    with pytest.raises(DomainError):
        HermitianOperator([[0.0, 1.0], [0.0, 0.0]])


def test_qubit_basis_is_pauli():
    basis = ObservableBasis.for_dimension(2)
    assert np.allclose(basis.elements[1], [[0, 1], [1, 0]])
    assert np.allclose(basis.elements[2], [[0, -1j], [1j, 0]])
    assert np.allclose(basis.elements[3], [[1, 0], [0, -1]])
    assert np.allclose(basis.norms, 2.0)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_basis_is_trace_orthogonal(n):
    basis = ObservableBasis.for_dimension(n)
    gram = np.einsum("aij,bji->ab", basis.elements, basis.elements)
    assert basis.size == n * n
    assert np.allclose(gram, np.diag(basis.norms))
    assert np.allclose(basis.elements[0], np.eye(n))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dual_element_matrix_round_trip(n):
    rng = np.random.default_rng(50)
    H = HermitianOperator.random(n, rng)
    xi = DualElement.from_matrix(H.matrix)
    assert np.max(np.abs(xi.matrix - H.matrix)) <= 1e-12


def test_bloch_coordinates():
    rho = DensityState.from_bloch([0.1, -0.2, 0.3])
    assert np.allclose(rho.matrix, 0.5 * (np.eye(2) + 0.1 * S1.matrix - 0.2 * S2.matrix + 0.3 * S3.matrix))
    assert rho.bloch() == pytest.approx([0.1, -0.2, 0.3])


def test_state_validation():
    basis = ObservableBasis.for_dimension(2)
    with pytest.raises(DomainError):
        DensityState([2.0, 0.0, 0.0, 0.0], basis)
    with pytest.raises(DomainError):
        DensityState.from_bloch([0.0, 0.0, 1.5])


# ---------------------------------------------------------------------------
# Lie and Jordan products
# ---------------------------------------------------------------------------

def test_lie_product_examples():
    assert lie_product(S1, S2).allclose(S3)
    assert lie_product(S1, S1).norm() == 0.0
    assert lie_product(S1, S0).norm() == 0.0


def test_jordan_product_examples():
    assert jordan_product(S1, S1).allclose(S0)
    assert jordan_product(S1, S2).norm() <= 1e-15
    a = HermitianOperator.random(3, np.random.default_rng(51))
    assert jordan_product(a, HermitianOperator.identity(3)).allclose(a)


def test_products_reject_dimension_mismatch():
    with pytest.raises(DomainError):
        lie_product(S1, HermitianOperator.identity(3))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_lie_jordan_identities(n):
    rng = np.random.default_rng(52 + n)
    for _ in range(125):
        a, b, c = (HermitianOperator.random(n, rng) for _ in range(3))
        scale = max(1.0, a.norm() * b.norm() * c.norm())
        compat = lie_product(jordan_product(a, b), c) - jordan_product(a, lie_product(b, c)) - jordan_product(lie_product(a, c), b)
        assert compat.norm() / scale <= 1e-11
        associator = jordan_product(jordan_product(a, b), c) - jordan_product(a, jordan_product(b, c))
        assert associator.allclose(lie_product(lie_product(a, c), b), tol=1e-11 * scale)
        assert np.allclose(jordan_product(a, b).matrix + 1j * lie_product(a, b).matrix, a.matrix @ b.matrix, atol=1e-11 * scale)
        square = jordan_product(a, a)
        jordan = jordan_product(jordan_product(a, b), square) - jordan_product(a, jordan_product(b, square))
        assert jordan.norm() / (scale * a.norm() ** 2) <= 1e-11


# ---------------------------------------------------------------------------
# Linear functions, expectations and tensors
# ---------------------------------------------------------------------------

def test_linear_function_examples():
    rng = np.random.default_rng(53)
    rho = DensityState.from_bloch(random_bloch(rng))
    assert linear_function(S0, rho) == pytest.approx(1.0)
    assert linear_function(S3, rho) == pytest.approx(rho.coords[3])
    a, b = HermitianOperator.random(2, rng), HermitianOperator.random(2, rng)
    assert linear_function(a + b, rho) == pytest.approx(linear_function(a, rho) + linear_function(b, rho))


def test_expectation_examples():
    rng = np.random.default_rng(54)
    xi = DualElement.from_matrix(DensityState.random(3, rng).matrix * 2.5)
    a = HermitianOperator.random(3, rng)
    assert expectation(HermitianOperator.identity(3), xi) == pytest.approx(1.0)
    assert expectation(S3, NORTH) == pytest.approx(1.0)
    assert expectation(a, 2.0 * xi) == pytest.approx(expectation(a, xi))


def test_expectation_outside_domain():
    with pytest.raises(OutsideDomainError):
        expectation(S1, DualElement.from_matrix(S3.matrix))


def test_lambda_and_r_tensors():
    rng = np.random.default_rng(55)
    rho = DensityState.from_bloch(random_bloch(rng))
    assert lambda_tensor(S1, S2, rho) == pytest.approx(rho.coords[3])
    assert lambda_tensor(S2, S2, rho) == 0.0
    assert lambda_tensor(S1, S0, rho) == 0.0

    xi = DualElement([1.7, 0.2, -0.4, 0.9], ObservableBasis.for_dimension(2))
    assert r_tensor(S1, S1, xi) == pytest.approx(1.7)
    assert r_tensor(S1, S2, xi) == pytest.approx(0.0, abs=1e-15)
    a, b = HermitianOperator.random(2, rng), HermitianOperator.random(2, rng)
    assert r_tensor(a, b, xi) == pytest.approx(r_tensor(b, a, xi))
    assert lambda_tensor(a, b, xi) == pytest.approx(-lambda_tensor(b, a, xi))


def test_state_tensors():
    rng = np.random.default_rng(56)
    rho = DensityState.from_bloch(random_bloch(rng))
    assert lambdaD_tensor(S1, S2, rho) == pytest.approx(rho.coords[3])
    assert lambdaD_tensor(S1, S0, rho) == 0.0
    assert rD_tensor(S1, S1, NORTH) == pytest.approx(1.0)
    assert rD_tensor(S3, S3, NORTH) == pytest.approx(0.0, abs=1e-15)
    assert rD_tensor(S2, S0, rho) == pytest.approx(0.0, abs=1e-15)


def test_variance_is_nonnegative():
    rng = np.random.default_rng(57)
    for _ in range(20):
        rho = DensityState.random(3, rng)
        a = HermitianOperator.random(3, rng)
        assert rD_tensor(a, a, rho) >= -1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_jordan_bracket_is_expectation_of_jordan_product(n):
    rng = np.random.default_rng(90 + n)
    for _ in range(20):
        rho = DensityState.random(n, rng)
        a, b = HermitianOperator.random(n, rng), HermitianOperator.random(n, rng)
        bracket = jordan_bracket(a, b, rho)
        assert bracket == pytest.approx(expectation(jordan_product(a, b), rho), abs=1e-12)
        assert bracket == pytest.approx(jordan_bracket(b, a, rho), abs=1e-12)
        assert bracket - expectation(a, rho) * expectation(b, rho) == pytest.approx(rD_tensor(a, b, rho), abs=1e-12)


def test_jordan_bracket_with_identity_and_scaled_lambda():
    rng = np.random.default_rng(92)
    rho = DensityState.random(3, rng)
    a, b = HermitianOperator.random(3, rng), HermitianOperator.random(3, rng)
    assert jordan_bracket(a, HermitianOperator.identity(3), rho) == pytest.approx(expectation(a, rho), abs=1e-12)
    cfg = AlgebraConfig(lam=2.0, kappa=1.0)
    expected = rD_tensor(a, b, rho) / 2.0 + expectation(a, rho) * expectation(b, rho)
    assert jordan_bracket(a, b, rho, cfg) == pytest.approx(expected, abs=1e-12)
    assert jordan_bracket(S1, S1, NORTH) == pytest.approx(1.0)


def test_lambdaD_two_level_coordinate_form():
    rng = np.random.default_rng(58)
    x = random_bloch(rng)
    rho = DensityState.from_bloch(x)
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1.0
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1.0
    sigmas = (S1, S2, S3)
    for j in range(3):
        for k in range(3):
            assert lambdaD_tensor(sigmas[j], sigmas[k], rho) == pytest.approx(eps[j, k] @ x, abs=1e-14)


# ---------------------------------------------------------------------------
# Hamiltonian and gradient fields
# ---------------------------------------------------------------------------

def test_algebra_config():
    assert AlgebraConfig().kappa == DYNAMICAL_KAPPA
    assert AlgebraConfig(**{"lambda": 2.0}).lam == 2.0
    with pytest.raises(ValidationError):
        AlgebraConfig(lam=0.0)


def test_hamiltonian_field_rotates_pole():
    assert hamiltonian_field(S1, NORTH).bloch() == pytest.approx([0.0, 1.0, 0.0])


def test_hamiltonian_field_of_identity_vanishes():
    rho = DensityState.random(3, np.random.default_rng(59))
    assert hamiltonian_field(HermitianOperator.identity(3), rho).norm() <= 1e-15


def test_hamiltonian_field_preserves_radius():
    rng = np.random.default_rng(60)
    for _ in range(10):
        x = random_bloch(rng)
        h = HermitianOperator.random(2, rng)
        velocity = hamiltonian_field(h, DensityState.from_bloch(x))
        assert velocity.trace == pytest.approx(0.0, abs=1e-14)
        assert float(velocity.bloch() @ x) == pytest.approx(0.0, abs=1e-12)


def test_dynamical_hamiltonian_field_is_schroedinger():
    rng = np.random.default_rng(61)
    rho = DensityState.random(3, rng)
    H = HermitianOperator.random(3, rng)
    field = hamiltonian_field(H, rho, AlgebraConfig())
    expected = -1j * (H.matrix @ rho.matrix - rho.matrix @ H.matrix)
    assert np.allclose(field.matrix, expected, atol=1e-12)


def test_hamiltonian_field_acts_as_bracket():
    rng = np.random.default_rng(62)
    rho = DensityState.random(3, rng)
    h, a = HermitianOperator.random(3, rng), HermitianOperator.random(3, rng)
    cfg = AlgebraConfig(lam=1.0, kappa=-2.0)
    derivative = linear_function(a, hamiltonian_field(h, rho, cfg))
    assert derivative == pytest.approx(cfg.kappa * expectation(lie_product(h, a), rho), abs=1e-12)


def test_gradient_field_fixed_point_and_center():
    assert gradient_field(S3, NORTH).norm() <= 1e-15
    center = DensityState.maximally_mixed(2)
    assert gradient_field(S3, center).bloch() == pytest.approx([0.0, 0.0, 1.0])


@pytest.mark.parametrize("radius", [1.0, 0.5])
def test_gradient_field_radial_component(radius):
    rng = np.random.default_rng(63)
    x = random_bloch(rng, radius)
    rho = DensityState.from_bloch(x)
    for j, sigma in enumerate((S1, S2, S3)):
        velocity = gradient_field(sigma, rho).bloch()
        assert 2.0 * float(velocity @ x) == pytest.approx(2.0 * (1.0 - radius ** 2) * x[j], abs=1e-12)


def test_gradient_field_acts_as_covariance():
    rng = np.random.default_rng(64)
    rho = DensityState.random(3, rng)
    g, a = HermitianOperator.random(3, rng), HermitianOperator.random(3, rng)
    cfg = AlgebraConfig(lam=2.0, kappa=1.0)
    derivative = linear_function(a, gradient_field(g, rho, cfg))
    assert derivative == pytest.approx(rD_tensor(g, a, rho) / 2.0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_vector_field_commutation_relations(n):
    rng = np.random.default_rng(65 + n)

    def X(h):
        return lambda M: hamiltonian_velocity(h, M)

    def Y(g):
        return lambda M: gradient_velocity(g, M)

    for _ in range(50):
        rho = DensityState.random(n, rng)
        a, b = HermitianOperator.random(n, rng), HermitianOperator.random(n, rng)
        ab = lie_product(a, b)
        assert np.allclose(vector_field_commutator(X(a), X(b), rho), X(ab)(rho.matrix), atol=1e-6)
        assert np.allclose(vector_field_commutator(X(a), Y(b), rho), Y(ab)(rho.matrix), atol=1e-6)
        assert np.allclose(vector_field_commutator(Y(a), Y(b), rho), -X(ab)(rho.matrix), atol=1e-6)


# ---------------------------------------------------------------------------
# Strata
# ---------------------------------------------------------------------------

def test_pure_qubit_stratum():
    info = rank_and_stratum(NORTH)
    assert (info.rank, info.k_plus, info.k_minus, info.stratum_dim) == (1, 1, 0, 2)
    assert info.is_state


def test_maximally_mixed_qubit_stratum():
    info = rank_and_stratum(DensityState.maximally_mixed(2))
    assert (info.rank, info.stratum_dim) == (2, 3)


def test_traceless_element_is_not_a_state():
    info = rank_and_stratum(DualElement.from_matrix(0.5 * S3.matrix))
    assert (info.k_plus, info.k_minus) == (1, 1)
    assert not info.is_state
    assert info.stratum_dim == 4


def test_kernel_basis_of_pure_state():
    K = kernel_basis(NORTH)
    assert K.shape == (2, 1)
    assert abs(K[1, 0]) == pytest.approx(1.0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_stratum_dimensions_agree(n):
    rng = np.random.default_rng(66 + n)
    for k in range(1, n + 1):
        rho = DensityState.random(n, rng, rank=k)
        expected = 2 * n * k - k * k - 1
        assert rho.rank == k
        assert rho.stratum.stratum_dim == expected
        assert tangent_space_dimension(rho) == expected
        assert field_span_dimension(rho) == expected


def test_tangency_of_hamiltonian_field_at_pure_state():
    rng = np.random.default_rng(70)
    rho = DensityState.pure(rng.standard_normal(3) + 1j * rng.standard_normal(3))
    h = HermitianOperator.random(3, rng)
    assert tangency_check(rho, hamiltonian_field(h, rho))
    assert tangency_check(rho, gradient_field(h, rho))


def test_radial_direction_is_transverse_at_pure_state():
    mixed = DensityState.maximally_mixed(2)
    assert not tangency_check(NORTH, mixed.matrix - NORTH.matrix)


def test_any_tangent_at_full_rank_state():
    rng = np.random.default_rng(71)
    rho = DensityState.random(3, rng)
    assert tangency_check(rho, HermitianOperator.random(3, rng))


def test_field_span_uses_config():
    rho = DensityState.random(2, np.random.default_rng(72))
    assert field_span_dimension(rho, BARE_FIELDS) == field_span_dimension(rho, AlgebraConfig(lam=3.0, kappa=-2.0)) == 3


# ---------------------------------------------------------------------------
# Born probabilities and polar states
# ---------------------------------------------------------------------------

def test_born_probabilities():
    assert born_probabilities([1.0, 0.0]).values == pytest.approx([1.0, 0.0])
    assert born_probabilities(np.array([1.0, 1.0]) / np.sqrt(2.0)).values == pytest.approx([0.5, 0.5])
    assert born_probabilities([2.0, 0.0]).values == pytest.approx([1.0, 0.0])


def test_born_probabilities_in_rotated_frame():
    rng = np.random.default_rng(73)
    U = random_unitary(4, rng)
    p = born_probabilities(U[:, 2], U)
    assert p.values == pytest.approx([0.0, 0.0, 1.0, 0.0], abs=1e-12)


def test_born_probabilities_errors():
    with pytest.raises(DomainError):
        born_probabilities([0.0, 0.0])
    with pytest.raises(DomainError):
        born_probabilities([1.0, 0.0], np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_polar_state_examples():
    half = polar_state(ProbabilityVector([0.5, 0.5]), np.eye(2))
    assert half.coords == pytest.approx([1.0, 0.0, 0.0, 0.0])

    rng = np.random.default_rng(74)
    pure = polar_state(ProbabilityVector([1.0, 0.0]), random_unitary(2, rng))
    assert pure.rank == 1

    p = ProbabilityVector.random_interior(4, rng)
    rho = polar_state(p, random_unitary(4, rng))
    assert rho.spectrum == pytest.approx(np.sort(p.values), abs=1e-12)


def test_polar_state_rejects_non_unitary():
    with pytest.raises(DomainError):
        polar_state(ProbabilityVector([0.5, 0.5]), 2.0 * np.eye(2))
