"""
Tests for the Clifford algebra carried by forms: vee product, Hodge star,
algebraic codifferential and Dirac operator.
"""
import numpy as np
import pytest

from stratafold.errors import AlgebraMismatchError, DegenerateMetricError, InvalidSpecError
from stratafold.services.clifford import (
    CliffordElement,
    GammaConvention,
    MetricSpec,
    accepted_gamma_convention,
    codifferential_alg,
    dirac_operator,
    form_inner_product,
    hodge_square_sign,
    hodge_star,
    interior,
    interior_derivation_defect,
    laplacian_alg,
    lie_derivation_defect,
    non_derivation_witness,
    gamma_convention_residuals,
    vee_product,
)
from stratafold.services.exterior_core import Form, LieAlgebraSpec, Multivector, chevalley_d

SO3 = LieAlgebraSpec.so3()
HEISENBERG = LieAlgebraSpec.heisenberg()
E3 = MetricSpec.euclidean(3)


def element(metric, *forms):
    return CliffordElement(metric, forms[0].algebra, list(forms))


def covector(spec, *indices):
    return Form.basis(spec, *indices)


def random_spd(n, rng):
    A = rng.standard_normal((n, n))
    return A @ A.T + n * np.eye(n)


# ---------------------------------------------------------------------------
# MetricSpec
# ---------------------------------------------------------------------------

def test_metric_signature():
    assert E3.signature == (3, 0, 0)
    assert MetricSpec.lorentzian(4).signature == (3, 1, 0)
    assert MetricSpec(np.diag([1.0, 0.0])).is_degenerate


def test_metric_must_be_symmetric():
    with pytest.raises(InvalidSpecError):
        MetricSpec([[1.0, 2.0], [0.0, 1.0]])


def test_covectors_measured_with_inverse_metric():
    m = MetricSpec(np.diag([4.0, 1.0]))
    assert m.covector_product([1.0, 0.0], [1.0, 0.0]) == pytest.approx(0.25)


# ---------------------------------------------------------------------------
# Vee product
# ---------------------------------------------------------------------------

def test_vee_of_covector_with_itself():
    spec = LieAlgebraSpec.abelian(3)
    e1 = element(E3, covector(spec, 0))
    assert vee_product(e1, e1).allclose(CliffordElement.scalar(E3, spec, 1.0))


def test_vee_of_orthogonal_covectors_is_wedge():
    spec = LieAlgebraSpec.abelian(3)
    product = vee_product(element(E3, covector(spec, 0)), element(E3, covector(spec, 1)))
    assert product.allclose(element(E3, covector(spec, 0, 1)))


def test_vee_contracts_repeated_factor():
    spec = LieAlgebraSpec.abelian(3)
    e1, e2 = element(E3, covector(spec, 0)), element(E3, covector(spec, 1))
    assert vee_product(vee_product(e1, e2), e2).allclose(e1)


def test_vee_lorentzian_timelike_square():
    spec = LieAlgebraSpec.abelian(4)
    m = MetricSpec.lorentzian(4)
    e0 = element(m, covector(spec, 0))
    assert vee_product(e0, e0).allclose(CliffordElement.scalar(m, spec, -1.0))


@pytest.mark.parametrize("seed", range(5))
def test_clifford_relation_general_metric(seed):
    rng = np.random.default_rng(seed)
    m = MetricSpec(random_spd(3, rng))
    spec = LieAlgebraSpec.abelian(3)
    v = Form.random(spec, 1, rng)
    square = vee_product(element(m, v), element(m, v))
    expected = m.covector_product(v.components(), v.components())
    assert square.part(0).coefficient(()) == pytest.approx(expected, abs=1e-12)
    assert square.part(2).norm() <= 1e-12


@pytest.mark.parametrize("metric", [E3, MetricSpec.lorentzian(3), MetricSpec(np.diag([1.0, 0.0, 2.0]))])
def test_vee_is_associative(metric):
    rng = np.random.default_rng(21)
    spec = LieAlgebraSpec.abelian(3)
    for _ in range(10):
        a, b, c = (CliffordElement.random(metric, spec, rng) for _ in range(3))
        left = vee_product(vee_product(a, b), c)
        right = vee_product(a, vee_product(b, c))
        assert (left - right).norm() <= 1e-10


def test_vee_rejects_different_metrics():
    spec = LieAlgebraSpec.abelian(3)
    a = element(E3, covector(spec, 0))
    b = element(MetricSpec.lorentzian(3), covector(spec, 0))
    with pytest.raises(AlgebraMismatchError):
        vee_product(a, b)


def test_accepted_gamma_convention():
    residuals = gamma_convention_residuals(E3)
    assert residuals[GammaConvention.INVOLUTION] <= 1e-12
    assert residuals[GammaConvention.INV_FACTORIAL_SQUARED] > 1e-6
    assert residuals[GammaConvention.INV_FACTORIAL] > 1e-6
    assert accepted_gamma_convention(MetricSpec.lorentzian(3)) is GammaConvention.INVOLUTION


@pytest.mark.parametrize("metric", [E3, MetricSpec.lorentzian(3)])
def test_interior_is_graded_derivation(metric):
    rng = np.random.default_rng(22)
    spec = LieAlgebraSpec.abelian(3)
    for _ in range(10):
        v = Multivector.random(spec, 1, rng)
        a, b = CliffordElement.random(metric, spec, rng), CliffordElement.random(metric, spec, rng)
        assert interior_derivation_defect(v, a, b) <= 1e-10


def test_interior_lowers_grade():
    spec = LieAlgebraSpec.abelian(3)
    a = element(E3, covector(spec, 0, 1))
    assert interior(Multivector.basis(spec, 0), a).allclose(element(E3, covector(spec, 1)))


# ---------------------------------------------------------------------------
# Hodge star
# ---------------------------------------------------------------------------

def test_hodge_of_covector_n3():
    assert hodge_star(covector(SO3, 0), E3) == covector(SO3, 1, 2)


def test_hodge_of_one_is_volume():
    assert hodge_star(Form.scalar(SO3, 1.0), E3) == covector(SO3, 0, 1, 2)


@pytest.mark.parametrize("metric", [E3, MetricSpec.lorentzian(3), MetricSpec.lorentzian(4), MetricSpec.euclidean(4)])
def test_hodge_square_sign_table(metric):
    spec = LieAlgebraSpec.abelian(metric.dim)
    rng = np.random.default_rng(23)
    for k in range(metric.dim + 1):
        a = Form.random(spec, k, rng)
        twice = hodge_star(hodge_star(a, metric), metric)
        assert twice.allclose(hodge_square_sign(k, metric) * a, tol=1e-12)


def test_hodge_square_is_identity_in_three_euclidean_dimensions():
    assert all(hodge_square_sign(k, E3) == 1 for k in range(4))


def test_hodge_rejects_degenerate_metric():
    with pytest.raises(DegenerateMetricError):
        hodge_star(covector(SO3, 0), MetricSpec(np.diag([1.0, 1.0, 0.0])))


def test_form_inner_product_lorentzian():
    spec = LieAlgebraSpec.abelian(4)
    m = MetricSpec.lorentzian(4)
    assert form_inner_product(covector(spec, 0), covector(spec, 0), m) == -1.0
    assert form_inner_product(covector(spec, 0, 1), covector(spec, 0, 1), m) == -1.0


# ---------------------------------------------------------------------------
# Codifferential and Dirac operator
# ---------------------------------------------------------------------------

def test_codifferential_vanishes_on_abelian():
    spec = LieAlgebraSpec.abelian(3)
    rng = np.random.default_rng(24)
    for k in range(1, 4):
        assert codifferential_alg(Form.random(spec, k, rng), spec, E3).is_zero()


def test_codifferential_of_e1_e2_on_so3():
    a = covector(SO3, 0, 1)
    stepwise = -1.0 * hodge_star(chevalley_d(hodge_star(a, E3)), E3)
    result = codifferential_alg(a, SO3, E3)
    assert result.allclose(stepwise)
    assert result.allclose(covector(SO3, 2))


@pytest.mark.parametrize("metric", [E3, MetricSpec.lorentzian(3)])
def test_codifferential_squares_to_zero(metric):
    rng = np.random.default_rng(25)
    for k in range(2, 4):
        a = Form.random(SO3, k, rng)
        assert codifferential_alg(codifferential_alg(a, SO3, metric), SO3, metric).norm() <= 1e-12


def test_dirac_on_abelian_vanishes():
    spec = LieAlgebraSpec.abelian(3)
    a = CliffordElement.random(E3, spec, np.random.default_rng(26))
    assert dirac_operator(a, spec, E3).norm() == 0.0


def test_dirac_of_e3_on_so3():
    a = covector(SO3, 2)
    result = dirac_operator(element(E3, a), SO3, E3)
    oracle = element(E3, chevalley_d(a), codifferential_alg(a, SO3, E3))
    assert result.allclose(oracle)
    assert result.allclose(element(E3, -1.0 * covector(SO3, 0, 1)))


@pytest.mark.parametrize("spec", [SO3, HEISENBERG], ids=lambda s: s.name)
def test_dirac_square_is_laplacian(spec):
    rng = np.random.default_rng(27)
    for _ in range(5):
        a = CliffordElement.random(E3, spec, rng)
        twice = dirac_operator(dirac_operator(a, spec, E3), spec, E3)
        laplacian = CliffordElement(E3, spec, [laplacian_alg(f, spec, E3) for f in a.parts().values()])
        assert (twice - laplacian).norm() <= 1e-10


# ---------------------------------------------------------------------------
# Derivation properties
# ---------------------------------------------------------------------------

def test_d_is_not_a_derivation_of_vee():
    witness = non_derivation_witness()
    assert witness.operator == "d"
    assert witness.residual > 1e-6


def test_central_lie_derivative_is_a_derivation():
    rng = np.random.default_rng(28)
    v = Multivector.basis(HEISENBERG, 2)
    for _ in range(5):
        a, b = CliffordElement.random(E3, HEISENBERG, rng), CliffordElement.random(E3, HEISENBERG, rng)
        assert lie_derivation_defect(v, a, b) <= 1e-12


def test_non_central_lie_derivative_is_not_a_derivation():
    a = element(E3, covector(HEISENBERG, 2))
    b = element(E3, covector(HEISENBERG, 1))
    assert lie_derivation_defect(Multivector.basis(HEISENBERG, 0), a, b) == pytest.approx(1.0)
