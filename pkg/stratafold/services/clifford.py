"""
Clifford algebra realized on the exterior algebra of forms.

A metric g on V induces g^{ab} on V*; the vee product turns the forms
into a Clifford algebra, and the Hodge star, the algebraic codifferential
and the Dirac operator d + delta are built on top of the Chevalley-Eilenberg
differential from `exterior_core`.

Every product is evaluated in a g-orthonormal coframe obtained by
eigendecomposition, then mapped back to the original coframe.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

from stratafold.errors import (
    AlgebraMismatchError,
    DegenerateMetricError,
    GradeMismatchError,
    InvalidSpecError,
    InvariantFailure,
)
from stratafold.services.exterior_core import (
    Form,
    LieAlgebraSpec,
    Multivector,
    chevalley_d,
    contract,
    lie_derivative_form,
    permutation_sign,
    wedge,
)

logger = logging.getLogger(__name__)

METRIC_SYMMETRY_TOL = 1e-12


class GammaConvention(str, Enum):
    """Weighting of the s-fold contraction terms in the vee product."""
    INV_FACTORIAL_SQUARED = "inverse-factorial-squared"
    INV_FACTORIAL = "inverse-factorial"
    INVOLUTION = "involution"


DEFAULT_GAMMA = GammaConvention.INVOLUTION


def _exterior_power(M: np.ndarray, k: int) -> np.ndarray:
    """Matrix of the k-th exterior power of M in lexicographic basis order."""
    n = M.shape[0]
    keys = list(itertools.combinations(range(n), k))
    out = np.empty((len(keys), len(keys)))
    for r, J in enumerate(keys):
        for s, I in enumerate(keys):
            out[r, s] = np.linalg.det(M[np.ix_(J, I)]) if k else 1.0
    return out


class MetricSpec:
    """
    Symmetric bilinear form g on V.

    Covectors are measured with the inverse metric; on a kernel direction
    of a degenerate g the inverse is taken to vanish. Degenerate metrics
    are accepted by the vee product and rejected by the Hodge star.
    """

    def __init__(self, g):
        arr = np.array(g, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise InvalidSpecError(f"metric must be a square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidSpecError("metric entries must be finite")
        scale = max(1.0, float(np.max(np.abs(arr))))
        if np.max(np.abs(arr - arr.T)) > METRIC_SYMMETRY_TOL * scale:
            raise InvalidSpecError("metric must be symmetric")
        arr = 0.5 * (arr + arr.T)
        arr.setflags(write=False)
        self.matrix = arr

        if np.array_equal(arr, np.diag(np.diag(arr))):
            eigvals = np.diag(arr).copy()
            U = np.eye(self.dim)
        else:
            eigvals, U = np.linalg.eigh(arr)
        kernel = np.abs(eigvals) <= METRIC_SYMMETRY_TOL * scale

        self.positive = int(np.sum((eigvals > 0) & ~kernel))
        self.negative = int(np.sum((eigvals < 0) & ~kernel))
        self.nullity = int(np.sum(kernel))

        inverse_eigvals = np.where(kernel, 0.0, 1.0 / np.where(kernel, 1.0, eigvals))
        self.frame_signs = np.sign(inverse_eigvals)
        scales = np.where(kernel, 1.0, np.sqrt(np.abs(inverse_eigvals)))
        self._frame = np.diag(scales) @ U.T
        self._frame_inv = np.linalg.inv(self._frame)
        self._is_identity_frame = np.array_equal(self._frame, np.eye(self.dim))
        self.orientation = 1.0 if np.linalg.det(self._frame) > 0 else -1.0
        self._inverse = U @ np.diag(inverse_eigvals) @ U.T
        self._powers: Dict[int, np.ndarray] = {}
        self._inverse_powers: Dict[int, np.ndarray] = {}

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_degenerate(self) -> bool:
        return self.nullity > 0

    @property
    def signature(self) -> tuple:
        """(positive, negative, zero) eigenvalue counts."""
        return self.positive, self.negative, self.nullity

    @classmethod
    def euclidean(cls, n: int) -> "MetricSpec":
        return cls(np.eye(n))

    @classmethod
    def lorentzian(cls, n: int) -> "MetricSpec":
        """diag(-1, 1, ..., 1)."""
        return cls(np.diag([-1.0] + [1.0] * (n - 1)))

    def is_compatible(self, other: "MetricSpec") -> bool:
        return self is other or np.array_equal(self.matrix, other.matrix)

    def covector_product(self, u: Sequence[float], v: Sequence[float]) -> float:
        """g^{ab} u_a v_b."""
        return float(np.asarray(u, dtype=float) @ self._inverse @ np.asarray(v, dtype=float))

    def _power(self, k: int, inverse: bool) -> np.ndarray:
        cache = self._inverse_powers if inverse else self._powers
        if k not in cache:
            cache[k] = _exterior_power(self._frame_inv if inverse else self._frame, k)
        return cache[k]

    def to_frame(self, form: Form) -> Form:
        """Coefficients of `form` in the orthonormal coframe."""
        if self._is_identity_frame or form.grade > self.dim:
            return form
        values = self._power(form.grade, inverse=False) @ form.components()
        return Form.from_components(form.algebra, form.grade, values)

    def from_frame(self, form: Form) -> Form:
        if self._is_identity_frame or form.grade > self.dim:
            return form
        values = self._power(form.grade, inverse=True) @ form.components()
        return Form.from_components(form.algebra, form.grade, values)

    def __repr__(self) -> str:
        return f"MetricSpec(dim={self.dim}, signature={self.signature})"


class CliffordElement:
    """Inhomogeneous form, grade by grade, under a fixed metric."""

    def __init__(self, metric: MetricSpec, algebra: LieAlgebraSpec, parts: Union[Mapping[int, Form], Iterable[Form], None] = None):
        if algebra.dim != metric.dim:
            raise AlgebraMismatchError(f"metric of dimension {metric.dim} on algebra of dimension {algebra.dim}")
        forms = parts.values() if isinstance(parts, Mapping) else (parts or ())
        collected: Dict[int, Form] = {}
        for form in forms:
            if not isinstance(form, Form):
                raise GradeMismatchError(f"Clifford parts must be forms, got {type(form).__name__}")
            if not form.algebra.is_compatible(algebra):
                raise AlgebraMismatchError("Clifford part belongs to a different Lie algebra")
            if form.grade > metric.dim:
                if form.is_zero():
                    continue
                raise GradeMismatchError(f"grade {form.grade} exceeds dimension {metric.dim}")
            collected[form.grade] = collected[form.grade] + form if form.grade in collected else form
        self.metric = metric
        self.algebra = algebra
        self._parts = {k: f for k, f in sorted(collected.items()) if not f.is_zero()}

    @classmethod
    def from_form(cls, metric: MetricSpec, form: Form) -> "CliffordElement":
        return cls(metric, form.algebra, [form])

    @classmethod
    def scalar(cls, metric: MetricSpec, algebra: LieAlgebraSpec, value: float) -> "CliffordElement":
        return cls(metric, algebra, [Form.scalar(algebra, value)])

    @classmethod
    def random(cls, metric: MetricSpec, algebra: LieAlgebraSpec, rng: np.random.Generator) -> "CliffordElement":
        """Random element with every grade populated."""
        return cls(metric, algebra, [Form.random(algebra, k, rng) for k in range(metric.dim + 1)])

    @property
    def grades(self) -> List[int]:
        return list(self._parts)

    def part(self, grade: int) -> Form:
        return self._parts.get(grade, Form.zero(self.algebra, grade))

    def parts(self) -> Dict[int, Form]:
        return dict(self._parts)

    def _check_compatible(self, other: "CliffordElement") -> None:
        if not isinstance(other, CliffordElement):
            raise GradeMismatchError(f"expected a CliffordElement, got {type(other).__name__}")
        if not self.metric.is_compatible(other.metric):
            raise AlgebraMismatchError("Clifford elements carry different metrics")
        if not self.algebra.is_compatible(other.algebra):
            raise AlgebraMismatchError("Clifford elements belong to different Lie algebras")

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        self._check_compatible(other)
        return CliffordElement(self.metric, self.algebra, list(self._parts.values()) + list(other._parts.values()))

    def __neg__(self) -> "CliffordElement":
        return CliffordElement(self.metric, self.algebra, [-f for f in self._parts.values()])

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        return self + (-other)

    def __mul__(self, scalar: float) -> "CliffordElement":
        if not isinstance(scalar, (int, float, np.integer, np.floating)):
            return NotImplemented
        return CliffordElement(self.metric, self.algebra, [scalar * f for f in self._parts.values()])

    __rmul__ = __mul__

    def norm(self) -> float:
        return max((f.norm() for f in self._parts.values()), default=0.0)

    def allclose(self, other: "CliffordElement", tol: float = 1e-12) -> bool:
        return (self - other).norm() <= tol

    def __repr__(self) -> str:
        inner = ", ".join(repr(f) for f in self._parts.values()) or "0"
        return f"CliffordElement({inner})"


def involution(a: CliffordElement) -> CliffordElement:
    """Grade involution: (-1)^k on the grade-k part."""
    return CliffordElement(a.metric, a.algebra, [(-1) ** k * f for k, f in a._parts.items()])


def interior(v: Multivector, a: CliffordElement) -> CliffordElement:
    """Contraction i_v applied grade by grade."""
    return CliffordElement(a.metric, a.algebra, [contract(v, f) for k, f in a._parts.items() if k > 0])


def _vee_in_frame(phi: Form, omega: Form, signs: np.ndarray, convention: GammaConvention) -> Dict[int, Form]:
    """Vee product of homogeneous forms written in an orthonormal coframe."""
    algebra = phi.algebra
    out: Dict[int, Form] = {}
    for s in range(min(phi.grade, omega.grade) + 1):
        order_sign = (-1) ** (s * (s - 1) // 2)
        weight = 1.0 / math.factorial(s) if convention is GammaConvention.INV_FACTORIAL_SQUARED else 1.0
        for subset in itertools.combinations(range(algebra.dim), s):
            eta = float(np.prod([signs[c] for c in subset])) if subset else 1.0
            if eta == 0.0:
                continue
            left, right = phi, omega
            for c in reversed(subset):
                axis = Multivector.basis(algebra, c)
                left = contract(axis, left)
                right = contract(axis, right)
                if left.is_zero() or right.is_zero():
                    break
            if left.is_zero() or right.is_zero():
                continue
            if convention is GammaConvention.INVOLUTION and (s * left.grade) % 2:
                left = -left
            term = (order_sign * eta * weight) * wedge(left, right)
            grade = term.grade
            out[grade] = out[grade] + term if grade in out else term
    return out


def vee_product(
    a: CliffordElement,
    b: CliffordElement,
    convention: GammaConvention = DEFAULT_GAMMA,
) -> CliffordElement:
    """
    Clifford product on forms.

    In an orthonormal coframe with signs eta_c,
        phi v omega = sum_s (-1)^(s(s-1)/2) sum_{|S|=s} eta_S gamma_s(i_S phi) ^ (i_S omega)
    where gamma_s is fixed by `convention`.

    Args:
        a: Left factor
        b: Right factor
        convention: Weighting of the s-fold contraction terms

    Returns:
        The product, mapped back to the original coframe
    """
    a._check_compatible(b)
    metric = a.metric
    collected: Dict[int, Form] = {}
    frame_b = {q: metric.to_frame(omega) for q, omega in b._parts.items()}
    for phi in a._parts.values():
        phi_hat = metric.to_frame(phi)
        for omega_hat in frame_b.values():
            for grade, term in _vee_in_frame(phi_hat, omega_hat, metric.frame_signs, convention).items():
                collected[grade] = collected[grade] + term if grade in collected else term
    return CliffordElement(metric, a.algebra, [metric.from_frame(f) for f in collected.values()])


def _check_metric(a: Form, m: MetricSpec) -> None:
    if a.algebra.dim != m.dim:
        raise AlgebraMismatchError(f"form of dimension {a.algebra.dim} with metric of dimension {m.dim}")


def hodge_star(a: Form, m: MetricSpec) -> Form:
    """
    Hodge star with respect to the metric volume form.

    Maps grade k to grade n - k; *1 is the volume form of the orthonormal
    coframe oriented like e^1 ^ ... ^ e^n.
    """
    _check_metric(a, m)
    if m.is_degenerate:
        raise DegenerateMetricError("Hodge star needs a nondegenerate metric")
    n = m.dim
    hat = m.to_frame(a)
    terms = {}
    for I, x in hat.coeffs.items():
        complement = tuple(i for i in range(n) if i not in I)
        sign, _ = permutation_sign(I + complement)
        eta = float(np.prod([m.frame_signs[i] for i in I])) if I else 1.0
        terms[complement] = m.orientation * sign * eta * x
    return m.from_frame(Form(a.algebra, n - a.grade, terms))


def hodge_square_sign(k: int, m: MetricSpec) -> int:
    """** = (-1)^(k(n-k) + s) on k-forms, s the number of negative eigenvalues."""
    return (-1) ** (k * (m.dim - k) + m.negative)


def form_inner_product(a: Form, b: Form, m: MetricSpec) -> float:
    """Pointwise scalar product of two forms of equal grade induced by g^{ab}."""
    _check_metric(a, m)
    if a.grade != b.grade:
        raise GradeMismatchError(f"cannot pair grade {a.grade} with grade {b.grade}")
    a_hat, b_hat = m.to_frame(a), m.to_frame(b)
    total = 0.0
    for I, x in a_hat.coeffs.items():
        eta = float(np.prod([m.frame_signs[i] for i in I])) if I else 1.0
        total += eta * x * b_hat.coeffs.get(I, 0.0)
    return total


def _check_spec(a: Form, spec: LieAlgebraSpec) -> None:
    if not a.algebra.is_compatible(spec):
        raise AlgebraMismatchError("form and Lie algebra spec disagree")


def codifferential_alg(a: Form, spec: LieAlgebraSpec, m: MetricSpec) -> Form:
    """delta = (-1)^(n-k) (-1)^s * d * on k-forms; grade 0 maps to zero."""
    _check_spec(a, spec)
    _check_metric(a, m)
    if m.is_degenerate:
        raise DegenerateMetricError("codifferential needs a nondegenerate metric")
    if a.grade == 0:
        return Form.zero(a.algebra, 0)
    sign = (-1) ** ((m.dim - a.grade) + m.negative)
    return sign * hodge_star(chevalley_d(hodge_star(a, m)), m)


def laplacian_alg(a: Form, spec: LieAlgebraSpec, m: MetricSpec) -> Form:
    """d delta + delta d on a homogeneous form."""
    n, k = m.dim, a.grade
    result = Form.zero(a.algebra, k)
    if k > 0:
        result = result + chevalley_d(codifferential_alg(a, spec, m))
    if k < n:
        result = result + codifferential_alg(chevalley_d(a), spec, m)
    return result


def dirac_operator(a: CliffordElement, spec: LieAlgebraSpec, m: MetricSpec) -> CliffordElement:
    """D = d + delta applied grade by grade."""
    if not a.metric.is_compatible(m):
        raise AlgebraMismatchError("Clifford element carries a different metric")
    n = m.dim
    pieces: List[Form] = []
    for k, form in a._parts.items():
        _check_spec(form, spec)
        if k < n:
            pieces.append(chevalley_d(form))
        if k > 0:
            pieces.append(codifferential_alg(form, spec, m))
    return CliffordElement(m, a.algebra, pieces)


def _basis_blades(m: MetricSpec, algebra: LieAlgebraSpec, max_grade: int = 2) -> List[CliffordElement]:
    blades = []
    for k in range(min(max_grade, m.dim) + 1):
        for key in itertools.combinations(range(m.dim), k):
            blades.append(CliffordElement(m, algebra, [Form.basis(algebra, *key)]))
    return blades


def gamma_convention_residuals(m: MetricSpec, algebra: Optional[LieAlgebraSpec] = None) -> Dict[GammaConvention, float]:
    """
    Largest residual of each gamma convention over grade <= 2 basis blades.

    The residual combines the Clifford relation v v v = g(v, v) on basis
    covectors and sums of pairs with associativity over all blade triples.
    """
    algebra = algebra or LieAlgebraSpec.abelian(m.dim)
    blades = _basis_blades(m, algebra)
    covectors = [Form.basis(algebra, i) for i in range(m.dim)]
    covectors += [Form.basis(algebra, i) + Form.basis(algebra, j) for i, j in itertools.combinations(range(m.dim), 2)]

    residuals: Dict[GammaConvention, float] = {}
    for convention in GammaConvention:
        worst = 0.0
        for v in covectors:
            element = CliffordElement.from_form(m, v)
            expected = CliffordElement.scalar(m, algebra, m.covector_product(v.components(), v.components()))
            worst = max(worst, (vee_product(element, element, convention) - expected).norm())
        for x, y, z in itertools.product(blades, repeat=3):
            left = vee_product(vee_product(x, y, convention), z, convention)
            right = vee_product(x, vee_product(y, z, convention), convention)
            worst = max(worst, (left - right).norm())
        residuals[convention] = worst
        logger.info(f"gamma convention {convention.value}: max blade residual {worst:.3e}")
    return residuals


def accepted_gamma_convention(m: MetricSpec, tol: float = 1e-12) -> GammaConvention:
    """First convention, in declaration order, that passes every blade check."""
    residuals = gamma_convention_residuals(m)
    for convention in GammaConvention:
        if residuals[convention] <= tol:
            return convention
    raise InvariantFailure(f"no gamma convention satisfies the Clifford relation and associativity: {residuals}")


@dataclass(frozen=True)
class DerivationWitness:
    """Recorded inputs on which an operator fails to derive the vee product."""
    operator: str
    algebra: LieAlgebraSpec
    metric: MetricSpec
    first: Form
    second: Form
    residual: float


def non_derivation_witness() -> DerivationWitness:
    """
    d is not a derivation of the vee product.

    Heisenberg algebra, Euclidean metric, a = e^2 and b = e^0:
    d(a v b) vanishes while da v b +/- a v db = e^1 for either sign.
    """
    spec = LieAlgebraSpec.heisenberg()
    metric = MetricSpec.euclidean(spec.dim)
    first, second = Form.basis(spec, 2), Form.basis(spec, 0)
    a, b = CliffordElement.from_form(metric, first), CliffordElement.from_form(metric, second)
    da = dirac_exterior(a)
    db = dirac_exterior(b)
    lhs = dirac_exterior(vee_product(a, b))
    residual = min(
        (lhs - (vee_product(da, b) + vee_product(a, db))).norm(),
        (lhs - (vee_product(da, b) - vee_product(a, db))).norm(),
    )
    return DerivationWitness("d", spec, metric, first, second, residual)


def dirac_exterior(a: CliffordElement) -> CliffordElement:
    """The exterior differential alone, grade by grade."""
    return CliffordElement(a.metric, a.algebra, [chevalley_d(f) for k, f in a._parts.items() if k < a.metric.dim])


def lie_derivative_element(v: Multivector, a: CliffordElement) -> CliffordElement:
    return CliffordElement(a.metric, a.algebra, [lie_derivative_form(v, f) for f in a._parts.values()])


def lie_derivation_defect(v: Multivector, a: CliffordElement, b: CliffordElement) -> float:
    """Size of L_v(a v b) - L_v a v b - a v L_v b."""
    lhs = lie_derivative_element(v, vee_product(a, b))
    rhs = vee_product(lie_derivative_element(v, a), b) + vee_product(a, lie_derivative_element(v, b))
    return (lhs - rhs).norm()


def interior_derivation_defect(v: Multivector, a: CliffordElement, b: CliffordElement) -> float:
    """Size of i_v(a v b) - (i_v a) v b - eta(a) v (i_v b)."""
    lhs = interior(v, vee_product(a, b))
    rhs = vee_product(interior(v, a), b) + vee_product(involution(a), interior(v, b))
    return (lhs - rhs).norm()
