"""
Exterior algebra over a finite-dimensional real Lie algebra.

Multivectors (elements of the exterior algebra of V) carry the Koszul
boundary, insertion and the Schouten-Nijenhuis bracket; forms (elements
of the exterior algebra of V*) carry the Chevalley-Eilenberg differential
and contractions. Both are stored sparsely keyed by strictly increasing
index tuples. All basis indices are 0-based.
"""

import itertools
import logging
from types import MappingProxyType
from typing import Callable, Dict, Iterator, Mapping, Optional, Sequence, Tuple, Type, TypeVar, Union

import numpy as np

from stratafold.errors import (
    AlgebraMismatchError,
    DomainError,
    GradeMismatchError,
    InvalidSpecError,
)

logger = logging.getLogger(__name__)

Index = Tuple[int, ...]

STRUCTURE_TOL = 1e-10


def permutation_sign(indices: Sequence[int]) -> Tuple[int, Index]:
    """
    Sort an index sequence, tracking the parity of the permutation.

    Returns:
        (sign, sorted indices). The sign is 0 when an index repeats.
    """
    items = [int(i) for i in indices]
    if len(set(items)) != len(items):
        return 0, ()
    sign = 1
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            if items[a] > items[b]:
                sign = -sign
    return sign, tuple(sorted(items))


def jacobi_residual(c: np.ndarray) -> float:
    """Largest violation of the Jacobi identity for structure constants c[i, j, k]."""
    jacobi = (
        np.einsum("ijm,mkl->ijkl", c, c)
        + np.einsum("jkm,mil->ijkl", c, c)
        + np.einsum("kim,mjl->ijkl", c, c)
    )
    return float(np.max(np.abs(jacobi))) if jacobi.size else 0.0


class LieAlgebraSpec:
    """
    Real Lie algebra defined by structure constants.

    [e_i, e_j] = sum_k c[i, j, k] e_k. Antisymmetry and the Jacobi identity
    are checked on construction; a spec that fails either is rejected.
    """

    def __init__(self, structure_constants, name: Optional[str] = None, tol: float = STRUCTURE_TOL):
        c = np.array(structure_constants, dtype=float)
        if c.ndim != 3 or c.shape[0] == 0 or len(set(c.shape)) != 1:
            raise InvalidSpecError(f"structure constants must have shape (n, n, n), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidSpecError("structure constants must be finite")

        scale = max(1.0, float(np.max(np.abs(c))))
        antisymmetry = float(np.max(np.abs(c + c.transpose(1, 0, 2))))
        if antisymmetry > tol * scale:
            raise InvalidSpecError(f"structure constants are not antisymmetric (residual {antisymmetry:.3e})")
        jacobi = jacobi_residual(c)
        if jacobi > tol * scale ** 2:
            raise InvalidSpecError(f"structure constants violate the Jacobi identity (residual {jacobi:.3e})")

        c.setflags(write=False)
        self._c = c
        self.name = name or f"lie{c.shape[0]}"
        logger.debug(f"Built Lie algebra {self.name} (dim={self.dim}, jacobi residual {jacobi:.2e})")

    @property
    def dim(self) -> int:
        return self._c.shape[0]

    @property
    def tensor(self) -> np.ndarray:
        """Read-only structure constants c[i, j, k]."""
        return self._c

    @property
    def is_abelian(self) -> bool:
        return not np.any(self._c)

    def is_compatible(self, other: "LieAlgebraSpec") -> bool:
        """True when both specs describe the same bracket on the same basis."""
        return self is other or (self.dim == other.dim and np.array_equal(self._c, other._c))

    def bracket(self, u, v) -> np.ndarray:
        """Lie bracket of two coordinate vectors."""
        return np.einsum("i,j,ijk->k", np.asarray(u, dtype=float), np.asarray(v, dtype=float), self._c)

    def change_basis(self, P, name: Optional[str] = None) -> "LieAlgebraSpec":
        """
        Structure constants in the basis f_a = sum_i P[i, a] e_i.

        Args:
            P: Invertible n x n matrix whose columns are the new basis vectors

        Returns:
            The same Lie algebra expressed in the new basis
        """
        P = np.asarray(P, dtype=float)
        if P.shape != (self.dim, self.dim):
            raise DomainError(f"change of basis must be {self.dim}x{self.dim}, got {P.shape}")
        if np.linalg.matrix_rank(P) < self.dim:
            raise DomainError("change of basis matrix is singular")
        P_inv = np.linalg.inv(P)
        c = np.einsum("ia,jb,ijk,ck->abc", P, P, self._c, P_inv)
        return LieAlgebraSpec(c, name=name or f"{self.name}'")

    @classmethod
    def from_entries(cls, dim: int, entries: Sequence[Sequence[float]], name: Optional[str] = None) -> "LieAlgebraSpec":
        """
        Build a spec from a sparse list of [i, j, k, value] entries.

        Entries whose antisymmetric partner [j, i, k] is not listed are
        completed with the opposite sign.
        """
        c = np.zeros((dim, dim, dim))
        listed = set()
        for entry in entries:
            if len(entry) != 4:
                raise InvalidSpecError(f"structure constant entry must be [i, j, k, value], got {entry}")
            i, j, k = (int(x) for x in entry[:3])
            if not all(0 <= x < dim for x in (i, j, k)):
                raise InvalidSpecError(f"structure constant index out of range in {entry}")
            c[i, j, k] = float(entry[3])
            listed.add((i, j, k))
        for i, j, k in listed:
            if (j, i, k) not in listed:
                c[j, i, k] = -c[i, j, k]
        return cls(c, name=name)

    @classmethod
    def from_matrix_basis(cls, matrices, name: Optional[str] = None) -> "LieAlgebraSpec":
        """Structure constants of a matrix Lie algebra spanned by `matrices` under the commutator."""
        mats = np.asarray(matrices, dtype=float)
        n = mats.shape[0]
        columns = mats.reshape(n, -1).T
        if np.linalg.matrix_rank(columns) < n:
            raise InvalidSpecError("matrix basis is linearly dependent")
        c = np.zeros((n, n, n))
        for i, j in itertools.product(range(n), repeat=2):
            commutator = (mats[i] @ mats[j] - mats[j] @ mats[i]).ravel()
            coeffs = np.linalg.lstsq(columns, commutator, rcond=None)[0]
            if np.max(np.abs(columns @ coeffs - commutator), initial=0.0) > 1e-9:
                raise InvalidSpecError("matrix basis is not closed under the commutator")
            c[i, j] = coeffs
        return cls(c, name=name)

    @classmethod
    def abelian(cls, n: int) -> "LieAlgebraSpec":
        return cls(np.zeros((n, n, n)), name=f"abelian{n}")

    @classmethod
    def so3(cls) -> "LieAlgebraSpec":
        """[e_i, e_j] = eps_ijk e_k."""
        c = np.zeros((3, 3, 3))
        for perm in itertools.permutations(range(3)):
            c[perm] = permutation_sign(perm)[0]
        return cls(c, name="so3")

    @classmethod
    def heisenberg(cls) -> "LieAlgebraSpec":
        """[e_0, e_1] = e_2 with e_2 central."""
        c = np.zeros((3, 3, 3))
        c[0, 1, 2] = 1.0
        c[1, 0, 2] = -1.0
        return cls(c, name="heisenberg")

    @classmethod
    def gl2(cls) -> "LieAlgebraSpec":
        """gl(2, R) in the matrix-unit basis E11, E12, E21, E22."""
        units = []
        for a, b in itertools.product(range(2), repeat=2):
            unit = np.zeros((2, 2))
            unit[a, b] = 1.0
            units.append(unit)
        return cls.from_matrix_basis(units, name="gl2")

    def __repr__(self) -> str:
        return f"LieAlgebraSpec(name={self.name!r}, dim={self.dim})"


class Endomorphism:
    """Linear map T of the Lie algebra; T(e_j) = sum_i T[i, j] e_i."""

    def __init__(self, algebra: LieAlgebraSpec, matrix):
        m = np.array(matrix, dtype=float)
        if m.shape != (algebra.dim, algebra.dim):
            raise DomainError(f"endomorphism must be {algebra.dim}x{algebra.dim}, got {m.shape}")
        m.setflags(write=False)
        self.algebra = algebra
        self.matrix = m

    @classmethod
    def identity(cls, algebra: LieAlgebraSpec) -> "Endomorphism":
        return cls(algebra, np.eye(algebra.dim))

    @classmethod
    def diag(cls, algebra: LieAlgebraSpec, entries: Sequence[float]) -> "Endomorphism":
        return cls(algebra, np.diag(entries))


class DualPoint:
    """Point of V* in the dual basis."""

    def __init__(self, coords: Sequence[float]):
        arr = np.array(coords, dtype=float)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)):
            raise DomainError("dual point coordinates must be a finite real vector")
        arr.setflags(write=False)
        self.coords = arr


G = TypeVar("G", bound="GradedTensor")


class GradedTensor:
    """Homogeneous antisymmetric tensor stored by strictly increasing index tuples."""

    symbol = "e"

    def __init__(self, algebra: LieAlgebraSpec, grade: int, coeffs: Optional[Mapping] = None):
        if grade < 0:
            raise GradeMismatchError(f"grade must be nonnegative, got {grade}")
        n = algebra.dim
        terms: Dict[Index, float] = {}
        for key, value in (coeffs or {}).items():
            key = (int(key),) if isinstance(key, (int, np.integer)) else tuple(int(i) for i in key)
            if len(key) != grade:
                raise GradeMismatchError(f"index tuple {key} does not have length {grade}")
            if any(i < 0 or i >= n for i in key):
                raise DomainError(f"index tuple {key} out of range for dimension {n}")
            _accumulate(terms, key, float(value))
        self.algebra = algebra
        self.grade = grade
        self._coeffs = {k: v for k, v in terms.items() if v != 0.0}

    @classmethod
    def _from_terms(cls: Type[G], algebra: LieAlgebraSpec, grade: int, terms: Dict[Index, float]) -> G:
        obj = cls.__new__(cls)
        obj.algebra = algebra
        obj.grade = grade
        obj._coeffs = {k: v for k, v in terms.items() if v != 0.0}
        return obj

    @classmethod
    def zero(cls: Type[G], algebra: LieAlgebraSpec, grade: int) -> G:
        return cls._from_terms(algebra, grade, {})

    @classmethod
    def scalar(cls: Type[G], algebra: LieAlgebraSpec, value: float) -> G:
        return cls._from_terms(algebra, 0, {(): float(value)})

    @classmethod
    def basis(cls: Type[G], algebra: LieAlgebraSpec, *indices: int) -> G:
        """Basis element e_{i1} ^ ... ^ e_{ip} (any order, sign-normalized)."""
        return cls(algebra, len(indices), {tuple(indices): 1.0})

    @classmethod
    def from_vector(cls: Type[G], algebra: LieAlgebraSpec, vector: Sequence[float]) -> G:
        vec = np.asarray(vector, dtype=float)
        if vec.shape != (algebra.dim,):
            raise DomainError(f"vector must have length {algebra.dim}")
        return cls._from_terms(algebra, 1, {(i,): float(x) for i, x in enumerate(vec)})

    @classmethod
    def from_components(cls: Type[G], algebra: LieAlgebraSpec, grade: int, values: Sequence[float]) -> G:
        """Inverse of `components`."""
        keys = list(itertools.combinations(range(algebra.dim), grade))
        values = np.asarray(values, dtype=float)
        if values.shape != (len(keys),):
            raise DomainError(f"expected {len(keys)} components for grade {grade}")
        return cls._from_terms(algebra, grade, dict(zip(keys, (float(v) for v in values))))

    @classmethod
    def random(cls: Type[G], algebra: LieAlgebraSpec, grade: int, rng: np.random.Generator) -> G:
        count = len(list(itertools.combinations(range(algebra.dim), grade)))
        return cls.from_components(algebra, grade, rng.standard_normal(count))

    @property
    def coeffs(self) -> Mapping[Index, float]:
        return MappingProxyType(self._coeffs)

    def coefficient(self, indices: Sequence[int]) -> float:
        """Coefficient on an index tuple given in any order."""
        sign, key = permutation_sign(indices)
        if sign == 0 or len(key) != self.grade:
            return 0.0
        return sign * self._coeffs.get(key, 0.0)

    def components(self) -> np.ndarray:
        """Dense coefficients in lexicographic basis order."""
        keys = itertools.combinations(range(self.algebra.dim), self.grade)
        return np.array([self._coeffs.get(k, 0.0) for k in keys], dtype=float)

    def items(self) -> Iterator[Tuple[Index, float]]:
        return iter(sorted(self._coeffs.items()))

    def is_zero(self) -> bool:
        return not self._coeffs

    def norm(self) -> float:
        """Largest absolute coefficient."""
        return max((abs(v) for v in self._coeffs.values()), default=0.0)

    def allclose(self, other: "GradedTensor", tol: float = 1e-12) -> bool:
        return (self - other).norm() <= tol

    def _check_compatible(self, other: "GradedTensor") -> None:
        if type(self) is not type(other):
            raise AlgebraMismatchError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if not self.algebra.is_compatible(other.algebra):
            raise AlgebraMismatchError("operands belong to different Lie algebras")
        if self.grade != other.grade:
            raise GradeMismatchError(f"grades differ: {self.grade} and {other.grade}")

    def __add__(self: G, other: G) -> G:
        self._check_compatible(other)
        terms = dict(self._coeffs)
        for key, value in other._coeffs.items():
            terms[key] = terms.get(key, 0.0) + value
        return type(self)._from_terms(self.algebra, self.grade, terms)

    def __neg__(self: G) -> G:
        return type(self)._from_terms(self.algebra, self.grade, {k: -v for k, v in self._coeffs.items()})

    def __sub__(self: G, other: G) -> G:
        return self + (-other)

    def __mul__(self: G, scalar: float) -> G:
        if not isinstance(scalar, (int, float, np.integer, np.floating)):
            return NotImplemented
        s = float(scalar)
        return type(self)._from_terms(self.algebra, self.grade, {k: s * v for k, v in self._coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        return (
            self.algebra.is_compatible(other.algebra)
            and self.grade == other.grade
            and self._coeffs == other._coeffs
        )

    __hash__ = None

    def __repr__(self) -> str:
        if not self._coeffs:
            return f"{type(self).__name__}(0, grade={self.grade})"
        parts = []
        for key, value in self.items():
            label = "^".join(f"{self.symbol}{i}" for i in key) or "1"
            parts.append(f"{value:g}*{label}")
        return f"{type(self).__name__}({' + '.join(parts)})"


class Multivector(GradedTensor):
    """Element of the p-th exterior power of V."""

    symbol = "e"


class Form(GradedTensor):
    """Element of the p-th exterior power of V*, over the dual basis."""

    symbol = "e^"


GradedElement = Union[Multivector, Form]


def _accumulate(terms: Dict[Index, float], indices: Sequence[int], value: float) -> None:
    sign, key = permutation_sign(indices)
    if sign:
        terms[key] = terms.get(key, 0.0) + sign * value


def _check_same_algebra(a: GradedTensor, b: GradedTensor) -> None:
    if not a.algebra.is_compatible(b.algebra):
        raise AlgebraMismatchError("operands belong to different Lie algebras")


def _check_kind(a, kind: type) -> None:
    if not isinstance(a, kind):
        raise GradeMismatchError(f"expected a {kind.__name__}, got {type(a).__name__}")


def _check_vector(v) -> None:
    if not isinstance(v, Multivector) or v.grade != 1:
        raise GradeMismatchError("expected a grade-1 multivector")


def wedge(a: GradedElement, b: GradedElement) -> GradedElement:
    """Exterior product; zero of grade p+q when p+q exceeds the dimension."""
    if type(a) is not type(b):
        raise AlgebraMismatchError(f"cannot wedge {type(a).__name__} with {type(b).__name__}")
    _check_same_algebra(a, b)
    terms: Dict[Index, float] = {}
    for I, x in a._coeffs.items():
        for J, y in b._coeffs.items():
            _accumulate(terms, I + J, x * y)
    return type(a)._from_terms(a.algebra, a.grade + b.grade, terms)


def koszul_boundary(a: Multivector) -> Multivector:
    """
    Koszul boundary on multivectors.

    d(v_1 ^ ... ^ v_p) = sum_{i<j} (-1)^(i+j+1) [v_i, v_j] ^ v_1 ^ ... (omit i, j) ... ^ v_p
    with 1-based positions. Grades 0 and 1 map to the zero scalar.
    """
    _check_kind(a, Multivector)
    if a.grade <= 1:
        return Multivector.zero(a.algebra, 0)
    c = a.algebra.tensor
    terms: Dict[Index, float] = {}
    for I, x in a._coeffs.items():
        for p, q in itertools.combinations(range(a.grade), 2):
            # 0-based positions: (-1)^((p+1)+(q+1)+1) = (-1)^(p+q+1)
            sign = 1.0 if (p + q) % 2 else -1.0
            rest = I[:p] + I[p + 1:q] + I[q + 1:]
            row = c[I[p], I[q]]
            for k in np.flatnonzero(row):
                _accumulate(terms, (int(k),) + rest, sign * x * row[k])
    return Multivector._from_terms(a.algebra, a.grade - 1, terms)


def insert(v: Multivector, a: Multivector) -> Multivector:
    """Exterior multiplication eps_v(a) = v ^ a."""
    _check_vector(v)
    _check_kind(a, Multivector)
    return wedge(v, a)


def lie_derivative_mv(u: Multivector, a: Multivector) -> Multivector:
    """L_u = eps_u d + d eps_u; the extension of ad_u to the exterior algebra."""
    _check_vector(u)
    _check_kind(a, Multivector)
    _check_same_algebra(u, a)
    if a.grade == 0:
        return Multivector.zero(a.algebra, 0)
    return insert(u, koszul_boundary(a)) + koszul_boundary(insert(u, a))


def schouten_bracket(g: Multivector, h: Multivector) -> Multivector:
    """
    Schouten-Nijenhuis bracket, read off the failure of the boundary to be a
    graded derivation:

        (-1)^(q+1) [G, H] = d(G ^ H) - dG ^ H - (-1)^q G ^ dH

    Args:
        g: Multivector of grade q >= 1
        h: Multivector of grade p >= 1

    Returns:
        Multivector of grade q + p - 1
    """
    _check_kind(g, Multivector)
    _check_kind(h, Multivector)
    _check_same_algebra(g, h)
    q, p = g.grade, h.grade
    if q < 1 or p < 1:
        raise GradeMismatchError("Schouten bracket needs grades >= 1")
    defect = (
        koszul_boundary(wedge(g, h))
        - wedge(koszul_boundary(g), h)
        - ((-1) ** q) * wedge(g, koszul_boundary(h))
    )
    return ((-1) ** (q + 1)) * defect


def endo_extension(T: Endomorphism, a: GradedElement) -> GradedElement:
    """Derivation extension of T: sum_j v_1 ^ ... ^ T(v_j) ^ ... ^ v_p."""
    if T.algebra.dim != a.algebra.dim:
        raise DomainError(f"endomorphism of dimension {T.algebra.dim} applied to dimension {a.algebra.dim}")
    M = T.matrix
    terms: Dict[Index, float] = {}
    for I, x in a._coeffs.items():
        for r, j in enumerate(I):
            column = M[:, j]
            for i in np.flatnonzero(column):
                _accumulate(terms, I[:r] + (int(i),) + I[r + 1:], x * column[i])
    return type(a)._from_terms(a.algebra, a.grade, terms)


def deformed_boundary(T: Endomorphism, a: Multivector) -> Multivector:
    """d_T = delta_T d - d delta_T."""
    _check_kind(a, Multivector)
    if not T.algebra.is_compatible(a.algebra):
        raise AlgebraMismatchError("endomorphism and multivector belong to different Lie algebras")
    if a.grade <= 1:
        return Multivector.zero(a.algebra, 0)
    return endo_extension(T, koszul_boundary(a)) - koszul_boundary(endo_extension(T, a))


def nijenhuis_tensor(T: Endomorphism, i: int, j: int, k: int) -> Multivector:
    """
    Evaluate d_T d_T on e_i ^ e_j ^ e_k.

    The result vanishes identically exactly when d_T is again a boundary
    operator.
    """
    n = T.algebra.dim
    indices = (i, j, k)
    if any(not 0 <= idx < n for idx in indices):
        raise DomainError(f"basis indices {indices} out of range for dimension {n}")
    if len(set(indices)) != 3:
        raise DomainError(f"basis indices {indices} must be distinct")
    triple = Multivector.basis(T.algebra, i, j, k)
    return deformed_boundary(T, deformed_boundary(T, triple))


def chevalley_d(b: Form) -> Form:
    """
    Chevalley-Eilenberg differential on forms with trivial coefficients.

    (d b)(v_1, ..., v_{p+1}) = sum_{i<j} (-1)^(i+j) b([v_i, v_j], v_1, ... (omit i, j) ...)
    with 1-based positions. Top-grade forms map to zero.
    """
    _check_kind(b, Form)
    n, p = b.algebra.dim, b.grade
    if p >= n or not b._coeffs:
        return Form.zero(b.algebra, p + 1)
    c = b.algebra.tensor
    terms: Dict[Index, float] = {}
    for J in itertools.combinations(range(n), p + 1):
        total = 0.0
        for s, t in itertools.combinations(range(p + 1), 2):
            sign = 1.0 if (s + t) % 2 == 0 else -1.0
            rest = J[:s] + J[s + 1:t] + J[t + 1:]
            row = c[J[s], J[t]]
            for k in np.flatnonzero(row):
                total += sign * row[k] * b.coefficient((int(k),) + rest)
        if total:
            terms[J] = total
    return Form._from_terms(b.algebra, p + 1, terms)


def contract(v: Multivector, b: Form) -> Form:
    """Interior product i_v; i_{e_m} e^I = (-1)^r e^(I without m) where m sits at position r."""
    _check_vector(v)
    _check_kind(b, Form)
    _check_same_algebra(v, b)
    if b.grade == 0:
        return Form.zero(b.algebra, 0)
    terms: Dict[Index, float] = {}
    for I, x in b._coeffs.items():
        for r, m in enumerate(I):
            weight = v._coeffs.get((m,), 0.0)
            if weight:
                key = I[:r] + I[r + 1:]
                terms[key] = terms.get(key, 0.0) + (-1) ** r * weight * x
    return Form._from_terms(b.algebra, b.grade - 1, terms)


def lie_derivative_form(v: Multivector, b: Form) -> Form:
    """Cartan formula L_v = i_v d + d i_v."""
    if b.grade == 0:
        return contract(v, chevalley_d(b))
    return contract(v, chevalley_d(b)) + chevalley_d(contract(v, b))


def pairing_det(a: Multivector, b: Form) -> float:
    """
    Determinant pairing between p-vectors and p-forms.

    On decomposable arguments this is det(alpha^j(v_k)); it reduces to the
    sum of products of matching coefficients.
    """
    _check_kind(a, Multivector)
    _check_kind(b, Form)
    _check_same_algebra(a, b)
    if a.grade != b.grade:
        raise GradeMismatchError(f"cannot pair grade {a.grade} with grade {b.grade}")
    return float(sum(x * b._coeffs.get(I, 0.0) for I, x in a._coeffs.items()))


def _dual_coords(spec: LieAlgebraSpec, alpha: Union[DualPoint, Sequence[float]]) -> np.ndarray:
    coords = alpha.coords if isinstance(alpha, DualPoint) else DualPoint(alpha).coords
    if coords.shape != (spec.dim,):
        raise DomainError(f"dual point must have {spec.dim} coordinates")
    return coords


def lie_poisson_bivector(spec: LieAlgebraSpec, i: int, j: int, alpha: Union[DualPoint, Sequence[float]]) -> float:
    """Lambda(dv_i, dv_j)(alpha) = alpha([e_i, e_j])."""
    if not (0 <= i < spec.dim and 0 <= j < spec.dim):
        raise DomainError(f"indices ({i}, {j}) out of range for dimension {spec.dim}")
    return float(spec.tensor[i, j] @ _dual_coords(spec, alpha))


def lie_poisson_matrix(spec: LieAlgebraSpec, alpha: Union[DualPoint, Sequence[float]]) -> np.ndarray:
    """All components Lambda_ij(alpha) at once."""
    return np.einsum("ijk,k->ij", spec.tensor, _dual_coords(spec, alpha))


def lie_poisson_bracket(spec: LieAlgebraSpec, df, dg, alpha: Union[DualPoint, Sequence[float]]) -> float:
    """Poisson bracket {f, g}(alpha) of two functions on V* given their gradients at alpha."""
    return float(np.asarray(df, dtype=float) @ lie_poisson_matrix(spec, alpha) @ np.asarray(dg, dtype=float))


def poisson_bracket_linear(spec: LieAlgebraSpec, u, v, alpha: Union[DualPoint, Sequence[float]]) -> float:
    """{u^, v^}(alpha) for the linear functions u^(alpha) = alpha(u); equals alpha([u, v])."""
    return lie_poisson_bracket(spec, u, v, alpha)


def operator_matrix(
    op: Callable[[GradedElement], GradedElement],
    algebra: LieAlgebraSpec,
    grade: int,
    kind: Type[GradedTensor] = Multivector,
) -> np.ndarray:
    """Dense matrix of a linear graded operator acting on the given grade."""
    columns = []
    for key in itertools.combinations(range(algebra.dim), grade):
        columns.append(op(kind._from_terms(algebra, grade, {key: 1.0})).components())
    return np.array(columns).T
