"""
Randomized invariant suites behind the algebra-check command.

Each suite is a function (rng, samples) -> list of CheckResult. Suites are
independent, so run_suites fans them out over a thread pool and merges the
results back in suite order.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from stratafold.config import numerics_config
from stratafold.services import dec, lindblad, qgeom, statgeom
from stratafold.services.clifford import (
    CliffordElement,
    MetricSpec,
    codifferential_alg,
    dirac_operator,
    hodge_square_sign,
    hodge_star,
    interior_derivation_defect,
    laplacian_alg,
    lie_derivation_defect,
    non_derivation_witness,
    vee_product,
)
from stratafold.services.exterior_core import (
    Form,
    LieAlgebraSpec,
    Multivector,
    chevalley_d,
    contract,
    insert,
    koszul_boundary,
    lie_derivative_form,
    lie_derivative_mv,
    lie_poisson_matrix,
    pairing_det,
    schouten_bracket,
    wedge,
)

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-12
PRODUCT_TOL = 1e-10
FIELD_TOL = 1e-6
USER_SUITE_PREFIX = "user:"


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    max_residual: float
    tol: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.suite}/{self.name}: max residual {self.max_residual:.3e} (tol {self.tol:g})"


class _Recorder:
    """Collects named residual maxima for one suite."""

    def __init__(self, suite: str):
        self.suite = suite
        self._worst: Dict[str, float] = {}
        self._tol: Dict[str, float] = {}
        self._witnesses: List[CheckResult] = []

    def record(self, name: str, residual: float, tol: float = EXACT_TOL) -> None:
        self._worst[name] = max(self._worst.get(name, 0.0), float(residual))
        self._tol[name] = tol

    def expect_nonzero(self, name: str, value: float, floor: float = 1e-6) -> None:
        """Passes when a recorded counterexample really is one."""
        self._witnesses.append(CheckResult(self.suite, name, float(value), floor, value > floor))

    def results(self) -> List[CheckResult]:
        out = [
            CheckResult(self.suite, name, worst, self._tol[name], worst <= self._tol[name])
            for name, worst in self._worst.items()
        ]
        return out + self._witnesses


def _vector(spec: LieAlgebraSpec, rng: np.random.Generator) -> Multivector:
    return Multivector.random(spec, 1, rng)


def exterior_suite(spec: LieAlgebraSpec, label: str) -> Callable[[np.random.Generator, int], List[CheckResult]]:
    """Homology and cohomology identities on one Lie algebra."""

    def run(rng: np.random.Generator, samples: int) -> List[CheckResult]:
        rec = _Recorder(label)
        n = spec.dim
        for _ in range(samples):
            p = int(rng.integers(1, n + 1))
            a = Multivector.random(spec, p, rng)
            b = Form.random(spec, p - 1, rng)
            u, v = _vector(spec, rng), _vector(spec, rng)

            rec.record("boundary_squared", koszul_boundary(koszul_boundary(a)).norm())
            rec.record("d_squared", chevalley_d(chevalley_d(b)).norm())
            # <da|b> = -<a|d b>
            rec.record("boundary_transpose", abs(pairing_det(koszul_boundary(a), b) + pairing_det(a, chevalley_d(b))) if p >= 2 else 0.0)

            if p >= 2:
                c = Multivector.random(spec, p - 1, rng)
                w = Form.random(spec, p, rng)
                rec.record("insert_transpose", abs(pairing_det(insert(v, c), w) - pairing_det(c, contract(v, w))))

            form = Form.random(spec, p, rng)
            bracket_vu = Multivector.from_vector(spec, spec.bracket(v.components(), u.components()))
            # [L_v, i_u] = i_[v,u]
            commutator = lie_derivative_form(v, contract(u, form)) - contract(u, lie_derivative_form(v, form))
            rec.record("lie_interior_commutator", (commutator - contract(bracket_vu, form)).norm())

            bracket_uv = Multivector.from_vector(spec, spec.bracket(u.components(), v.components()))
            # [L_u, L_v] = L_[u,v]
            double = lie_derivative_form(u, lie_derivative_form(v, form)) - lie_derivative_form(v, lie_derivative_form(u, form))
            rec.record("lie_derivative_commutator", (double - lie_derivative_form(bracket_uv, form)).norm())

            rec.record("schouten_grade_one", (schouten_bracket(u, v) - bracket_uv).norm())

            q = int(rng.integers(0, n - p + 1))
            x, y = Multivector.random(spec, p, rng), Multivector.random(spec, q, rng)
            leibniz = lie_derivative_mv(u, wedge(x, y)) - wedge(lie_derivative_mv(u, x), y) - wedge(x, lie_derivative_mv(u, y))
            rec.record("lie_derivative_leibniz", leibniz.norm())

            alpha = rng.standard_normal(n)
            beta = rng.standard_normal(n)
            Lam = lie_poisson_matrix(spec, alpha)
            rec.record("poisson_antisymmetry", float(np.max(np.abs(Lam + Lam.T))))
            linear = lie_poisson_matrix(spec, alpha + 2.0 * beta) - Lam - 2.0 * lie_poisson_matrix(spec, beta)
            rec.record("poisson_linearity", float(np.max(np.abs(linear))))

            covector = rng.standard_normal(n)
            one_form = Form.from_vector(spec, covector)
            coadjoint = -np.einsum("i,ijk,k->j", v.components(), spec.tensor, covector)
            rec.record("cartan_coadjoint", float(np.max(np.abs(lie_derivative_form(v, one_form).components() - coadjoint))))
        return rec.results()

    return run


def clifford_suite(metric: MetricSpec, label: str) -> Callable[[np.random.Generator, int], List[CheckResult]]:
    """Clifford relation, associativity, graded derivation and Hodge signs for one metric."""

    def run(rng: np.random.Generator, samples: int) -> List[CheckResult]:
        rec = _Recorder(label)
        n = metric.dim
        algebra = LieAlgebraSpec.abelian(n)
        for _ in range(samples):
            covector = rng.standard_normal(n)
            v = CliffordElement.from_form(metric, Form.from_vector(algebra, covector))
            expected = CliffordElement.scalar(metric, algebra, metric.covector_product(covector, covector))
            rec.record("clifford_relation", (vee_product(v, v) - expected).norm(), PRODUCT_TOL)

            a, b, c = (CliffordElement.random(metric, algebra, rng) for _ in range(3))
            associator = vee_product(vee_product(a, b), c) - vee_product(a, vee_product(b, c))
            rec.record("associativity", associator.norm(), PRODUCT_TOL)

            w = Multivector.random(algebra, 1, rng)
            rec.record("interior_graded_derivation", interior_derivation_defect(w, a, b), PRODUCT_TOL)

            k = int(rng.integers(0, n + 1))
            form = Form.random(algebra, k, rng)
            twice = hodge_star(hodge_star(form, metric), metric)
            rec.record("hodge_square", (twice - hodge_square_sign(k, metric) * form).norm())
        return rec.results()

    return run


def lie_clifford_suite(rng: np.random.Generator, samples: int) -> List[CheckResult]:
    """Codifferential and Dirac operator on so(3), derivation failures of d and L_v."""
    rec = _Recorder("clifford-so3")
    spec = LieAlgebraSpec.so3()
    metric = MetricSpec.euclidean(3)
    for _ in range(samples):
        k = int(rng.integers(1, 4))
        form = Form.random(spec, k, rng)
        once = codifferential_alg(form, spec, metric)
        rec.record("codifferential_squared", codifferential_alg(once, spec, metric).norm())

        element = CliffordElement.random(metric, spec, rng)
        twice = dirac_operator(dirac_operator(element, spec, metric), spec, metric)
        laplacian = CliffordElement(metric, spec, [laplacian_alg(f, spec, metric) for f in element.parts().values()])
        rec.record("dirac_square_laplacian", (twice - laplacian).norm())

    heisenberg = LieAlgebraSpec.heisenberg()
    euclid = MetricSpec.euclidean(heisenberg.dim)
    central = Multivector.basis(heisenberg, 2)
    for _ in range(samples):
        a = CliffordElement.random(euclid, heisenberg, rng)
        b = CliffordElement.random(euclid, heisenberg, rng)
        rec.record("central_lie_derivation", lie_derivation_defect(central, a, b))

    rec.expect_nonzero("d_non_derivation_witness", non_derivation_witness().residual)
    first = CliffordElement.from_form(euclid, Form.basis(heisenberg, 2))
    second = CliffordElement.from_form(euclid, Form.basis(heisenberg, 1))
    rec.expect_nonzero("noncentral_lie_non_derivation", lie_derivation_defect(Multivector.basis(heisenberg, 0), first, second))
    return rec.results()


def _random_hermitian_triples(n: int, rng: np.random.Generator):
    return (qgeom.HermitianOperator.random(n, rng) for _ in range(3))


def lie_jordan_suite(rng: np.random.Generator, samples: int) -> List[CheckResult]:
    """Lie-Jordan axioms, vector-field commutators and Lindblad oracles."""
    rec = _Recorder("pauli")
    lie, jordan = qgeom.lie_product, qgeom.jordan_product
    for _ in range(samples):
        n = int(rng.integers(2, 6))
        a, b, c = _random_hermitian_triples(n, rng)
        scale = max(1.0, a.norm() * b.norm() * c.norm())
        compat = lie(jordan(a, b), c) - jordan(a, lie(b, c)) - jordan(lie(a, c), b)
        rec.record("lie_jordan_compatibility", compat.norm() / scale)
        associator = jordan(jordan(a, b), c) - jordan(a, jordan(b, c)) - lie(lie(a, c), b)
        rec.record("associator_identity", associator.norm() / scale)
        rebuilt = jordan(a, b).matrix + 1j * lie(a, b).matrix
        rec.record("associative_reconstruction", float(np.max(np.abs(rebuilt - a.matrix @ b.matrix))) / scale)

    for _ in range(max(1, samples // 10)):
        n = int(rng.integers(2, 4))
        rho = qgeom.DensityState.random(n, rng)
        a, b = qgeom.HermitianOperator.random(n, rng), qgeom.HermitianOperator.random(n, rng)
        ab = qgeom.lie_product(a, b)

        def X(h):
            return lambda M: qgeom.hamiltonian_velocity(h, M)

        def Y(g):
            return lambda M: qgeom.gradient_velocity(g, M)

        xx = qgeom.vector_field_commutator(X(a), X(b), rho.matrix) - X(ab)(rho.matrix)
        xy = qgeom.vector_field_commutator(X(a), Y(b), rho.matrix) - Y(ab)(rho.matrix)
        yy = qgeom.vector_field_commutator(Y(a), Y(b), rho.matrix) + X(ab)(rho.matrix)
        rec.record("commutator_XX", float(np.max(np.abs(xx))), FIELD_TOL)
        rec.record("commutator_XY", float(np.max(np.abs(xy))), FIELD_TOL)
        rec.record("commutator_YY", float(np.max(np.abs(yy))), FIELD_TOL)

    for _ in range(samples):
        n = int(rng.integers(2, 5))
        spec = lindblad.LindbladSpec.random(n, rng, r=int(rng.integers(1, 3)))
        rho = qgeom.DensityState.random(n, rng)
        field = lindblad.kl_vector_field(spec, rho)
        generator = rho.basis.coordinates(lindblad.lindblad_generator(spec, rho).matrix)
        rec.record("generator_oracle", float(np.max(np.abs(field.coords - generator))), PRODUCT_TOL)

    gamma = 0.3
    damping = lindblad.LindbladSpec.phase_damping(gamma)
    for _ in range(samples):
        x = rng.standard_normal(3)
        x *= rng.uniform(0.0, 1.0) / np.linalg.norm(x)
        rho = qgeom.DensityState.from_bloch(x)
        field = lindblad.kl_vector_field(damping, rho).bloch()
        rec.record("phase_damping_field", float(np.max(np.abs(field - (-2.0 * gamma) * np.array([x[0], x[1], 0.0])))))

    for n in range(2, 5):
        for k in range(1, n + 1):
            rho = qgeom.DensityState.random(n, rng, rank=k)
            info = qgeom.rank_and_stratum(rho)
            expected = 2 * n * k - k * k - 1
            rec.record("stratum_dimension", abs(info.stratum_dim - expected), 0.0)
            rec.record("tangent_space_dimension", abs(qgeom.tangent_space_dimension(rho) - expected), 0.0)
            rec.record("field_span_dimension", abs(qgeom.field_span_dimension(rho) - expected), 0.0)
    return rec.results()


def dec_suite(rng: np.random.Generator, samples: int) -> List[CheckResult]:
    """Dirac-Kahler dispersion, Laplacian factorization and Hodge decomposition on rings."""
    rec = _Recorder("dec")
    for N in (3, 4, 5, 8, 16):
        for l in (0.5, 1.0, 2.0):
            ring = dec.SimplicialRing(N, l)
            errors = [row.abs_error for row in dec.spectrum_table(ring)]
            rec.record("dispersion", max(errors), PRODUCT_TOL)
            M = dec.dirac_kahler_matrix(ring)
            rec.record("dirac_square_laplacian", float(np.max(np.abs(M @ M - dec.laplacian_matrix(ring)))))
    for _ in range(samples):
        N = int(rng.integers(3, 33))
        ring = dec.SimplicialRing(N, rng.uniform(0.5, 2.0, size=N))
        degree = int(rng.integers(0, 2))
        a = dec.Cochain(ring, degree, rng.standard_normal(N))
        parts = dec.hodge_decompose(a)
        rec.record("hodge_reassembly", (parts.exact + parts.coexact + parts.harmonic - a).norm(), PRODUCT_TOL)
        pieces = (parts.exact, parts.coexact, parts.harmonic)
        overlap = max(abs(ring.inner_product(x, y)) for x, y in itertools.combinations(pieces, 2))
        rec.record("hodge_orthogonality", overlap, PRODUCT_TOL)
    return rec.results()


def fisher_suite(rng: np.random.Generator, samples: int) -> List[CheckResult]:
    """Square-root embedding of the simplex against the Fisher-Rao metric."""
    rec = _Recorder("fisher")
    for _ in range(samples):
        outcomes = int(rng.integers(2, 9))
        p = statgeom.ProbabilityVector.random_interior(outcomes, rng)
        u, v = statgeom.random_tangent(outcomes, rng), statgeom.random_tangent(outcomes, rng)
        rec.record("pullback", statgeom.pullback_residual(p, u, v) / max(1.0, float(np.max(statgeom.fisher_metric_matrix(p)))), PRODUCT_TOL)
        x = statgeom.sqrt_embed(p)
        rec.record("sphere_constraint", abs(float(x @ x) - 1.0))
        perm = rng.permutation(outcomes)
        permuted = statgeom.ProbabilityVector(p.values[perm])
        rec.record(
            "permutation_equivariance",
            float(np.max(np.abs(statgeom.fisher_metric_matrix(permuted) - statgeom.fisher_metric_matrix(p)[np.ix_(perm, perm)]))),
        )
    return rec.results()


def _random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def default_suites(rng_seed: int = 0) -> Dict[str, Callable[[np.random.Generator, int], List[CheckResult]]]:
    """Built-in suites keyed by name, in execution order."""
    basis_rng = np.random.default_rng(rng_seed)
    gl2_rotated = LieAlgebraSpec.gl2().change_basis(_random_orthogonal(4, basis_rng), name="gl2-random-basis")
    return {
        "so3": exterior_suite(LieAlgebraSpec.so3(), "so3"),
        "heisenberg": exterior_suite(LieAlgebraSpec.heisenberg(), "heisenberg"),
        "abelian": exterior_suite(LieAlgebraSpec.abelian(3), "abelian"),
        "gl2-random-basis": exterior_suite(gl2_rotated, "gl2-random-basis"),
        "clifford-euclidean": _metrics_suite("clifford-euclidean", [MetricSpec.euclidean(n) for n in (2, 3, 4)]),
        "clifford-lorentzian": _metrics_suite("clifford-lorentzian", [MetricSpec.lorentzian(n) for n in (2, 3, 4)]),
        "clifford-so3": lie_clifford_suite,
        "pauli": lie_jordan_suite,
        "dec": dec_suite,
        "fisher": fisher_suite,
    }


def _metrics_suite(label: str, metrics: Sequence[MetricSpec]) -> Callable[[np.random.Generator, int], List[CheckResult]]:
    def run(rng: np.random.Generator, samples: int) -> List[CheckResult]:
        merged: Dict[str, CheckResult] = {}
        for metric in metrics:
            for result in clifford_suite(metric, label)(rng, samples):
                current = merged.get(result.name)
                if current is None or result.max_residual > current.max_residual:
                    merged[result.name] = result
        return list(merged.values())

    return run


def run_suites(
    samples: int = 20,
    seed: int = 0,
    user_spec: Optional[LieAlgebraSpec] = None,
    names: Optional[Sequence[str]] = None,
) -> List[CheckResult]:
    """
    Run the selected suites concurrently and merge results in suite order.

    Args:
        samples: Randomized cases per check
        seed: Root seed; each suite draws from its own child stream
        user_spec: Extra Lie algebra checked with the exterior suite; its
            results are labelled "user:<name>" so built-in suites keep their own
        names: Subset of suite names; all built-in suites by default

    Returns:
        Check results grouped by suite, in a deterministic order
    """
    suites = default_suites(seed)
    if names is not None:
        unknown = sorted(set(names) - set(suites))
        if unknown:
            raise KeyError(f"unknown suites: {unknown}")
        suites = {name: suites[name] for name in names}
    if user_spec is not None:
        label = f"{USER_SUITE_PREFIX}{user_spec.name}"
        suites[label] = exterior_suite(user_spec, label)

    jobs = list(suites.items())
    streams = np.random.SeedSequence(seed).spawn(len(jobs))
    workers = numerics_config.worker_count(len(jobs))
    logger.info(f"Running {len(jobs)} invariant suites on {workers} workers")

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(suite, np.random.default_rng(stream), samples)
            for (_, suite), stream in zip(jobs, streams)
        ]
        results: List[CheckResult] = []
        for future in futures:
            results.extend(future.result())

    failed = [r for r in results if not r.passed]
    if failed:
        logger.warning(f"{len(failed)} of {len(results)} checks failed")
    return results
