"""
Tests for the concurrent invariant suite runner.
"""
import pytest

from stratafold.services.check_suites import USER_SUITE_PREFIX, run_suites
from stratafold.services.exterior_core import LieAlgebraSpec


def suite_names(results):
    return {result.suite for result in results}


def test_user_algebra_sharing_a_builtin_name_keeps_both_suites():
    builtin = run_suites(samples=2, seed=0, names=["so3"])
    user = LieAlgebraSpec.so3()
    assert user.name == "so3"

    combined = run_suites(samples=2, seed=0, user_spec=user, names=["so3"])
    assert suite_names(combined) == {"so3", f"{USER_SUITE_PREFIX}so3"}
    kept = [(r.suite, r.name) for r in combined if r.suite == "so3"]
    assert kept == [(r.suite, r.name) for r in builtin]
    assert all(r.passed for r in combined)


def test_user_suite_runs_the_exterior_checks():
    results = run_suites(samples=2, seed=0, user_spec=LieAlgebraSpec.heisenberg(), names=[])
    assert suite_names(results) == {"user:heisenberg"}
    assert {r.name for r in results} >= {"d_squared"}


def test_unknown_suite_name():
    with pytest.raises(KeyError):
        run_suites(samples=1, names=["octonions"])


def test_same_seed_gives_same_residuals():
    first = run_suites(samples=3, seed=11, names=["fisher", "pauli"])
    second = run_suites(samples=3, seed=11, names=["fisher", "pauli"])
    assert [r.max_residual for r in first] == [r.max_residual for r in second]
