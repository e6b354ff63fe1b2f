from __future__ import annotations

import itertools
import json

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ephier.conversion import jordan_matrix, random_conjugate, random_isometry
from ephier.errors import ArgumentError, DegenerateRestrictionError, InconsistencyError, SingularMetricError
from ephier.matrixcore import (
    MatrixFormatError,
    Staircase,
    Tolerances,
    char_poly,
    classify,
    classify_signed_type,
    cluster_eigenvalues,
    degeneracy_check,
    dumps_matrix,
    jordan_type,
    loads_matrix,
    matrix_from_json,
    metric_signature,
    numerical_rank,
    power_rank_sequence,
    pseudo_hermitian_check,
    restricted_signature,
    staircase,
)
from ephier.partitions import Partition, partitions_of, rank_sequence
from ephier.signed import SignedDiagram, canonical_pair, enumerate_signed


def _elementary_symmetric(values: np.ndarray) -> list[complex]:
    """``e_k`` by direct summation over k-subsets (small n only)."""
    return [
        sum(np.prod(c) for c in itertools.combinations(values, k))
        for k in range(1, len(values) + 1)
    ]


def test_char_poly_matches_elementary_symmetric_functions() -> None:
    rng = np.random.default_rng(11)
    for n in range(1, 7):
        h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        eig = np.linalg.eigvals(h)
        # det(lam - H) = lam^n - e1 lam^(n-1) + e2 lam^(n-2) - ...,  so p_k = (-1)^(k+1) e_k
        expected = [(-1) ** (k + 1) * e for k, e in enumerate(_elementary_symmetric(eig), start=1)]
        assert np.allclose(char_poly(h), expected, rtol=1e-9, atol=1e-9)


def test_char_poly_3x3_symbolic() -> None:
    d11, d12, d13, d21, d23, d31, d32, d33, lam = sp.symbols("d11 d12 d13 d21 d23 d31 d32 d33 lam")
    m = sp.Matrix([[d11, d12, d13], [d21, -d11 - d33, d23], [d31, d32, d33]])
    poly = sp.Poly(sp.expand((lam * sp.eye(3) - m).det()), lam)
    p_sym = -poly.coeff_monomial(lam)
    q_sym = -poly.coeff_monomial(1)
    rng = np.random.default_rng(12)
    for _ in range(20):
        vals = rng.normal(size=8) + 1j * rng.normal(size=8)
        subs = dict(zip((d11, d12, d13, d21, d23, d31, d32, d33), vals))
        h = np.array(m.subs(subs).evalf(), dtype=complex)
        coeffs = char_poly(h)
        assert abs(coeffs[0]) < 1e-12
        assert abs(coeffs[1] - complex(p_sym.subs(subs))) < 1e-10
        assert abs(coeffs[2] - complex(q_sym.subs(subs))) < 1e-10


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.floats(0.1, 10.0), st.integers(0, 2**31 - 1))
def test_char_poly_is_homogeneous(n: int, t: float, seed: int) -> None:
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    k = np.arange(1, n + 1)
    assert np.allclose(char_poly(t * h), t**k * char_poly(h), rtol=1e-8, atol=1e-8 * (t * np.linalg.norm(h, 2)) ** k)


def test_numerical_rank() -> None:
    assert numerical_rank(np.diag([1.0, 1e-3, 1e-12]), 1e-8) == 2
    with pytest.raises(ArgumentError):
        numerical_rank(np.eye(2), 0.0)


def test_staircase_kernels_are_nested_null_spaces() -> None:
    rng = np.random.default_rng(13)
    for part in partitions_of(5):
        h = random_conjugate(jordan_matrix(part), cond_max=10.0, seed=rng)
        stair = staircase(h)
        assert stair.partition() == part
        assert not stair.low_confidence
        for s in range(1, len(stair.nullities) + 1):
            ker = stair.kernel(s)
            assert np.allclose(ker.conj().T @ ker, np.eye(ker.shape[1]))
            assert np.linalg.norm(np.linalg.matrix_power(h, s) @ ker) < 1e-8


def test_power_ranks_cross_check_on_well_conditioned_input() -> None:
    rng = np.random.default_rng(14)
    for n in range(1, 7):
        for part in partitions_of(n):
            h = random_conjugate(jordan_matrix(part, 0.5), cond_max=3.0, seed=rng)
            assert power_rank_sequence(h, 0.5) == rank_sequence(part)


@pytest.mark.slow
def test_round_trip_at_seven() -> None:
    rng = np.random.default_rng(15)
    for part in partitions_of(7):
        for _ in range(20):
            lam = complex(*rng.normal(size=2))
            h = random_conjugate(jordan_matrix(part, lam), cond_max=1e3, seed=rng)
            assert jordan_type(h, np.trace(h) / 7) == part


def test_scalar_matrix_under_conjugation() -> None:
    # the shifted matrix is pure rounding noise here
    rng = np.random.default_rng(16)
    for _ in range(200):
        h = random_conjugate(3.7 * np.eye(4), cond_max=1e3, seed=rng)
        assert jordan_type(h, np.trace(h) / 4) == Partition((1, 1, 1, 1))


def test_jordan_type_rejects_non_eigenvalue() -> None:
    with pytest.raises(ArgumentError):
        jordan_type(np.diag([1.0, 2.0]), 5.0)


def test_clusters_separate_distinct_eigenvalues() -> None:
    h = np.zeros((6, 6), dtype=complex)
    h[:3, :3] = jordan_matrix(Partition((3,)), 1.0)
    h[3:, 3:] = jordan_matrix(Partition((2, 1)), -2.0)
    h = random_conjugate(h, cond_max=10.0, seed=17)
    clusters = cluster_eigenvalues(h)
    assert [c.multiplicity for c in clusters] == [3, 3]
    assert np.allclose([c.centroid for c in clusters], [-2.0, 1.0], atol=1e-8)
    results = classify(h)
    assert [r.partition for r in results] == [Partition((2, 1)), Partition((3,))]


def test_clusters_keep_close_but_distinct_eigenvalues_apart() -> None:
    h = np.diag([0.0, 1e-3, 2e-3]).astype(complex)
    assert [c.multiplicity for c in cluster_eigenvalues(h)] == [1, 1, 1]


def test_degeneracy_check() -> None:
    assert degeneracy_check(random_conjugate(jordan_matrix(Partition((4,)), 2.0), 10.0, seed=18))
    report = degeneracy_check(np.diag([0.0, 0.1, 0.2]))
    assert not report
    assert report.residual > 0.01
    assert len(report.residuals) == len(report.thresholds) == 2


def test_tolerances_must_be_positive() -> None:
    with pytest.raises(ArgumentError):
        Tolerances(rank_rtol=0.0)
    assert Tolerances.scale(np.zeros((2, 2))) == 1.0


def test_matrix_json_round_trip() -> None:
    rng = np.random.default_rng(19)
    h = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    text = dumps_matrix(h)
    assert np.array_equal(loads_matrix(text), h)
    assert dumps_matrix(loads_matrix(text)) == text


@pytest.mark.parametrize(
    "obj",
    [[1, 2], {"dim": 2}, {"dim": 0, "data": []}, {"dim": 2, "data": [[1, 0]] * 3}, {"dim": 1, "data": [["x", 0]]}],
)
def test_matrix_json_rejects_malformed(obj) -> None:
    with pytest.raises(MatrixFormatError):
        matrix_from_json(obj)


def test_non_square_and_non_finite_rejected() -> None:
    with pytest.raises(ArgumentError):
        char_poly(np.ones((2, 3)))
    with pytest.raises(ArgumentError):
        char_poly(np.array([[np.nan]]))


def test_metric_checks() -> None:
    assert metric_signature(np.diag([1.0, -1.0, 1.0])) == (2, 1)
    with pytest.raises(SingularMetricError):
        metric_signature(np.diag([1.0, 0.0]))
    with pytest.raises(ArgumentError):
        metric_signature(np.array([[1.0, 1.0], [0.0, 1.0]]))
    j, eta = canonical_pair(SignedDiagram.parse("2+"))
    assert pseudo_hermitian_check(j, eta)
    assert not pseudo_hermitian_check(j, np.eye(2))


def test_restricted_signature_of_neutral_subspace_is_rejected() -> None:
    # the metric of a single 2-block vanishes on the eigenvector line
    j, eta = canonical_pair(SignedDiagram.parse("2+"))
    eigenline = Staircase([1], np.eye(2, dtype=complex)[:, ::-1])
    with pytest.raises(DegenerateRestrictionError):
        restricted_signature(j, eta, 0.0, stair=eigenline)


def test_signed_classification_of_canonical_pairs() -> None:
    rng = np.random.default_rng(20)
    for p, q in [(2, 1), (2, 2), (3, 1), (3, 2), (4, 2)]:
        for d in enumerate_signed(p, q):
            j, eta = canonical_pair(d)
            s = random_isometry(eta, seed=rng)
            h = s @ (j + 0.3 * np.eye(p + q)) @ np.linalg.inv(s)
            res = classify_signed_type(h, eta, 0.3)
            assert res.signed_type == d
            assert d in res.signed_candidates
            assert res.partition == d.partition
            assert not res.low_confidence


def test_signed_classification_errors() -> None:
    j, eta = canonical_pair(SignedDiagram.parse("2+,1-"))
    with pytest.raises(ArgumentError):
        classify_signed_type(j, np.eye(3), 0.0)
    with pytest.raises(ArgumentError):
        classify_signed_type(j, eta, 0.5j)
    with pytest.raises(ArgumentError):
        classify_signed_type(j, eta, 7.0)


def test_inconsistent_restricted_signature(monkeypatch) -> None:
    import ephier.matrixcore as mc

    monkeypatch.setattr(mc, "restricted_signature", lambda *args, **kwargs: (3, 0))
    with pytest.raises(InconsistencyError):
        classify_signed_type(np.zeros((2, 2)), np.diag([1.0, -1.0]), 0.0)


def test_classify_with_metric_reports_signed_types() -> None:
    d = SignedDiagram.parse("3+,1+")
    j, eta = canonical_pair(d)
    results = classify(j, eta)
    assert len(results) == 1
    assert results[0].signed_type == d
    obj = json.loads(json.dumps(results[0].to_json()))
    assert obj["signed_type"] == "(3+,1+)"
    assert obj["partition"] == [3, 1]
