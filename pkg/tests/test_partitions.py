from __future__ import annotations

import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ephier.errors import ArgumentError, BoundsError
from ephier.partitions import (
    Partition,
    build_dag,
    conjugate,
    dominates,
    embed_self_similar,
    emit_dot,
    hierarchy_dag,
    partitions_of,
    rank_sequence,
    transitive_reduction,
)

# number of partitions p(n), OEIS A000041
PARTITION_COUNTS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297, 385, 490, 627]


def _jordan_nilpotent(p: Partition) -> np.ndarray:
    n = p.n
    out = np.zeros((n, n))
    start = 0
    for m in p:
        for k in range(m - 1):
            out[start + k, start + k + 1] = 1.0
        start += m
    return out


def _row_sums_dominate(a: Partition, b: Partition) -> bool:
    length = max(len(a), len(b))
    ra = list(a.parts) + [0] * (length - len(a))
    rb = list(b.parts) + [0] * (length - len(b))
    return all(x >= y for x, y in zip(itertools.accumulate(ra), itertools.accumulate(rb)))


partition_strategy = st.integers(1, 12).flatmap(lambda n: st.sampled_from(partitions_of(n)))


def test_partition_counts_match_sequence() -> None:
    for n in range(1, 21):
        assert len(partitions_of(n)) == PARTITION_COUNTS[n]


def test_partitions_are_distinct_and_valid() -> None:
    for n in range(1, 13):
        parts = partitions_of(n)
        assert len(set(parts)) == len(parts)
        assert all(p.n == n for p in parts)
        assert parts[0] == Partition((n,)) and parts[-1] == Partition((1,) * n)


def test_partition_validation() -> None:
    with pytest.raises(ArgumentError):
        Partition(())
    with pytest.raises(ArgumentError):
        Partition((1, 2))
    with pytest.raises(ArgumentError):
        Partition((2, 0))
    assert Partition.from_any("(1,3,2)") == Partition((3, 2, 1))
    assert Partition.from_any([2, 2]) == Partition((2, 2))
    assert str(Partition((3, 1))) == "(3,1)"


@pytest.mark.parametrize("bad", [0, -1, 65, 2.5, True])
def test_partitions_of_bounds(bad) -> None:
    with pytest.raises(BoundsError):
        partitions_of(bad)


def test_hierarchy_bounds() -> None:
    with pytest.raises(BoundsError):
        hierarchy_dag(21)


@settings(max_examples=200, deadline=None)
@given(partition_strategy)
def test_conjugate_is_involution(p: Partition) -> None:
    assert conjugate(conjugate(p)) == p
    assert conjugate(p).n == p.n


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.sampled_from(partitions_of(n))))
def test_rank_sequence_matches_matrix_powers(p: Partition) -> None:
    j = _jordan_nilpotent(p)
    ranks = [int(np.linalg.matrix_rank(np.linalg.matrix_power(j, i))) for i in range(1, p.n + 1)]
    assert rank_sequence(p) == ranks


def test_dominance_matches_row_sums() -> None:
    for n in range(1, 10):
        parts = partitions_of(n)
        for a, b in itertools.product(parts, repeat=2):
            assert dominates(a, b) == _row_sums_dominate(a, b)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 9).flatmap(lambda n: st.tuples(*[st.sampled_from(partitions_of(n))] * 2)))
def test_dominance_reverses_under_conjugation(pair) -> None:
    a, b = pair
    assert dominates(a, b) == dominates(conjugate(b), conjugate(a))


def test_dominance_needs_equal_size() -> None:
    with pytest.raises(ArgumentError):
        dominates(Partition((2,)), Partition((2, 1)))


def test_hierarchy_order_matches_reachability() -> None:
    for n in range(2, 9):
        dag = hierarchy_dag(n)
        reach = dag.reachability()
        for i, a in enumerate(dag.nodes):
            for j, b in enumerate(dag.nodes):
                assert reach[i, j] == dominates(a, b, strict=True)
        assert dag.maxima() == [Partition((n,))]
        assert dag.minima() == [Partition((1,) * n)]


def test_incomparable_pair_at_six() -> None:
    dag = hierarchy_dag(6)
    assert set(dag.successors(Partition((4, 2)))) == {Partition((4, 1, 1)), Partition((3, 3))}
    assert set(dag.predecessors(Partition((3, 2, 1)))) == {Partition((4, 1, 1)), Partition((3, 3))}


def test_transitive_reduction_of_chain() -> None:
    strict = np.triu(np.ones((4, 4), dtype=bool), 1)
    assert transitive_reduction(strict) == [(0, 1), (1, 2), (2, 3)]


def test_build_dag_rejects_cycles() -> None:
    with pytest.raises(ArgumentError):
        build_dag([1, 2], lambda a, b: True)


def test_self_similar_embedding_endpoints() -> None:
    dag = hierarchy_dag(4)
    big = hierarchy_dag(5)
    phi = embed_self_similar(dag)
    image = [big.nodes[phi[i]] for i in range(len(dag.nodes))]
    assert image[0] == Partition((5,))
    assert image[-1] == Partition((2, 1, 1, 1))


def test_json_and_dot_output() -> None:
    dag = hierarchy_dag(3)
    obj = json.loads(dag.dumps())
    assert obj["nodes"] == [[3], [2, 1], [1, 1, 1]]
    assert obj["edges"] == [[0, 1], [1, 2]]
    dot = emit_dot(dag)
    assert dot.startswith("digraph hierarchy {")
    assert dot.count("->") == 2
    assert "[][][]\\l" in dot
    assert 'label="(2,1)"' in emit_dot(dag, label_style="tuple")
    with pytest.raises(ArgumentError):
        emit_dot(dag, label_style="fancy")
