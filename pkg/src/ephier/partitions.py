"""Integer partitions as unsigned degeneracy types and their dominance hierarchy.

A degeneracy of algebraic multiplicity ``n`` with Jordan blocks of sizes
``m_1 >= m_2 >= ... >= m_q`` is labelled by the partition ``(m_1, ..., m_q)``.
Type ``A`` dominates type ``B`` when the manifold of ``B`` lies in the closure
of the manifold of ``A``; equivalently ``rank J_A**i >= rank J_B**i`` for all
powers, or in terms of column lengths of the Young diagrams::

    sum(colA[:i]) <= sum(colB[:i])   for every i

An arrow ``A -> B`` of a hierarchy therefore reads "a type-B degeneracy can be
turned into a type-A one by an arbitrarily small perturbation".
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import accumulate
from typing import Any, Callable, Iterator, Sequence

import numpy as np

from .errors import ArgumentError, BoundsError

__all__ = [
    "Partition",
    "HierarchyDag",
    "partitions_of",
    "conjugate",
    "rank_sequence",
    "dominates",
    "hierarchy_dag",
    "build_dag",
    "embed_self_similar",
    "self_similar_subgraph",
    "emit_dot",
]

MAX_ENUMERATE = 64
MAX_HIERARCHY = 20


@dataclass(frozen=True, order=False)
class Partition:
    """Non-increasing tuple of positive block sizes."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if not parts:
            raise ArgumentError("a partition needs at least one part")
        if any(p <= 0 for p in parts):
            raise ArgumentError(f"parts must be positive, got {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ArgumentError(f"parts must be non-increasing, got {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def from_any(cls, value: "Partition | Sequence[int] | str") -> "Partition":
        """Build from a Partition, a sequence, or text like ``"3,2,1"``.

        Unsorted sequences are sorted rather than rejected.
        """
        if isinstance(value, Partition):
            return value
        if isinstance(value, str):
            text = value.strip().strip("()[]")
            value = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
        return cls(tuple(sorted((int(v) for v in value), reverse=True)))

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"

    def conjugate(self) -> "Partition":
        return conjugate(self)

    def rows(self) -> list[str]:
        """ASCII rendering of the Young diagram, one string per row."""
        return ["[]" * m for m in self.parts]

    def to_json(self) -> list[int]:
        return list(self.parts)


def _check_n(n: int, upper: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise BoundsError(f"n must be an integer, got {n!r}")
    n = int(n)
    if not 1 <= n <= upper:
        raise BoundsError(f"n must lie in [1, {upper}], got {n}")
    return n


def _descending(n: int, largest: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _descending(n - first, first):
            yield (first,) + rest


def partitions_of(n: int) -> list[Partition]:
    """All partitions of ``n`` in descending lexicographic order.

    Descending lex order is a linear extension of dominance, so ``(n)`` comes
    first and ``(1,)*n`` last.
    """
    n = _check_n(n, MAX_ENUMERATE)
    return [Partition(p) for p in _descending(n, n)]


def conjugate(p: Partition) -> Partition:
    """Column lengths of the Young diagram of ``p``."""
    parts = p.parts
    return Partition(tuple(sum(1 for m in parts if m >= j) for j in range(1, parts[0] + 1)))


def rank_sequence(p: Partition) -> list[int]:
    """``[rank J_p**i for i in 1..n]`` for the nilpotent Jordan matrix of ``p``."""
    n = p.n
    cols = list(conjugate(p).parts) + [0] * (n - p.parts[0])
    return [n - s for s in accumulate(cols)]


def _column_sums(p: Partition, length: int) -> list[int]:
    cols = list(conjugate(p).parts)
    cols += [0] * (length - len(cols))
    return list(accumulate(cols))


def dominates(a: Partition, b: Partition, strict: bool = False) -> bool:
    """Dominance of ``a`` over ``b`` via cumulative column lengths."""
    if a.n != b.n:
        raise ArgumentError(f"cannot compare partitions of {a.n} and {b.n}")
    length = max(a.parts[0], b.parts[0])
    weak = all(x <= y for x, y in zip(_column_sums(a, length), _column_sums(b, length)))
    if strict:
        return weak and a != b
    return weak


@dataclass(frozen=True)
class HierarchyDag:
    """Degeneracy types with the covering edges of a dominance order.

    ``cover_edges`` holds index pairs ``(i, j)`` meaning ``nodes[i]`` covers
    ``nodes[j]``.
    """

    nodes: tuple[Any, ...]
    cover_edges: tuple[tuple[int, int], ...]
    meta: dict = field(default_factory=dict)

    @cached_property
    def _index(self) -> dict[Any, int]:
        return {node: i for i, node in enumerate(self.nodes)}

    def index(self, node: Any) -> int:
        return self._index[node]

    def edges(self) -> list[tuple[Any, Any]]:
        return [(self.nodes[i], self.nodes[j]) for i, j in self.cover_edges]

    def successors(self, node: Any) -> list[Any]:
        i = self.index(node)
        return [self.nodes[b] for a, b in self.cover_edges if a == i]

    def predecessors(self, node: Any) -> list[Any]:
        j = self.index(node)
        return [self.nodes[a] for a, b in self.cover_edges if b == j]

    def reachability(self) -> np.ndarray:
        """Boolean matrix ``R[i, j]``: a nonempty directed path i -> ... -> j exists."""
        size = len(self.nodes)
        reach = np.zeros((size, size), dtype=bool)
        for i, j in self.cover_edges:
            reach[i, j] = True
        for k in range(size):
            reach |= reach[:, [k]] & reach[[k], :]
        return reach

    def maxima(self) -> list[Any]:
        has_parent = {j for _, j in self.cover_edges}
        return [node for i, node in enumerate(self.nodes) if i not in has_parent]

    def minima(self) -> list[Any]:
        has_child = {i for i, _ in self.cover_edges}
        return [node for i, node in enumerate(self.nodes) if i not in has_child]

    def to_json(self) -> dict:
        return {
            "meta": self.meta,
            "nodes": [node.to_json() for node in self.nodes],
            "edges": [list(e) for e in self.cover_edges],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def transitive_reduction(strict: np.ndarray) -> list[tuple[int, int]]:
    """Covering pairs of a strict partial order given as a boolean matrix."""
    strict = np.asarray(strict, dtype=bool)
    through = (strict.astype(np.int64) @ strict.astype(np.int64)) > 0
    cover = strict & ~through
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(cover))]


def build_dag(
    nodes: Sequence[Any], relation: Callable[[Any, Any], bool], meta: dict | None = None
) -> HierarchyDag:
    """Hierarchy from nodes and a strict order predicate ``relation(a, b)``."""
    size = len(nodes)
    strict = np.zeros((size, size), dtype=bool)
    for i, a in enumerate(nodes):
        for j, b in enumerate(nodes):
            if i != j:
                strict[i, j] = relation(a, b)
    if np.any(strict & strict.T):
        raise ArgumentError("relation is not antisymmetric on the given nodes")
    return HierarchyDag(tuple(nodes), tuple(transitive_reduction(strict)), dict(meta or {}))


def hierarchy_dag(n: int) -> HierarchyDag:
    """Unsigned hierarchy of all degeneracy types with multiplicity ``n``."""
    n = _check_n(n, MAX_HIERARCHY)
    return build_dag(
        partitions_of(n), lambda a, b: dominates(a, b, strict=True), {"n": n, "kind": "unsigned"}
    )


def _grow_first_row(p: Partition) -> Partition:
    return Partition((p.parts[0] + 1,) + p.parts[1:])


def embed_self_similar(dag: HierarchyDag) -> dict[int, int]:
    """Node map from ``hierarchy_dag(n)`` into ``hierarchy_dag(n + 1)``.

    One box is added to the longest Jordan block, so ``(n)`` goes to ``(n+1)``
    and ``(1,)*n`` to ``(2, 1, ..., 1)``. The map is injective and preserves
    strict dominance in both directions.
    """
    n = dag.meta.get("n")
    if n is None or dag.meta.get("kind") != "unsigned":
        raise ArgumentError("self-similar embedding needs an unsigned hierarchy")
    target = hierarchy_dag(n + 1)
    return {i: target.index(_grow_first_row(p)) for i, p in enumerate(dag.nodes)}


def self_similar_subgraph(n: int) -> tuple[set[Partition], set[tuple[Partition, Partition]]]:
    """Copy of ``hierarchy_dag(n)`` inside ``hierarchy_dag(n + 1)``.

    Each covering edge ``A -> B`` maps to the covering edges of the larger
    hierarchy that lie on saturated chains from ``phi(A)`` down to ``phi(B)``.
    """
    small = hierarchy_dag(n)
    big = hierarchy_dag(n + 1)
    phi = embed_self_similar(small)
    nodes: set[Partition] = set()
    edges: set[tuple[Partition, Partition]] = set()
    for i, j in small.cover_edges:
        top, bottom = big.nodes[phi[i]], big.nodes[phi[j]]
        for u, v in big.edges():
            if dominates(top, u) and dominates(v, bottom):
                edges.add((u, v))
                nodes.update((u, v))
    nodes.update(big.nodes[k] for k in phi.values())
    return nodes, edges


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def emit_dot(dag: HierarchyDag, label_style: str = "diagram", name: str = "hierarchy") -> str:
    """DOT digraph of a hierarchy.

    ``label_style="diagram"`` draws each node as ASCII rows of its Young
    diagram (signed diagrams show one sign per box); ``"tuple"`` uses the
    compact type label.
    """
    if label_style not in {"diagram", "tuple"}:
        raise ArgumentError(f"unknown label style {label_style!r}")
    lines = [f"digraph {name} {{", "  rankdir=TB;", '  node [shape=box, fontname="monospace"];']
    for i, node in enumerate(dag.nodes):
        if label_style == "diagram":
            label = "".join(_dot_escape(row) + "\\l" for row in node.rows())
        else:
            label = _dot_escape(str(node))
        lines.append(f'  n{i} [label="{label}", tooltip="{_dot_escape(str(node))}"];')
    for i, j in dag.cover_edges:
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
