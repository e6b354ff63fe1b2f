"""Signed Young diagrams: degeneracy types under pseudo-Hermitian symmetry.

For a matrix that is self-adjoint with respect to an indefinite metric, each
Jordan block at a real eigenvalue carries a sign ``eps_i``. The diagram row of
length ``m`` holds alternating signs ending in ``eps_i``; counting all pluses
and minuses gives the signature ``(p, q)`` of the metric.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate, product
from typing import Iterator, Sequence

import numpy as np

from .errors import ArgumentError, BoundsError
from .partitions import HierarchyDag, Partition, build_dag, partitions_of

__all__ = [
    "SignedDiagram",
    "Pseudometric",
    "box_signs",
    "row_counts",
    "diagram_signature",
    "enumerate_signed",
    "signed_dominates",
    "signed_hierarchy_dag",
    "canonical_pair",
    "sip",
    "flip_signs",
    "forget_signs",
]

MAX_ENUMERATE = 24
MAX_HIERARCHY = 16


def box_signs(m: int, eps: int) -> tuple[int, ...]:
    """Signs of the ``m`` boxes of a row whose rightmost sign is ``eps``."""
    if m < 1:
        raise ArgumentError(f"row length must be positive, got {m}")
    if eps not in (1, -1):
        raise ArgumentError(f"sign must be +1 or -1, got {eps}")
    return tuple(eps * (-1) ** (m - l) for l in range(1, m + 1))


def row_counts(m: int, eps: int) -> tuple[int, int]:
    """``(pluses, minuses)`` of a single row."""
    plus = (m + 1) // 2 if eps > 0 else m // 2
    return plus, m - plus


def _sign_char(eps: int) -> str:
    return "+" if eps > 0 else "-"


@dataclass(frozen=True)
class SignedDiagram:
    """Partition with one sign per row, kept in normalized order.

    Rows are sorted by length (descending) and, among equal lengths, ``+``
    rows precede ``-`` rows. The constructor normalizes its input.
    """

    parts: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        signs = tuple(int(s) for s in self.signs)
        if len(parts) != len(signs):
            raise ArgumentError("need exactly one sign per row")
        if not parts or any(p <= 0 for p in parts):
            raise ArgumentError(f"invalid row lengths {parts}")
        if any(s not in (1, -1) for s in signs):
            raise ArgumentError(f"signs must be +1/-1, got {signs}")
        rows = sorted(zip(parts, signs), key=lambda r: (-r[0], -r[1]))
        object.__setattr__(self, "parts", tuple(r[0] for r in rows))
        object.__setattr__(self, "signs", tuple(r[1] for r in rows))

    @classmethod
    def parse(cls, text: str) -> "SignedDiagram":
        """Parse ``"5+,3+,1-"`` (parentheses optional)."""
        parts, signs = [], []
        for tok in text.strip().strip("()[]").replace(" ", "").split(","):
            if not tok:
                continue
            if tok[-1] not in "+-" or not tok[:-1].isdigit():
                raise ArgumentError(f"cannot parse signed row {tok!r}")
            parts.append(int(tok[:-1]))
            signs.append(1 if tok[-1] == "+" else -1)
        return cls(tuple(parts), tuple(signs))

    @classmethod
    def from_json(cls, obj: dict) -> "SignedDiagram":
        return cls(tuple(obj["parts"]), tuple(obj["signs"]))

    @property
    def partition(self) -> Partition:
        return Partition(self.parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    def signature(self) -> tuple[int, int]:
        p = sum(row_counts(m, e)[0] for m, e in zip(self.parts, self.signs))
        return p, self.n - p

    def boxes(self) -> list[tuple[int, ...]]:
        return [box_signs(m, e) for m, e in zip(self.parts, self.signs)]

    def column_counts(self) -> list[tuple[int, int]]:
        """``(pluses, minuses)`` in each column, left to right."""
        counts = [[0, 0] for _ in range(self.parts[0])]
        for row in self.boxes():
            for col, s in enumerate(row):
                counts[col][0 if s > 0 else 1] += 1
        return [tuple(c) for c in counts]

    def rows(self) -> list[str]:
        return ["".join(_sign_char(s) for s in row) for row in self.boxes()]

    def __str__(self) -> str:
        return "(" + ",".join(f"{m}{_sign_char(e)}" for m, e in zip(self.parts, self.signs)) + ")"

    def to_json(self) -> dict:
        return {"parts": list(self.parts), "signs": list(self.signs)}


@dataclass(frozen=True)
class Pseudometric:
    """Signature of an invertible Hermitian metric, optionally with the matrix."""

    p: int
    q: int
    matrix: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.p < 0 or self.q < 0 or self.p + self.q == 0:
            raise ArgumentError(f"invalid signature ({self.p}, {self.q})")
        if self.matrix is not None and self.matrix.shape != (self.dim, self.dim):
            raise ArgumentError("metric matrix does not match the signature dimension")

    @property
    def dim(self) -> int:
        return self.p + self.q

    def canonical(self) -> np.ndarray:
        """``diag(1_p, -1_q)``."""
        return np.diag([1.0] * self.p + [-1.0] * self.q).astype(complex)

    def as_matrix(self) -> np.ndarray:
        return self.canonical() if self.matrix is None else self.matrix

    @classmethod
    def parse(cls, text: str) -> "Pseudometric":
        try:
            p, q = (int(tok) for tok in text.split(","))
        except ValueError as exc:
            raise ArgumentError(f"expected 'P,Q', got {text!r}") from exc
        return cls(p, q)


def diagram_signature(d: SignedDiagram) -> tuple[int, int, int]:
    """``(p, q, p - q)`` from counting box signs."""
    p, q = d.signature()
    return p, q, p - q


def _sign_splits(counts: Sequence[tuple[int, int]]) -> Iterator[tuple[int, ...]]:
    """Normalized sign tuples for groups of equal rows ``(length, multiplicity)``."""
    choices = []
    for _, mult in counts:
        choices.append([(1,) * k + (-1,) * (mult - k) for k in range(mult, -1, -1)])
    for combo in product(*choices):
        yield tuple(s for group in combo for s in group)


def _groups(parts: Sequence[int]) -> list[tuple[int, int]]:
    groups: list[tuple[int, int]] = []
    for m in parts:
        if groups and groups[-1][0] == m:
            groups[-1] = (m, groups[-1][1] + 1)
        else:
            groups.append((m, 1))
    return groups


def signed_of_partition(partition: Partition, p: int | None = None, q: int | None = None) -> list[SignedDiagram]:
    """Normalized sign decorations of ``partition``, optionally with fixed box totals."""
    out = []
    for signs in _sign_splits(_groups(partition.parts)):
        d = SignedDiagram(partition.parts, signs)
        if p is None or d.signature() == (p, q):
            out.append(d)
    return out


def enumerate_signed(p: int, q: int) -> list[SignedDiagram]:
    """All normalized signed diagrams with ``p`` pluses and ``q`` minuses."""
    if p < 0 or q < 0 or not 1 <= p + q <= MAX_ENUMERATE:
        raise BoundsError(f"need p, q >= 0 and 1 <= p+q <= {MAX_ENUMERATE}, got ({p}, {q})")
    out: list[SignedDiagram] = []
    for part in partitions_of(p + q):
        out.extend(signed_of_partition(part, p, q))
    return out


def _cumulative_counts(d: SignedDiagram, length: int) -> list[tuple[int, int]]:
    cols = d.column_counts() + [(0, 0)] * (length - d.parts[0])
    plus = list(accumulate(c[0] for c in cols))
    minus = list(accumulate(c[1] for c in cols))
    return list(zip(plus, minus))


def signed_dominates(a: SignedDiagram, b: SignedDiagram, strict: bool = False) -> bool:
    """Dominance of signed diagrams through cumulative per-sign column counts."""
    if a.signature() != b.signature():
        raise ArgumentError(f"signatures differ: {a} has {a.signature()}, {b} has {b.signature()}")
    length = max(a.parts[0], b.parts[0])
    weak = all(
        pa <= pb and ma <= mb
        for (pa, ma), (pb, mb) in zip(_cumulative_counts(a, length), _cumulative_counts(b, length))
    )
    return weak and a != b if strict else weak


def signed_hierarchy_dag(p: int, q: int) -> HierarchyDag:
    """Hierarchy of pseudo-Hermitian degeneracy types for the metric ``eta_{p,q}``."""
    if p < 0 or q < 0 or not 1 <= p + q <= MAX_HIERARCHY:
        raise BoundsError(f"need 1 <= p+q <= {MAX_HIERARCHY}, got ({p}, {q})")
    return build_dag(
        enumerate_signed(p, q),
        lambda a, b: signed_dominates(a, b, strict=True),
        {"p": p, "q": q, "n": p + q, "kind": "signed"},
    )


def sip(m: int) -> np.ndarray:
    """The ``m x m`` reversal (standard involutory permutation) matrix."""
    return np.eye(m)[::-1].copy()


def _block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for b in blocks:
        m = b.shape[0]
        out[k:k + m, k:k + m] = b
        k += m
    return out


def canonical_pair(d: SignedDiagram) -> tuple[np.ndarray, np.ndarray]:
    """Nilpotent Jordan matrix ``J`` and metric ``P`` with ``P J = J^H P``.

    ``P`` is the direct sum of ``eps_i * sip(m_i)``.
    """
    jordan = [np.eye(m, k=1) for m in d.parts]
    metric = [e * sip(m) for m, e in zip(d.parts, d.signs)]
    return _block_diag(jordan), _block_diag(metric)


def flip_signs(d: SignedDiagram) -> SignedDiagram:
    """Diagram of the same matrix with respect to ``-eta``."""
    return SignedDiagram(d.parts, tuple(-s for s in d.signs))


def forget_signs(d: SignedDiagram) -> Partition:
    return d.partition
