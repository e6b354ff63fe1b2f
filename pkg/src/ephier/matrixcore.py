"""Numerical spectral analysis of concrete matrices.

The central routine is a unitary staircase reduction (Kublanovskaya's
algorithm): repeatedly split off the numerical null space of ``H - lam*I`` and
continue on the induced map of the quotient. The null space dimensions are the
column lengths of the Young diagram of the Jordan structure at ``lam``; the
accumulated unitary carries the nested kernels ``ker (H - lam)**i``, which are
reused for metric restrictions and sign characteristics.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, NamedTuple, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.cluster.hierarchy import linkage, to_tree

from .errors import (
    ArgumentError,
    DegenerateRestrictionError,
    InconsistencyError,
    NumericalError,
    SingularMetricError,
)
from .partitions import Partition, conjugate
from .signed import SignedDiagram, signed_of_partition

__all__ = [
    "Tolerances",
    "EigenCluster",
    "Staircase",
    "DegeneracyReport",
    "ClassificationResult",
    "MatrixFormatError",
    "as_matrix",
    "matrix_to_json",
    "matrix_from_json",
    "dumps_matrix",
    "loads_matrix",
    "char_poly",
    "numerical_rank",
    "staircase",
    "cluster_eigenvalues",
    "jordan_type",
    "jordan_diagnostics",
    "power_rank_sequence",
    "degeneracy_check",
    "pseudo_hermitian_check",
    "metric_signature",
    "restricted_signature",
    "sign_characteristic",
    "classify_signed_type",
    "classify",
]


class MatrixFormatError(ArgumentError):
    """Matrix JSON does not follow the ``{"dim", "data"}`` schema."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds; the last three are relative to ``scale(H)``.

    ``cluster_cap`` bounds the diameter of eigenvalue clusters that may be
    merged after passing the rank test (EP splittings grow like ``u**(1/m)``).
    """

    rank_rtol: float = 1e-8
    rank_atol: float = 1e-12
    eig_cluster_tol: float = 1e-6
    degeneracy_tol: float = 1e-8
    cluster_cap: float = 0.1

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not value > 0:
                raise ArgumentError(f"tolerance {name} must be strictly positive, got {value}")

    @staticmethod
    def scale(h: np.ndarray) -> float:
        """``max(1, ||h||_2)``."""
        return max(1.0, float(np.linalg.norm(h, 2))) if h.size else 1.0


DEFAULT_TOL = Tolerances()


# --- matrix plumbing -------------------------------------------------------

def as_matrix(h: Any) -> np.ndarray:
    """Validate and convert to a square complex ndarray."""
    m = np.asarray(h, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ArgumentError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ArgumentError("matrix has non-finite entries")
    return m


def matrix_to_json(h: Any) -> dict:
    m = as_matrix(h)
    return {"dim": m.shape[0], "data": [[float(z.real), float(z.imag)] for z in m.ravel()]}


def matrix_from_json(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict) or "dim" not in obj or "data" not in obj:
        raise MatrixFormatError('matrix JSON must be an object with "dim" and "data"')
    dim, data = obj["dim"], obj["data"]
    if not isinstance(dim, int) or dim < 1:
        raise MatrixFormatError(f'"dim" must be a positive integer, got {dim!r}')
    if not isinstance(data, list) or len(data) != dim * dim:
        raise MatrixFormatError(f'"data" must hold {dim * dim} [re, im] pairs')
    try:
        vals = [complex(float(re), float(im)) for re, im in data]
    except (TypeError, ValueError) as exc:
        raise MatrixFormatError(f"bad entry in data: {exc}") from exc
    return as_matrix(np.array(vals, dtype=complex).reshape(dim, dim))


def dumps_matrix(h: Any) -> str:
    return json.dumps(matrix_to_json(h))


def loads_matrix(text: str) -> np.ndarray:
    return matrix_from_json(json.loads(text))


# --- characteristic polynomial ----------------------------------------------

def char_poly(h: Any) -> np.ndarray:
    """Faddeev-LeVerrier coefficients ``[p_1, ..., p_n]``.

    Convention: ``det(lam - H) = lam**n - p_1 lam**(n-1) - ... - p_n``.
    """
    h = as_matrix(h)
    n = h.shape[0]
    eye = np.eye(n, dtype=complex)
    coeffs = np.empty(n, dtype=complex)
    b = eye
    for k in range(1, n + 1):
        a = h @ b
        coeffs[k - 1] = np.trace(a) / k
        b = a - coeffs[k - 1] * eye
    return coeffs


# --- ranks and the staircase --------------------------------------------------

def numerical_rank(m: Any, tau: float) -> int:
    """Number of singular values strictly above ``tau``."""
    if not tau > 0:
        raise ArgumentError(f"threshold must be positive, got {tau}")
    arr = np.asarray(m, dtype=complex)
    if arr.size == 0:
        return 0
    try:
        s = np.linalg.svd(arr, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    return int(np.sum(s > tau))


def _confidence(s: np.ndarray, k_null: int, tau: float) -> dict:
    kept = s[: len(s) - k_null]
    dropped = s[len(s) - k_null:]
    smallest_kept = float(kept[-1]) if kept.size else math.inf
    largest_dropped = float(dropped[0]) if dropped.size else 0.0
    return {
        "threshold": tau,
        "smallest_kept": smallest_kept,
        "largest_dropped": largest_dropped,
        "low_confidence": bool(np.any((s > tau / 10) & (s < tau * 10))),
    }


@dataclass
class Staircase:
    """Result of the unitary staircase reduction of a square matrix ``N``.

    ``nullities[i]`` is ``dim ker N**(i+1) - dim ker N**i``; the last
    ``sum(nullities[:i])`` columns of ``basis`` span ``ker N**i``.
    """

    nullities: list[int]
    basis: np.ndarray
    steps: list[dict] = field(default_factory=list)

    @property
    def multiplicity(self) -> int:
        return sum(self.nullities)

    @property
    def low_confidence(self) -> bool:
        return any(step["low_confidence"] for step in self.steps) or any(
            a < b for a, b in zip(self.nullities, self.nullities[1:])
        )

    def kernel(self, power: int) -> np.ndarray:
        dim = sum(self.nullities[:power])
        n = self.basis.shape[0]
        return self.basis[:, n - dim:]

    def partition(self) -> Partition | None:
        if not self.nullities:
            return None
        return conjugate(Partition(tuple(sorted(self.nullities, reverse=True))))


def staircase(n_mat: Any, tol: Tolerances = DEFAULT_TOL, ref_norm: float = 0.0) -> Staircase:
    """Nested null spaces of ``N`` with the threshold ``rank_rtol*max(||N||, ref_norm) + rank_atol``.

    When ``N = H - lam`` pass ``ref_norm = ||H||``: rounding errors in ``N``
    scale with ``H``, and a nearly scalar ``H`` would otherwise leave only
    noise to measure ranks against.
    """
    a = as_matrix(n_mat).copy()
    size = a.shape[0]
    tau = tol.rank_rtol * max(float(np.linalg.norm(a, 2)), ref_norm) + tol.rank_atol
    q = np.eye(size, dtype=complex)
    active = size
    nullities: list[int] = []
    steps: list[dict] = []
    while active > 0:
        try:
            _, s, vh = np.linalg.svd(a[:active, :active])
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"SVD failed in staircase step {len(steps) + 1}: {exc}") from exc
        k = int(np.sum(s <= tau))
        steps.append(_confidence(s, k, tau))
        if k == 0:
            break
        t = np.eye(size, dtype=complex)
        t[:active, :active] = vh.conj().T
        a = t.conj().T @ a @ t
        q = q @ t
        nullities.append(k)
        active -= k
    return Staircase(nullities, q, steps)


def power_rank_sequence(h: Any, lam: complex, tol: Tolerances = DEFAULT_TOL) -> list[int]:
    """``rank (H - lam)**i`` for ``i = 1..n`` from explicit powers.

    Uses ``tau_i = rank_rtol*||N**i|| + rank_atol``. Independent of the
    staircase and reliable only for well-conditioned inputs; kept as a
    cross-check.
    """
    h = as_matrix(h)
    n = h.shape[0]
    nmat = h - lam * np.eye(n)
    power = np.eye(n, dtype=complex)
    ranks = []
    for _ in range(n):
        power = power @ nmat
        tau = tol.rank_rtol * float(np.linalg.norm(power, 2)) + tol.rank_atol
        ranks.append(numerical_rank(power, tau))
    return ranks


# --- eigenvalue clusters --------------------------------------------------------

class EigenCluster(NamedTuple):
    centroid: complex
    multiplicity: int
    members: tuple[complex, ...] = ()


def _multiplicity_at(h: np.ndarray, lam: complex, tol: Tolerances) -> int:
    return staircase(h - lam * np.eye(h.shape[0]), tol, float(np.linalg.norm(h, 2))).multiplicity


def cluster_eigenvalues(h: Any, tol: Tolerances = DEFAULT_TOL) -> list[EigenCluster]:
    """Group computed eigenvalues into numerically multiple eigenvalues.

    Single-linkage clusters of radius ``eig_cluster_tol*scale`` are always
    accepted. Wider groups, up to a diameter of ``cluster_cap*scale``, are
    accepted when the staircase at their centroid finds an algebraic
    multiplicity equal to the group size; this catches exceptional points
    whose eigenvalues rounding has split into a small polygon.
    """
    h = as_matrix(h)
    n = h.shape[0]
    try:
        eigs = np.linalg.eigvals(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    if n == 1:
        return [EigenCluster(complex(eigs[0]), 1, (complex(eigs[0]),))]
    scale = tol.scale(h)
    radius = tol.eig_cluster_tol * scale
    cap = tol.cluster_cap * scale
    tree = to_tree(linkage(np.column_stack([eigs.real, eigs.imag]), method="single"))

    groups: list[list[int]] = []
    stack = [tree]
    while stack:
        node = stack.pop()
        leaves = node.pre_order()
        if node.is_leaf() or node.dist <= radius:
            groups.append(leaves)
            continue
        if node.dist <= cap:
            centroid = complex(np.mean(eigs[leaves]))
            if _multiplicity_at(h, centroid, tol) == len(leaves):
                groups.append(leaves)
                continue
        stack.extend([node.get_right(), node.get_left()])

    out = []
    for idx in groups:
        members = tuple(complex(z) for z in eigs[idx])
        out.append(EigenCluster(complex(np.mean(eigs[idx])), len(idx), members))
    out.sort(key=lambda c: (round(c.centroid.real, 9), round(c.centroid.imag, 9)))
    return out


# --- Jordan structure ---------------------------------------------------------

def jordan_diagnostics(h: Any, lam: complex, tol: Tolerances = DEFAULT_TOL) -> Staircase:
    h = as_matrix(h)
    return staircase(h - lam * np.eye(h.shape[0]), tol, float(np.linalg.norm(h, 2)))


def jordan_type(h: Any, lam: complex, tol: Tolerances = DEFAULT_TOL) -> Partition:
    """Jordan block sizes of ``H`` at the eigenvalue ``lam``.

    Raises :class:`ArgumentError` when ``lam`` is not a numerical eigenvalue.
    """
    stair = jordan_diagnostics(h, lam, tol)
    part = stair.partition()
    if part is None:
        raise ArgumentError(f"{lam} is not an eigenvalue within tolerance")
    return part


class DegeneracyReport(NamedTuple):
    degenerate: bool
    residuals: tuple[float, ...]
    thresholds: tuple[float, ...]

    def __bool__(self) -> bool:
        return self.degenerate

    @property
    def residual(self) -> float:
        return max(self.residuals, default=0.0)


def degeneracy_check(h: Any, tol: Tolerances = DEFAULT_TOL) -> DegeneracyReport:
    """Whether all eigenvalues of ``H`` coincide numerically.

    The trace is removed and ``|p_k|**(1/k)`` (same units as eigenvalues)
    is compared with ``(degeneracy_tol * scale**k)**(1/k)`` for ``k >= 2``.
    """
    h = as_matrix(h)
    n = h.shape[0]
    scale = tol.scale(h)
    shifted = h - (np.trace(h) / n) * np.eye(n)
    coeffs = char_poly(shifted)
    residuals = tuple(float(abs(coeffs[k - 1]) ** (1.0 / k)) for k in range(2, n + 1))
    thresholds = tuple(float(tol.degeneracy_tol ** (1.0 / k) * scale) for k in range(2, n + 1))
    ok = all(r <= t for r, t in zip(residuals, thresholds))
    return DegeneracyReport(ok, residuals, thresholds)


# --- pseudo-Hermitian structure ----------------------------------------------

def _check_metric(eta: np.ndarray, tol: float) -> np.ndarray:
    norm = max(float(np.linalg.norm(eta, 2)), 1e-300)
    if np.linalg.norm(eta - eta.conj().T, 2) > tol * norm:
        raise ArgumentError("pseudometric is not Hermitian")
    w = np.linalg.eigvalsh((eta + eta.conj().T) / 2)
    if np.min(np.abs(w)) <= tol * norm:
        raise SingularMetricError("pseudometric is singular within tolerance")
    return w


def pseudo_hermitian_check(h: Any, eta: Any, tol: float = 1e-10) -> bool:
    """``||eta H - H^H eta|| <= tol * ||eta|| * ||H||``."""
    h, eta = as_matrix(h), as_matrix(eta)
    if h.shape != eta.shape:
        raise ArgumentError("matrix and pseudometric dimensions differ")
    _check_metric(eta, tol)
    lhs = np.linalg.norm(eta @ h - h.conj().T @ eta, 2)
    return bool(lhs <= tol * np.linalg.norm(eta, 2) * max(np.linalg.norm(h, 2), 1e-300))


def metric_signature(eta: Any, tol: float = 1e-10) -> tuple[int, int]:
    w = _check_metric(as_matrix(eta), tol)
    return int(np.sum(w > 0)), int(np.sum(w < 0))


def _inertia(form: np.ndarray, tol: float, what: str) -> tuple[int, int]:
    form = (form + form.conj().T) / 2
    w = np.linalg.eigvalsh(form)
    norm = max(float(np.max(np.abs(w))), 1e-300)
    if np.min(np.abs(w)) <= tol * norm:
        raise DegenerateRestrictionError(f"{what} is singular within tolerance")
    return int(np.sum(w > 0)), int(np.sum(w < 0))


def _real_eigenvalue(h: np.ndarray, lam: complex, tol: Tolerances) -> float:
    lam = complex(lam)
    if abs(lam.imag) > tol.eig_cluster_tol * tol.scale(h):
        raise ArgumentError(f"signed classification needs a real eigenvalue, got {lam}")
    return lam.real


def restricted_signature(
    h: Any, eta: Any, lam: complex, tol: Tolerances = DEFAULT_TOL, stair: Staircase | None = None
) -> tuple[int, int]:
    """Signature of ``eta`` restricted to the generalized eigenspace of ``lam``."""
    h, eta = as_matrix(h), as_matrix(eta)
    lam = _real_eigenvalue(h, lam, tol)
    stair = stair or jordan_diagnostics(h, lam, tol)
    if not stair.multiplicity:
        raise ArgumentError(f"{lam} is not an eigenvalue within tolerance")
    basis = stair.kernel(len(stair.nullities))
    return _inertia(basis.conj().T @ eta @ basis, 1e-8, "restricted pseudometric")


def sign_characteristic(
    h: Any, eta: Any, lam: complex, tol: Tolerances = DEFAULT_TOL, stair: Staircase | None = None
) -> tuple[SignedDiagram, list[float]]:
    """Signs of the Jordan blocks at the real eigenvalue ``lam``.

    For ``N = H - lam`` the Hermitian form ``y^H eta N**(s-1) x`` on
    ``ker N**s`` has rank equal to the number of blocks of size exactly ``s``
    and signature equal to the sum of their signs. Returns the diagram and,
    per block size, the gap ratio separating kept from discarded eigenvalues
    of that form.
    """
    h, eta = as_matrix(h), as_matrix(eta)
    lam = _real_eigenvalue(h, lam, tol)
    stair = stair or jordan_diagnostics(h, lam, tol)
    part = stair.partition()
    if part is None:
        raise ArgumentError(f"{lam} is not an eigenvalue within tolerance")
    n = h.shape[0]
    nmat = h - lam * np.eye(n)
    counts = {s: part.parts.count(s) for s in set(part.parts)}
    parts: list[int] = []
    signs: list[int] = []
    gaps: list[float] = []
    power = np.eye(n, dtype=complex)
    for s in range(1, part.parts[0] + 1):
        if s > 1:
            power = power @ nmat
        c = counts.get(s, 0)
        if not c:
            continue
        basis = stair.kernel(s)
        form = basis.conj().T @ eta @ power @ basis
        w = np.linalg.eigvalsh((form + form.conj().T) / 2)
        order = np.argsort(-np.abs(w))
        kept = w[order[:c]]
        rest = np.abs(w[order[c:]])
        gaps.append(float(np.min(np.abs(kept)) / max(float(np.max(rest, initial=0.0)), 1e-300)))
        parts.extend([s] * c)
        signs.extend(1 if x > 0 else -1 for x in kept)
    return SignedDiagram(tuple(parts), tuple(signs)), gaps


@dataclass
class ClassificationResult:
    eigenvalue: complex
    multiplicity: int
    partition: Partition
    signed_candidates: list[SignedDiagram]
    diagnostics: dict

    @property
    def signed_type(self) -> SignedDiagram | None:
        text = self.diagnostics.get("sign_characteristic")
        return SignedDiagram.parse(text) if text else None

    @property
    def low_confidence(self) -> bool:
        return bool(self.diagnostics.get("low_confidence"))

    def to_json(self) -> dict:
        return {
            "eigenvalue": [self.eigenvalue.real, self.eigenvalue.imag],
            "multiplicity": self.multiplicity,
            "partition": self.partition.to_json(),
            "signed_candidates": [d.to_json() for d in self.signed_candidates],
            "signed_type": self.diagnostics.get("sign_characteristic"),
            "margins": self.diagnostics.get("margins", []),
            "low_confidence": self.low_confidence,
        }


def _margins(stair: Staircase) -> list[dict]:
    return [
        {"power": i + 1, **{k: v for k, v in step.items() if k != "low_confidence"}}
        for i, step in enumerate(stair.steps)
    ]


def classify_signed_type(
    h: Any, eta: Any, lam: complex, tol: Tolerances = DEFAULT_TOL
) -> ClassificationResult:
    """Pseudo-Hermitian degeneracy type at the real eigenvalue ``lam``.

    ``signed_candidates`` lists every signed diagram on the measured Jordan
    partition whose box totals match the restricted signature. The sign
    characteristic measured from kernel forms is recorded in the
    diagnostics and must be one of the candidates.
    """
    h, eta = as_matrix(h), as_matrix(eta)
    if not pseudo_hermitian_check(h, eta, max(tol.rank_rtol, 1e-10)):
        raise ArgumentError("matrix is not pseudo-Hermitian with respect to the metric")
    lam_r = _real_eigenvalue(h, lam, tol)
    stair = jordan_diagnostics(h, lam_r, tol)
    part = stair.partition()
    if part is None:
        raise ArgumentError(f"{lam} is not an eigenvalue within tolerance")
    p, q = restricted_signature(h, eta, lam_r, tol, stair)
    candidates = signed_of_partition(part, p, q)
    if not candidates:
        raise InconsistencyError(f"no signed diagram on {part} has signature ({p}, {q})")
    measured, gaps = sign_characteristic(h, eta, lam_r, tol, stair)
    diagnostics = {
        "margins": _margins(stair),
        "column_lengths": list(stair.nullities),
        "restricted_signature": [p, q],
        "sign_characteristic": str(measured),
        "sign_gaps": gaps,
        "low_confidence": stair.low_confidence or min(gaps, default=math.inf) < 10,
    }
    if measured not in candidates:
        diagnostics["low_confidence"] = True
    return ClassificationResult(complex(lam_r), stair.multiplicity, part, candidates, diagnostics)


def classify(h: Any, eta: Any = None, tol: Tolerances = DEFAULT_TOL) -> list[ClassificationResult]:
    """Classify every eigenvalue cluster of ``H``.

    With a metric, clusters at real eigenvalues also get signed types;
    clusters off the real axis keep an empty candidate list.
    """
    h = as_matrix(h)
    results = []
    for cluster in cluster_eigenvalues(h, tol):
        lam = cluster.centroid
        if eta is not None and abs(lam.imag) <= tol.eig_cluster_tol * tol.scale(h):
            res = classify_signed_type(h, eta, lam.real, tol)
        else:
            stair = jordan_diagnostics(h, lam, tol)
            part = stair.partition() or Partition((cluster.multiplicity,))
            res = ClassificationResult(
                lam,
                stair.multiplicity or cluster.multiplicity,
                part,
                [],
                {
                    "margins": _margins(stair),
                    "column_lengths": list(stair.nullities),
                    "low_confidence": stair.low_confidence
                    or stair.multiplicity != cluster.multiplicity,
                },
            )
        results.append(res)
    return results
