"""Representatives of degeneracy types and explicit conversions between them.

A conversion witness is a small perturbation ``delta`` that turns the Jordan
matrix of type ``B`` into a matrix that is still fully degenerate but has
the dominating type ``A``. Searches stay inside spaces of perturbations that
keep the matrix nilpotent by construction, so the degeneracy conditions hold
exactly and only the Jordan type has to be checked.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import ArgumentError, OrderError
from .matrixcore import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    char_poly,
    classify_signed_type,
    degeneracy_check,
    jordan_diagnostics,
    matrix_to_json,
    pseudo_hermitian_check,
)
from .partitions import Partition, dominates, hierarchy_dag
from .signed import SignedDiagram, canonical_pair, signed_dominates, signed_hierarchy_dag, Pseudometric

__all__ = [
    "PerturbationWitness",
    "EdgeReport",
    "jordan_matrix",
    "random_conjugate",
    "random_isometry",
    "pattern_degeneracy",
    "versal_nonderogatory",
    "versal_21",
    "sing21_family",
    "conversion_witness",
    "verify_hierarchy_edges",
]


# --- representatives ------------------------------------------------------------

def jordan_matrix(p: Partition | Sequence[int], lam: complex = 0.0) -> np.ndarray:
    """Direct sum of upper Jordan blocks of sizes ``p`` at eigenvalue ``lam``."""
    p = Partition.from_any(p)
    n = p.n
    out = lam * np.eye(n, dtype=complex)
    k = 0
    for m in p.parts:
        for i in range(m - 1):
            out[k + i, k + i + 1] = 1.0
        k += m
    return out


def _rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_conjugate(h: Any, cond_max: float = 1e3, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """``S H S^-1`` for a random ``S`` whose condition number is at most ``cond_max``.

    ``S = U diag(s) V^H`` with Haar unitaries and singular values spread
    log-uniformly over ``[1/cond_max, 1]``, the extremes always included.
    """
    if not cond_max >= 1:
        raise ArgumentError(f"cond_max must be >= 1, got {cond_max}")
    h = as_matrix(h)
    n = h.shape[0]
    rng = _rng(seed)
    u, v = _haar_unitary(rng, n), _haar_unitary(rng, n)
    x = rng.uniform(0.0, 1.0, n)
    if n > 1:
        x[0], x[-1] = 0.0, 1.0
    s = cond_max ** (-x)
    s_mat = (u * s) @ v.conj().T
    s_inv = (v / s) @ u.conj().T
    return s_mat @ h @ s_inv


def random_isometry(eta: Any, strength: float = 0.5, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Random ``T`` with ``T^H eta T = eta``: the exponential of an ``eta``-skew generator."""
    eta = as_matrix(eta)
    n = eta.shape[0]
    rng = _rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = (a - a.conj().T) / 2
    a *= strength / max(np.linalg.norm(a, 2), 1e-300)
    return sla.expm(np.linalg.solve(eta, a))


def pattern_degeneracy(bits: Sequence[int]) -> tuple[np.ndarray, Partition]:
    """Nilpotent bidiagonal matrix with the given superdiagonal pattern.

    Each maximal run of ``r`` ones gives a block of size ``r + 1``; the
    remaining dimensions are blocks of size one.
    """
    bits = [int(b) for b in bits]
    if any(b not in (0, 1) for b in bits):
        raise ArgumentError(f"pattern entries must be 0 or 1, got {bits}")
    n = len(bits) + 1
    mat = np.zeros((n, n), dtype=complex)
    for i, b in enumerate(bits):
        mat[i, i + 1] = b
    blocks, run = [], 1
    for b in bits:
        if b:
            run += 1
        else:
            blocks.append(run)
            run = 1
    blocks.append(run)
    return mat, Partition.from_any(blocks)


def versal_nonderogatory(n: int, deltas: Sequence[complex]) -> np.ndarray:
    """``J_n`` with last row ``(delta_1, ..., delta_{n-1}, 0)``.

    Its coefficients are ``char_poly = (0, delta_{n-1}, ..., delta_1)``.
    """
    if n < 2:
        raise ArgumentError(f"need n >= 2, got {n}")
    if len(deltas) != n - 1:
        raise ArgumentError(f"need {n - 1} deltas, got {len(deltas)}")
    out = jordan_matrix(Partition((n,)))
    out[n - 1, : n - 1] = np.asarray(deltas, dtype=complex)
    return out


def versal_21(d21: complex, d33: complex, d23: complex, d31: complex) -> np.ndarray:
    """Four-parameter transversal family through ``J_{2,1}``.

    ``det(lam - H) = lam**3 - (d21 + d33**2) lam - (d23*d31 - d21*d33)``.
    """
    out = jordan_matrix(Partition((2, 1)))
    out[1, 0] = d21
    out[1, 1] = -d33
    out[1, 2] = d23
    out[2, 0] = d31
    out[2, 2] = d33
    return out


def sing21_family(eps: float) -> np.ndarray:
    """Member of the ``versal_21`` family on which both coefficients vanish."""
    return versal_21(-eps**2, eps, eps, -eps**2)


# --- witnesses --------------------------------------------------------------------

@dataclass
class PerturbationWitness:
    source: Partition | SignedDiagram
    target: Partition | SignedDiagram
    epsilon: float
    delta: np.ndarray
    verified: bool
    base: np.ndarray
    metric: np.ndarray | None = None
    margins: dict = field(default_factory=dict)
    search_log: list[str] = field(default_factory=list)

    @property
    def perturbed(self) -> np.ndarray:
        return self.base + self.delta

    def to_json(self) -> dict:
        out = {
            "source": str(self.source),
            "target": str(self.target),
            "epsilon": self.epsilon,
            "delta": matrix_to_json(self.delta),
            "verified": self.verified,
            "margins": self.margins,
            "search_log": self.search_log,
        }
        if self.metric is not None:
            out["metric"] = matrix_to_json(self.metric)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _check_unsigned(h: np.ndarray, target: Partition, tol: Tolerances) -> dict | None:
    report = degeneracy_check(h, tol)
    if not report:
        return None
    lam = np.trace(h) / h.shape[0]
    stair = jordan_diagnostics(h, lam, tol)
    if stair.low_confidence or stair.partition() != target:
        return None
    return {
        "degeneracy_residual": report.residual,
        "steps": [{k: v for k, v in s.items() if k != "low_confidence"} for s in stair.steps],
    }


def _check_signed(h: np.ndarray, eta: np.ndarray, target: SignedDiagram, tol: Tolerances) -> dict | None:
    report = degeneracy_check(h, tol)
    if not report or not pseudo_hermitian_check(h, eta):
        return None
    lam = (np.trace(h) / h.shape[0]).real
    try:
        res = classify_signed_type(h, eta, lam, tol)
    except ArithmeticError:
        return None
    if res.low_confidence or res.signed_type != target or target not in res.signed_candidates:
        return None
    return {
        "degeneracy_residual": report.residual,
        "sign_gaps": res.diagnostics["sign_gaps"],
        "candidates": [str(d) for d in res.signed_candidates],
    }


def _scaled(direction: np.ndarray, eps: float) -> np.ndarray:
    return direction * (eps / np.linalg.norm(direction, 2))


def _upper_units(base: np.ndarray) -> list[tuple[int, int]]:
    """Strictly upper positions not already used by ``base``, rows bottom-up."""
    n = base.shape[0]
    return [
        (i, j)
        for i in range(n - 1, -1, -1)
        for j in range(i + 1, n)
        if base[i, j] == 0
    ]


def _newton_project(base: np.ndarray, delta: np.ndarray, iters: int = 50, tol: float = 1e-12) -> np.ndarray | None:
    """Damped Gauss-Newton on ``char_poly(base + delta) = 0`` (minimum-norm steps)."""
    n = base.shape[0]
    h_fd = 1e-7

    def resid(d: np.ndarray) -> np.ndarray:
        return char_poly(base + d)

    r = resid(delta)
    for _ in range(iters):
        if np.linalg.norm(r) <= tol:
            return delta
        jac = np.empty((n, n * n), dtype=complex)
        for k in range(n * n):
            e = np.zeros(n * n, dtype=complex)
            e[k] = h_fd
            jac[:, k] = (resid(delta + e.reshape(n, n)) - r) / h_fd
        step = np.linalg.lstsq(jac, -r, rcond=None)[0].reshape(n, n)
        damp = 1.0
        while damp > 1e-4:
            trial = delta + damp * step
            r_new = resid(trial)
            if np.linalg.norm(r_new) < np.linalg.norm(r):
                delta, r = trial, r_new
                break
            damp /= 2
        else:
            return None
    return delta if np.linalg.norm(r) <= tol else None


def _unsigned_search(
    b: Partition, a: Partition, eps: float, rng: np.random.Generator, tol: Tolerances, tiers: Sequence[int]
) -> tuple[np.ndarray | None, dict, list[str]]:
    base = jordan_matrix(b)
    n = b.n
    units = _upper_units(base)
    log: list[str] = []

    def unit(i: int, j: int) -> np.ndarray:
        m = np.zeros((n, n), dtype=complex)
        m[i, j] = 1.0
        return m

    if 1 in tiers:
        for i, j in units:
            for sign in (1, -1):
                delta = sign * eps * unit(i, j)
                margins = _check_unsigned(base + delta, a, tol)
                if margins is not None:
                    log.append(f"tier 1: single unit E_{i + 1}{j + 1} with t={sign * eps:g}")
                    return delta, margins, log
        log.append(f"tier 1: {2 * len(units)} single units tried")
    if 2 in tiers:
        for (i1, j1), (i2, j2) in itertools.combinations(units, 2):
            delta = _scaled(unit(i1, j1) + unit(i2, j2), eps)
            margins = _check_unsigned(base + delta, a, tol)
            if margins is not None:
                log.append(f"tier 2: pair E_{i1 + 1}{j1 + 1} + E_{i2 + 1}{j2 + 1}")
                return delta, margins, log
        log.append("tier 2: all unit pairs tried")
    if 3 in tiers:
        for attempt in range(20):
            start = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            start = _scaled(start, eps / 2)
            delta = _newton_project(base, start)
            if delta is None or np.linalg.norm(delta, 2) > eps:
                continue
            margins = _check_unsigned(base + delta, a, tol)
            if margins is not None:
                log.append(f"tier 3: Newton-projected random direction (attempt {attempt + 1})")
                return delta, margins, log
        log.append("tier 3: 20 Newton-projected random directions tried")
    return None, {}, log


def _graded_basis(
    d: SignedDiagram,
    metric: np.ndarray,
    mixing: Sequence[tuple[int, int]] = (),
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, list[tuple[float, int]]]:
    """Basis adapted to the weight grading of the canonical pair, with ordering keys.

    Basis vector ``l`` (1-based) of a block of size ``m`` has weight
    ``l - (m+1)/2``; the nilpotent part lowers weight by one and the metric
    pairs weight ``w`` with ``-w``. Level ``w > 0`` gets a basis ``b_j`` and
    level ``-w`` the dual basis; weight zero gets a Witt basis of isotropic
    pairs plus anisotropic leftovers. Keys satisfy: the metric pairs key
    ``k`` with key ``-k``.

    Each choice of level bases is a flag with its own space of
    nilpotency-preserving perturbations. ``mixing`` lists row pairs
    ``(i, j)`` of opposite sign whose vectors are replaced by
    ``(x_i + x_j)/sqrt(2)`` and ``(x_i - x_j)/sqrt(2)`` on every shared
    level; ``rng`` adds a random unitary mix on each level.
    """
    n = d.n
    levels: dict[float, dict[int, int]] = {}
    start = 0
    for row, m in enumerate(d.parts):
        for l in range(1, m + 1):
            levels.setdefault(l - (m + 1) / 2, {})[row] = start + l - 1
        start += m
    eye = np.eye(n, dtype=complex)

    def level_basis(w: float) -> tuple[np.ndarray, list[int]]:
        rows = levels[w]
        order = list(rows)
        cols = {r: eye[:, rows[r]] for r in order}
        for i, j in mixing:
            if i in cols and j in cols:
                xi, xj = cols[i], cols[j]
                cols[i], cols[j] = (xi + xj) / np.sqrt(2), (xi - xj) / np.sqrt(2)
        mat = np.column_stack([cols[r] for r in order])
        if rng is not None:
            mat = mat @ _haar_unitary(rng, len(order))
        return mat, order

    columns: list[np.ndarray] = []
    keys: list[tuple[float, int]] = []
    for w in sorted(k for k in levels if k > 0):
        b_up, _ = level_basis(w)
        down = eye[:, list(levels[-w].values())]
        pairing = down.conj().T @ metric @ b_up
        b_down = down @ np.linalg.inv(pairing).conj().T
        for j in range(b_up.shape[1]):
            columns += [b_up[:, j], b_down[:, j]]
            keys += [(w, j + 1), (-w, -(j + 1))]
    if 0.0 in levels:
        level, _ = level_basis(0.0)
        gram0 = level.conj().T @ metric @ level
        # Witt basis of the weight-zero level from its own inertia.
        vals, vecs = np.linalg.eigh((gram0 + gram0.conj().T) / 2)
        vecs = vecs / np.sqrt(np.abs(vals))
        plus = [level @ vecs[:, k] for k in range(len(vals)) if vals[k] > 0]
        minus = [level @ vecs[:, k] for k in range(len(vals)) if vals[k] < 0]
        if not mixing and rng is None:
            plus = [eye[:, i] for i in levels[0.0].values() if metric[i, i].real > 0]
            minus = [eye[:, i] for i in levels[0.0].values() if metric[i, i].real < 0]
        pairs = min(len(plus), len(minus))
        for k in range(pairs):
            columns += [(plus[k] + minus[k]) / np.sqrt(2), (plus[k] - minus[k]) / np.sqrt(2)]
            keys += [(0.0, -(k + 1)), (0.0, k + 1)]
        for v in plus[pairs:] + minus[pairs:]:
            columns.append(v)
            keys.append((0.0, 0))
    return np.column_stack(columns), keys


def _matchings(d: SignedDiagram, limit: int = 64) -> list[list[tuple[int, int]]]:
    """Ordered matchings of ``+`` rows with ``-`` rows, smallest first."""
    plus = [r for r, e in enumerate(d.signs) if e > 0]
    minus = [r for r, e in enumerate(d.signs) if e < 0]
    out: list[list[tuple[int, int]]] = []
    for size in range(1, min(len(plus), len(minus)) + 1):
        for ps in itertools.combinations(plus, size):
            for ms in itertools.permutations(minus, size):
                for flips in itertools.product((False, True), repeat=size):
                    out.append([(m, p) if f else (p, m) for p, m, f in zip(ps, ms, flips)])
                    if len(out) >= limit:
                        return out
    return out


def _signed_directions(
    d: SignedDiagram,
    metric: np.ndarray,
    mixing: Sequence[tuple[int, int]] = (),
    rng: np.random.Generator | None = None,
) -> list[tuple[str, np.ndarray]]:
    """Selfadjoint perturbations that strictly lower the key order of a graded basis.

    Added to the nilpotent canonical matrix they keep it nilpotent.
    """
    basis, keys = _graded_basis(d, metric, mixing, rng)
    basis_inv = np.linalg.inv(basis)
    gram = basis.conj().T @ metric @ basis
    gram_inv = np.linalg.inv(gram)
    n = d.n
    out = []
    for a, b in itertools.product(range(n), repeat=2):
        if not keys[a] < keys[b]:
            continue
        for phase, tag in ((1.0, "re"), (1j, "im")):
            e = np.zeros((n, n), dtype=complex)
            e[a, b] = phase
            local = e + gram_inv @ e.conj().T @ gram
            delta = basis @ local @ basis_inv
            if np.linalg.norm(delta) > 1e-12:
                out.append((f"{tag}({a},{b})", delta))
    return out


def _signed_search(
    b: SignedDiagram, a: SignedDiagram, eps: float, rng: np.random.Generator, tol: Tolerances, tiers: Sequence[int]
) -> tuple[np.ndarray | None, dict, list[str], np.ndarray, np.ndarray]:
    base, metric = canonical_pair(b)
    dirs = _signed_directions(b, metric)
    log: list[str] = []

    def check(direction: np.ndarray) -> dict | None:
        return _check_signed(base + _scaled(direction, eps), metric, a, tol)

    if 1 in tiers:
        for name, d in dirs:
            for sign in (1, -1):
                margins = check(sign * d)
                if margins is not None:
                    log.append(f"tier 1: single direction {name}, sign {sign:+d}")
                    return _scaled(sign * d, eps), margins, log, base, metric
        log.append(f"tier 1: {2 * len(dirs)} single directions tried")
    if 2 in tiers:
        for (n1, d1), (n2, d2) in itertools.combinations(dirs, 2):
            for s2 in (1, -1):
                combo = d1 + s2 * d2
                if np.linalg.norm(combo) < 1e-12:
                    continue
                margins = check(combo)
                if margins is not None:
                    log.append(f"tier 2: pair {n1} {'+' if s2 > 0 else '-'} {n2}")
                    return _scaled(combo, eps), margins, log, base, metric
        log.append("tier 2: all direction pairs tried")
    if 3 in tiers:
        flags: list[tuple[str, list[tuple[str, np.ndarray]]]] = [
            (f"mixed rows {m}", _signed_directions(b, metric, m)) for m in _matchings(b)
        ]
        flags += [(f"random flag {k + 1}", _signed_directions(b, metric, (), rng)) for k in range(10)]
        for label, flag_dirs in flags:
            for name, d in flag_dirs:
                for sign in (1, -1):
                    margins = check(sign * d)
                    if margins is not None:
                        log.append(f"tier 3: {label}, direction {name}, sign {sign:+d}")
                        return _scaled(sign * d, eps), margins, log, base, metric
        log.append(f"tier 3: {len(flags)} alternative flags tried")
    return None, {}, log, base, metric


def conversion_witness(
    source: Partition | SignedDiagram | Sequence[int] | str,
    target: Partition | SignedDiagram | Sequence[int] | str,
    eps: float = 1e-3,
    symmetry: Pseudometric | None = None,
    seed: int | None = 0,
    tol: Tolerances = DEFAULT_TOL,
    tiers: Sequence[int] = (1, 2, 3),
) -> PerturbationWitness:
    """Search for ``delta`` with ``||delta||_2 <= eps`` turning type ``source`` into ``target``.

    Signed diagrams (or a ``symmetry``) select the pseudo-Hermitian search,
    where ``delta`` is selfadjoint for the metric of the canonical pair of
    ``source``. An exhausted search returns ``verified=False`` with the log.
    """
    if not 0 < eps < 1:
        raise ArgumentError(f"epsilon must lie in (0, 1), got {eps}")
    rng = np.random.default_rng(seed)
    signed = symmetry is not None or isinstance(source, SignedDiagram) or isinstance(target, SignedDiagram)
    if signed:
        b = source if isinstance(source, SignedDiagram) else SignedDiagram.parse(str(source))
        a = target if isinstance(target, SignedDiagram) else SignedDiagram.parse(str(target))
        if symmetry is not None and b.signature() != (symmetry.p, symmetry.q):
            raise ArgumentError(f"{b} does not have signature ({symmetry.p}, {symmetry.q})")
        if not signed_dominates(a, b, strict=True):
            raise OrderError(f"{a} does not strictly dominate {b}")
        delta, margins, log, base, metric = _signed_search(b, a, eps, rng, tol, tiers)
    else:
        b, a = Partition.from_any(source), Partition.from_any(target)
        if not dominates(a, b, strict=True):
            raise OrderError(f"{a} does not strictly dominate {b}")
        delta, margins, log = _unsigned_search(b, a, eps, rng, tol, tiers)
        base, metric = jordan_matrix(b), None
    if delta is None:
        return PerturbationWitness(b, a, eps, np.zeros_like(base), False, base, metric, {}, log)
    margins["delta_norm"] = float(np.linalg.norm(delta, 2))
    return PerturbationWitness(b, a, eps, delta, True, base, metric, margins, log)


@dataclass
class EdgeReport:
    witnesses: list[PerturbationWitness]

    @property
    def verified(self) -> list[PerturbationWitness]:
        return [w for w in self.witnesses if w.verified]

    @property
    def unverified(self) -> list[PerturbationWitness]:
        return [w for w in self.witnesses if not w.verified]

    @property
    def all_verified(self) -> bool:
        return not self.unverified

    def to_json(self) -> dict:
        return {
            "edges": [
                {"from": str(w.source), "to": str(w.target), "verified": w.verified, "log": w.search_log}
                for w in self.witnesses
            ],
            "all_verified": self.all_verified,
        }


def verify_hierarchy_edges(
    which: int | tuple[int, int], eps: float = 1e-3, seed: int | None = 0, tol: Tolerances = DEFAULT_TOL
) -> EdgeReport:
    """Attempt a witness for every covering edge of an unsigned or signed hierarchy."""
    if isinstance(which, tuple):
        p, q = which
        if p + q > 9:
            raise ArgumentError("signed edge verification supports p + q <= 9")
        dag = signed_hierarchy_dag(p, q)
        sym = Pseudometric(p, q)
    else:
        if which > 6:
            raise ArgumentError("unsigned edge verification supports n <= 6")
        dag = hierarchy_dag(which)
        sym = None
    witnesses = [conversion_witness(lo, hi, eps, sym, seed, tol) for hi, lo in dag.edges()]
    return EdgeReport(witnesses)
