"""Non-Hermitian Lieb-lattice Bloch Hamiltonian and its triple degeneracies.

The 3x3 Bloch matrix has the chiral form ``[[0, a, 0], [b, 0, c], [0, d, 0]]``
so its eigenvalues are ``0, +-eps0`` with ``eps0**2 = a*b + c*d``. Triple
degeneracies are the zeros of ``eps0**2`` on the Brillouin-zone torus.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import ArgumentError
from .matrixcore import DEFAULT_TOL, Tolerances, degeneracy_check, numerical_rank
from .partitions import Partition

__all__ = [
    "LiebParams",
    "DegeneracyPoint",
    "lieb_hamiltonian",
    "eps0_squared",
    "find_degeneracies",
    "classify_point",
    "analytic_points",
    "scan",
    "scan_csv",
    "parse_range",
]

log = logging.getLogger(__name__)

MERGE_DIST = 1e-6
# Relative size of |eps0^2| accepted as an exact zero (rounding level of a*b + c*d).
ROOT_FLOOR = 1e-13


def _wrap(k: float) -> float:
    """Map an angle to ``(-pi, pi]``."""
    w = math.remainder(k, 2 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class LiebParams:
    eps1: float
    eps2: float
    kx: float = 0.0
    ky: float = 0.0

    def __post_init__(self) -> None:
        for name in ("eps1", "eps2", "kx", "ky"):
            if not math.isfinite(getattr(self, name)):
                raise ArgumentError(f"{name} must be finite")
        object.__setattr__(self, "kx", _wrap(self.kx))
        object.__setattr__(self, "ky", _wrap(self.ky))


@dataclass(frozen=True)
class DegeneracyPoint:
    kx: float
    ky: float
    partition: Partition
    residual: float

    def to_json(self) -> dict:
        return {"kx": self.kx, "ky": self.ky, "type": str(self.partition), "residual": self.residual}


def _entries(eps1: float, eps2: float, kx: float, ky: float) -> tuple[complex, complex, complex, complex]:
    a = 1 + np.exp(1j * ky) + 1j * eps1
    b = 1 + np.exp(-1j * ky) + 1j * eps2
    c = 1 + np.exp(-1j * kx) - 1j * eps2
    d = 1 + np.exp(1j * kx) - 1j * eps1
    return a, b, c, d


def lieb_hamiltonian(params: LiebParams) -> np.ndarray:
    a, b, c, d = _entries(params.eps1, params.eps2, params.kx, params.ky)
    return np.array([[0, a, 0], [b, 0, c], [0, d, 0]], dtype=complex)


def eps0_squared(params: LiebParams) -> complex:
    """Squared nonzero eigenvalue; ``char_poly`` of the Hamiltonian is ``(0, eps0**2, 0)``."""
    a, b, c, d = _entries(params.eps1, params.eps2, params.kx, params.ky)
    return complex(a * b + c * d)


def _eps0_sq_vec(eps1: float, eps2: float, kx: np.ndarray, ky: np.ndarray) -> np.ndarray:
    a, b, c, d = _entries(eps1, eps2, kx, ky)
    return a * b + c * d


def classify_point(point: DegeneracyPoint | tuple[float, float], eps1: float, eps2: float,
                   tol: Tolerances = DEFAULT_TOL) -> Partition:
    """Jordan type at a triple degeneracy from the rank of the Hamiltonian.

    The degenerate eigenvalue is zero (the matrix is traceless), so rank 2
    means a single 3x3 block, rank 1 type ``(2,1)`` and rank 0 a tribolical point.
    """
    kx, ky = (point.kx, point.ky) if isinstance(point, DegeneracyPoint) else point
    h = lieb_hamiltonian(LiebParams(eps1, eps2, kx, ky))
    if not degeneracy_check(h, tol):
        raise ArgumentError(f"no triple degeneracy at k=({kx}, {ky})")
    scale = tol.scale(h)
    rank = numerical_rank(h, tol.rank_rtol * scale + tol.rank_atol)
    return {2: Partition((3,)), 1: Partition((2, 1)), 0: Partition((1, 1, 1))}[rank]


def _torus_dist(p: tuple[float, float], q: tuple[float, float]) -> float:
    return math.hypot(_wrap(p[0] - q[0]), _wrap(p[1] - q[1]))


def _root_floor(eps1: float, eps2: float) -> float:
    """Absolute level below which ``|eps0**2|`` counts as zero."""
    terms = abs(2 + (1 + 1j * eps1) * (1 + 1j * eps2) + (1 - 1j * eps1) * (1 - 1j * eps2))
    terms += 2 * abs(1 + 1j * eps1) + 2 * abs(1 + 1j * eps2)
    return ROOT_FLOOR * max(1.0, terms)


def _jacobian_sigma(eps1: float, eps2: float, k: tuple[float, float]) -> float:
    """Smallest singular value of the real 2x2 Jacobian of ``(Re, Im) eps0**2`` at ``k``."""
    a, b, c, d = _entries(eps1, eps2, k[0], k[1])
    ex, ey = np.exp(1j * k[0]), np.exp(1j * k[1])
    fx = -1j / ex * d + c * 1j * ex
    fy = 1j * ey * b - a * 1j / ey
    jac = np.array([[fx.real, fy.real], [fx.imag, fy.imag]])
    return float(np.linalg.svd(jac, compute_uv=False)[-1])


def _same_root(eps1: float, eps2: float, p: tuple[float, float], q: tuple[float, float],
               floor: float, merge: float) -> bool:
    """Whether two polished roots are numerically the same point.

    Close roots always merge. Around a multiple zero (singular Jacobian)
    ``|eps0**2|`` grows only like ``dist**m``, so roots scatter up to about
    ``floor**(1/3)`` (triple zeros being the highest order away from the
    Hermitian point); those merge within ten times that radius.
    """
    dist = _torus_dist(p, q)
    if dist <= merge:
        return True
    radius = 10 * floor ** (1 / 3)
    if dist > radius:
        return False
    return min(_jacobian_sigma(eps1, eps2, p), _jacobian_sigma(eps1, eps2, q)) <= radius


def find_degeneracies(eps1: float, eps2: float, tol: Tolerances = DEFAULT_TOL, grid: int = 256,
                      merge: float = MERGE_DIST) -> list[DegeneracyPoint]:
    """All zeros of ``eps0**2`` on the torus, each classified from its matrix.

    Seeds are local minima of ``|eps0**2|`` on a ``grid x grid`` mesh whose
    nodes include the high-symmetry momenta; each is polished by
    Levenberg-Marquardt on the real and imaginary parts. Seeds that do not
    reach the floating-point zero level are dropped (and logged).

    Near a multiple zero the polished roots scatter along a tiny set where
    ``|eps0**2|`` is at rounding level; such roots are merged (within
    ``merge``, or when ``|eps0**2|`` stays at zero level on the segment
    joining them). A merged point takes the member of lowest matrix rank,
    since rank can only drop in the limit.
    """
    floor = _root_floor(eps1, eps2)
    ks = -math.pi + 2 * math.pi * np.arange(grid) / grid
    kx, ky = np.meshgrid(ks, ks, indexing="ij")
    mag = np.abs(_eps0_sq_vec(eps1, eps2, kx, ky))
    neighbors = [np.roll(np.roll(mag, dx, 0), dy, 1) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if dx or dy]
    is_min = np.all([mag <= nb for nb in neighbors], axis=0)
    seeds = [(kx[i, j], ky[i, j]) for i, j in zip(*np.nonzero(is_min)) if mag[i, j] < 0.5]

    def resid(k: np.ndarray) -> np.ndarray:
        z = complex(_eps0_sq_vec(eps1, eps2, k[0], k[1]))
        return np.array([z.real, z.imag])

    def polish(seed: tuple[float, float]) -> tuple[float, float] | None:
        sol = least_squares(resid, np.array(seed), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        k = (_wrap(sol.x[0]), _wrap(sol.x[1]))
        value = abs(complex(_eps0_sq_vec(eps1, eps2, *k)))
        if value > floor:
            log.info("seed (%.4f, %.4f) dropped: |eps0^2| = %.3g after polishing", *seed, value)
            return None
        return k

    roots = [k for k in map(polish, seeds) if k is not None]
    # Restarts around each root resolve pairs closer than the grid spacing.
    step = math.pi / grid
    restarts = [
        (k[0] + dx * step, k[1] + dy * step)
        for k in roots
        for dx in (-1, 0, 1)
        for dy in (-1, 0, 1)
        if dx or dy
    ]
    roots += [k for k in map(polish, restarts) if k is not None]

    clusters: list[list[tuple[float, float]]] = []
    for k in roots:
        hits = [c for c in clusters if any(_same_root(eps1, eps2, k, r, floor, merge) for r in c)]
        merged = [k] + [r for c in hits for r in c]
        clusters = [c for c in clusters if c not in hits] + [merged]

    points = []
    for members in clusters:
        ranked = []
        for k in members:
            h = lieb_hamiltonian(LiebParams(eps1, eps2, *k))
            rank = numerical_rank(h, tol.rank_rtol * tol.scale(h) + tol.rank_atol)
            ranked.append((rank, abs(complex(_eps0_sq_vec(eps1, eps2, *k))), k))
        _, _, k = min(ranked)
        h = lieb_hamiltonian(LiebParams(eps1, eps2, *k))
        residual = degeneracy_check(h, tol).residual
        points.append(DegeneracyPoint(k[0], k[1], classify_point(k, eps1, eps2, tol), residual))
    points.sort(key=lambda p: (p.kx, p.ky))
    return points


def analytic_points(eps1: float, eps2: float) -> list[tuple[float, float]]:
    """Closed-form candidate zeros of ``eps0**2`` (diagonal and antidiagonal pairs).

    On ``kx = ky = k`` the imaginary part vanishes and the real part gives
    ``cos k = -1 + eps1*eps2/2``. On ``kx = -ky`` it reduces to
    ``cos k - (eps1 - eps2)/2 * sin k = -1 + eps1*eps2/2`` (in ``k = kx``).
    Points may repeat when pairs coalesce.
    """
    out: list[tuple[float, float]] = []
    c1 = -1 + eps1 * eps2 / 2
    if -1 <= c1 <= 1:
        k0 = math.acos(c1)
        out += [(k0, k0), (-k0, -k0)]
    r = math.hypot(1.0, (eps1 - eps2) / 2)
    c2 = c1 / r
    if -1 <= c2 <= 1:
        phi = math.atan2((eps1 - eps2) / 2, 1.0)
        for s in (1, -1):
            k = -phi + s * math.acos(c2)
            out.append((k, -k))
    return [(_wrap(x), _wrap(y)) for x, y in out]


def parse_range(text: str) -> np.ndarray:
    """``"A:B:N"`` -> ``N`` evenly spaced values from ``A`` to ``B``."""
    try:
        lo, hi, num = text.split(":")
        lo_f, hi_f, num_i = float(lo), float(hi), int(num)
    except ValueError as exc:
        raise ArgumentError(f"expected A:B:N, got {text!r}") from exc
    if num_i < 1 or not (math.isfinite(lo_f) and math.isfinite(hi_f)):
        raise ArgumentError(f"invalid range {text!r}")
    return np.linspace(lo_f, hi_f, num_i)


def scan(eps1_values: Iterable[float], eps2_values: Iterable[float], grid: int = 256,
         tol: Tolerances = DEFAULT_TOL) -> list[dict]:
    """Degeneracies for every ``(eps1, eps2)`` cell, one row per point.

    Cells without degeneracies produce a single row with empty point fields.
    """
    rows = []
    for e1 in eps1_values:
        for e2 in eps2_values:
            e1f, e2f = float(e1), float(e2)
            points = find_degeneracies(e1f, e2f, tol, grid)
            if not points:
                rows.append({"eps1": e1f, "eps2": e2f, "kx": "", "ky": "", "type": "", "residual": ""})
            for p in points:
                rows.append({"eps1": e1f, "eps2": e2f, "kx": p.kx, "ky": p.ky,
                             "type": str(p.partition), "residual": p.residual})
    return rows


def scan_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["eps1", "eps2", "kx", "ky", "type", "residual"],
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()
