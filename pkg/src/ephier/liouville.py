"""Vectorized Lindblad generators and the effective dissipative qubit and qutrit.

Density matrices are vectorized row-major, ``|m><n| -> |m> (x) |n*>``, so a
superoperator ``rho -> A rho B`` becomes ``kron(A, B.T)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import ArgumentError
from .matrixcore import as_matrix, matrix_from_json, matrix_to_json
from .partitions import Partition

__all__ = [
    "LindbladModel",
    "effective_nh_hamiltonian",
    "vectorize_liouvillian",
    "no_jump_liouvillian",
    "predicted_partition",
    "parity_operator",
    "EffectiveModel",
    "effective_qubit",
    "effective_qutrit",
    "qutrit_ep_rates",
]


@dataclass
class LindbladModel:
    """Hamiltonian plus jump operators ``L_k`` with rates ``gamma_k >= 0``."""

    hamiltonian: np.ndarray
    jumps: list[tuple[float, np.ndarray]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.hamiltonian = as_matrix(self.hamiltonian)
        checked = []
        for gamma, op in self.jumps:
            op = as_matrix(op)
            if op.shape != self.hamiltonian.shape:
                raise ArgumentError("jump operator dimension differs from the Hamiltonian")
            if not gamma >= 0:
                raise ArgumentError(f"rates must be non-negative, got {gamma}")
            checked.append((float(gamma), op))
        self.jumps = checked

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def to_json(self) -> dict:
        return {
            "H": matrix_to_json(self.hamiltonian),
            "jumps": [{"gamma": g, "L": matrix_to_json(op)} for g, op in self.jumps],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LindbladModel":
        try:
            jumps = [(float(j["gamma"]), matrix_from_json(j["L"])) for j in obj.get("jumps", [])]
            return cls(matrix_from_json(obj["H"]), jumps)
        except (KeyError, TypeError) as exc:
            raise ArgumentError(f"malformed Lindblad model: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def effective_nh_hamiltonian(model: LindbladModel) -> np.ndarray:
    """``H - i/2 sum_k gamma_k L_k^H L_k``, so that ``-i(H_nh rho - rho H_nh^H)``
    carries the anticommutator part of the dissipator."""
    out = model.hamiltonian.copy()
    for gamma, op in model.jumps:
        out -= 0.5j * gamma * op.conj().T @ op
    return out


def no_jump_liouvillian(h_nh: Any) -> np.ndarray:
    """``(-i H_nh) (x) 1 + 1 (x) (i H_nh^*)``."""
    h_nh = as_matrix(h_nh)
    eye = np.eye(h_nh.shape[0])
    return np.kron(-1j * h_nh, eye) + np.kron(eye, 1j * h_nh.conj())


def vectorize_liouvillian(model: LindbladModel) -> np.ndarray:
    """Full Lindblad generator as an ``n**2 x n**2`` matrix, jump terms included."""
    out = no_jump_liouvillian(effective_nh_hamiltonian(model))
    for gamma, op in model.jumps:
        out += gamma * np.kron(op, op.conj())
    return out


def predicted_partition(n: int) -> Partition:
    """Jordan type of the no-jump generator when ``H_nh`` is a single ``n x n`` block."""
    if n < 1:
        raise ArgumentError(f"need n >= 1, got {n}")
    return Partition(tuple(range(2 * n - 1, 0, -2)))


def parity_operator(n: int) -> np.ndarray:
    """Swap of the two tensor factors: ``|m> (x) |n*>  ->  |n> (x) |m*>``."""
    if n < 1:
        raise ArgumentError(f"need n >= 1, got {n}")
    out = np.zeros((n * n, n * n), dtype=complex)
    for m in range(n):
        for k in range(n):
            out[k * n + m, m * n + k] = 1.0
    return out


@dataclass
class EffectiveModel:
    hamiltonian: np.ndarray
    liouvillian: np.ndarray
    at_ep: bool
    eigenvalue: float

    @property
    def parity(self) -> np.ndarray:
        return parity_operator(self.hamiltonian.shape[0])

    def __iter__(self):
        return iter((self.hamiltonian, self.liouvillian, self.at_ep))


def _close(a: float, b: float, rtol: float = 1e-12) -> bool:
    return math.isclose(a, b, rel_tol=rtol, abs_tol=rtol)


def effective_qubit(eps2: float, eps3: float, gamma2: float, gamma3: float, t: float) -> EffectiveModel:
    """Two excited levels with decay rates ``gamma2, gamma3`` and real coupling ``t``.

    The non-Hermitian Hamiltonian has a second-order EP when ``eps2 == eps3``
    and ``|gamma2 - gamma3| == 4|t|`` with ``t != 0``; the no-jump generator
    is then degenerate at ``-(gamma2 + gamma3)/2``.
    """
    h = np.array(
        [[eps2 - 0.5j * gamma2, t], [t, eps3 - 0.5j * gamma3]],
        dtype=complex,
    )
    at_ep = t != 0 and _close(eps2, eps3) and _close(abs(gamma2 - gamma3), 4 * abs(t))
    return EffectiveModel(h, no_jump_liouvillian(h), at_ep, -(gamma2 + gamma3) / 2)


def qutrit_ep_rates(gamma3: float, t: float, branch: int = 1) -> tuple[float, float]:
    """``(gamma2, gamma4)`` with ``2 gamma3 = gamma2 + gamma4`` and ``gamma2 - gamma4 = +-4 sqrt(2) t``."""
    if branch not in (1, -1):
        raise ArgumentError(f"branch must be +1 or -1, got {branch}")
    shift = 2 * math.sqrt(2) * t * branch
    return gamma3 + shift, gamma3 - shift


def effective_qutrit(eps: float, gamma2: float, gamma3: float, gamma4: float, t: float) -> EffectiveModel:
    """Three excited levels in a chain (``t23 = t34 = t``, ``t24 = 0``), equal energies.

    At ``2 gamma3 = gamma2 + gamma4`` and ``|gamma2 - gamma4| = 4 sqrt(2) |t|``
    the Hamiltonian is a single 3x3 Jordan block and the no-jump generator is
    degenerate at ``-gamma3``.
    """
    h = np.array(
        [
            [eps - 0.5j * gamma2, t, 0],
            [t, eps - 0.5j * gamma3, t],
            [0, t, eps - 0.5j * gamma4],
        ],
        dtype=complex,
    )
    at_ep = (
        t != 0
        and _close(2 * gamma3, gamma2 + gamma4)
        and _close(abs(gamma2 - gamma4), 4 * math.sqrt(2) * abs(t))
    )
    return EffectiveModel(h, no_jump_liouvillian(h), at_ep, -gamma3)
