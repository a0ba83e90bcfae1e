"""Standard operators used by the scenarios: ladders, number operators, spin matrices."""
from __future__ import annotations

import numpy as np


def sigma_plus() -> np.ndarray:
    """Raising operator ``|1><0|`` on a qubit."""
    return np.array([[0, 0], [1, 0]], dtype=complex)


def sigma_minus() -> np.ndarray:
    return np.array([[0, 1], [0, 0]], dtype=complex)


def sigma_x() -> np.ndarray:
    return np.array([[0, 1], [1, 0]], dtype=complex)


def number(d: int) -> np.ndarray:
    return np.diag(np.arange(d)).astype(complex)


def projector(d: int, i: int) -> np.ndarray:
    p = np.zeros((d, d), dtype=complex)
    p[i, i] = 1.0
    return p


def annihilation(d: int) -> np.ndarray:
    """Truncated bosonic lowering operator, ``a|n> = sqrt(n)|n-1>``."""
    return np.diag(np.sqrt(np.arange(1, d)), k=1).astype(complex)


def spin_matrices(j: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-j matrices ``(Jx, Jy, Jz)`` in the basis ``m = j, j-1, ..., -j``."""
    n = int(round(2 * j)) + 1
    if n < 2 or abs((n - 1) / 2 - j) > 1e-12:
        raise ValueError(f"j must be a positive half-integer, got {j}")
    m = j - np.arange(n)
    jz = np.diag(m).astype(complex)
    # <m+1|J+|m> = sqrt(j(j+1) - m(m+1)); row m+1 sits one index above m
    jp = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)
    jm = jp.conj().T
    jx = 0.5 * (jp + jm)
    jy = -0.5j * (jp - jm)
    return jx, jy, jz


def adjoint_generators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """su(2) generators of the adjoint representation, ``(T_a)_{bc} = -i eps_{abc}``."""
    eps = np.zeros((3, 3, 3))
    for a, b, c in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[a, b, c] = 1.0
        eps[a, c, b] = -1.0
    return tuple(-1j * eps[a] for a in range(3))
