"""Krylov subspaces and the subspaces explored by the dilated dynamics."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import RANK_TOL
from .maps import UnitaryFamily
from .tensor import Subspace, TensorSpace, kron, orthonormalize


@dataclass(frozen=True, eq=False)
class KrylovResult:
    """A (sum of) Krylov subspace(s) plus the chain length reached per seed.

    ``order_cap`` is ``"maximal"`` when every chain ran until linear
    dependence, else the number of vectors ``{v, Av, ..., A^(k-1) v}``
    allowed per seed.
    """

    subspace: Subspace
    seed_dims: tuple[tuple[str, int], ...]
    order_cap: str | int = "maximal"
    stabilized: bool = True
    rank_evidence: tuple[int, ...] = field(default=())

    @property
    def rank(self) -> int:
        return self.subspace.rank

    @property
    def perp_rank(self) -> int:
        return self.subspace.dim - self.subspace.rank

    @property
    def projector(self) -> np.ndarray:
        return self.subspace.projector


def _chain(a: np.ndarray, v: np.ndarray, max_order: int | None, tol: float) -> list[np.ndarray]:
    """Orthonormal Arnoldi chain of ``K_r(a, v)``, stopped at dependence or ``max_order``."""
    q = [v / np.linalg.norm(v)]
    while max_order is None or len(q) < max_order:
        w = a @ q[-1]
        scale = max(float(np.linalg.norm(w)), 1.0)
        for _ in range(2):
            for b in q:
                w = w - np.vdot(b, w) * b
        nrm = float(np.linalg.norm(w))
        if nrm < tol * scale or len(q) == v.size:
            break
        q.append(w / nrm)
    return q


def krylov_basis(a: np.ndarray, v: np.ndarray, max_order: int | None = None,
                 space: TensorSpace | None = None, tol: float = RANK_TOL,
                 label: str = "v") -> KrylovResult:
    """``K_r(a, v) = span{v, a v, a^2 v, ...}`` up to its Krylov dimension."""
    a = np.asarray(a, dtype=complex)
    v = np.asarray(v, dtype=complex).ravel()
    if a.shape != (v.size, v.size):
        raise ValueError(f"matrix shape {a.shape} does not match vector of length {v.size}")
    if np.linalg.norm(v) == 0:
        raise ValueError("Krylov seed must be nonzero")
    if max_order is not None and max_order < 1:
        raise ValueError("max_order must be at least 1")
    space = space or TensorSpace((v.size,))
    q = _chain(a, v, max_order, tol)
    sub = orthonormalize(q, space, tol)
    cap = "maximal" if max_order is None else max_order
    return KrylovResult(sub, ((label, len(q)),), cap)


def system_seeds(psi_e: np.ndarray, space: TensorSpace,
                 sys_basis: np.ndarray | None = None) -> list[tuple[str, np.ndarray]]:
    d_s = space.factor_dims[0]
    basis = np.eye(d_s, dtype=complex) if sys_basis is None else np.asarray(sys_basis, dtype=complex)
    psi_e = np.asarray(psi_e, dtype=complex).ravel()
    if psi_e.size * d_s != space.dim:
        raise ValueError("environment state does not fit the tensor space")
    return [(f"|{j}_S>", kron(basis[:, j], psi_e)) for j in range(basis.shape[1])]


def krylov_sum(h: np.ndarray, psi_e: np.ndarray, space: TensorSpace, max_order: int | None = None,
               tol: float = RANK_TOL, sys_basis: np.ndarray | None = None) -> KrylovResult:
    """Sum over system basis seeds ``|j> kron |psi_E>`` of Krylov subspaces of ``h``."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (space.dim, space.dim):
        raise ValueError(f"operator shape {h.shape} does not match space dim {space.dim}")
    vectors: list[np.ndarray] = []
    dims = []
    for label, seed in system_seeds(psi_e, space, sys_basis):
        chain = _chain(h, seed, max_order, tol)
        dims.append((label, len(chain)))
        vectors.extend(chain)
    sub = orthonormalize(vectors, space, tol)
    return KrylovResult(sub, tuple(dims), "maximal" if max_order is None else max_order)


def k_parallel(h: np.ndarray, psi_e: np.ndarray, space: TensorSpace, tol: float = RANK_TOL,
               sys_basis: np.ndarray | None = None) -> KrylovResult:
    """Subspace explored by ``exp(-i h t)`` from ``H_S kron |psi_E>``: maximal Krylov chains."""
    return krylov_sum(h, psi_e, space, None, tol, sys_basis)


def k_parallel_order2(h: np.ndarray, psi_e: np.ndarray, space: TensorSpace, tol: float = RANK_TOL,
                      sys_basis: np.ndarray | None = None) -> KrylovResult:
    """Short-time collision variant keeping ``{v, h v, h^2 v}`` per seed.

    A second-order expansion of ``exp(-i h dt)`` reaches ``h^2 |seed>``, so
    each chain is capped at three vectors.
    """
    return krylov_sum(h, psi_e, space, 3, tol, sys_basis)


def sigma_parallel_sampled(family: UnitaryFamily, psi_e: np.ndarray, space: TensorSpace,
                           times: Sequence[float], tol: float = RANK_TOL) -> KrylovResult:
    """Span of ``U(t) |j> kron |psi_E>`` over sampled times.

    The rank is recomputed on every other sample; ``stabilized`` records
    whether doubling the sample count left it unchanged. Table families can
    only be sampled at their stored times.
    """
    times = [float(t) for t in times]
    if not times:
        raise ValueError("need at least one time sample")
    seeds = system_seeds(psi_e, space)
    vectors = {t: [family.at(t) @ s for _, s in seeds] for t in times}
    full = orthonormalize([v for t in times for v in vectors[t]], space, tol)
    half = orthonormalize([v for t in times[::2] for v in vectors[t]], space, tol)
    stabilized = half.rank == full.rank
    return KrylovResult(full, tuple((label, len(times)) for label, _ in seeds), "sampled",
                        stabilized, (half.rank, full.rank))
