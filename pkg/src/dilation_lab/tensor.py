"""Dense complex linear algebra shared by every other module.

Matrices are plain ``numpy`` complex arrays. Vectors are 1-D arrays. Composite
Hilbert spaces are ordered explicitly by a :class:`TensorSpace`, and the
computational basis index of ``|i_0 i_1 ... i_k>`` is the row-major index over
``factor_dims`` (first factor outermost, as in ``numpy.kron``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .config import HERMITIAN_RTOL, RANK_TOL, UNITARY_ATOL

__all__ = [
    "TensorSpace",
    "Subspace",
    "kron",
    "partial_trace",
    "matexp",
    "orthonormalize",
    "restrict",
    "is_hermitian",
    "is_unitary",
    "basis_vector",
    "dag",
    "fix_phase",
]


def dag(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    return float(np.max(np.abs(a - dag(a)), initial=0.0)) <= rtol * scale


def is_unitary(a: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return float(np.max(np.abs(dag(a) @ a - np.eye(a.shape[0])), initial=0.0)) <= atol


@dataclass(frozen=True)
class TensorSpace:
    """Ordered tensor product of finite-dimensional factors."""

    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid factor dims {self.factor_dims!r}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    def __len__(self) -> int:
        return len(self.factor_dims)

    def index(self, *labels: int) -> int:
        """Row-major index of the product basis state ``|labels>``."""
        if len(labels) != len(self.factor_dims):
            raise ValueError("one label per factor required")
        return int(np.ravel_multi_index(labels, self.factor_dims))

    def ket(self, *labels: int) -> np.ndarray:
        return basis_vector(self.dim, self.index(*labels))


def basis_vector(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


def kron(*mats: np.ndarray) -> np.ndarray:
    """Tensor product with the first argument's indices outermost."""
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def partial_trace(m: np.ndarray, space: TensorSpace | Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every factor of ``space`` not listed in ``keep``.

    Kept factors stay in their original order. Keeping nothing returns the
    1x1 matrix ``[[Tr m]]``.
    """
    if not isinstance(space, TensorSpace):
        space = TensorSpace(tuple(space))
    m = np.asarray(m)
    dims = space.factor_dims
    if m.shape != (space.dim, space.dim):
        raise ValueError(f"matrix shape {m.shape} does not match space dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise ValueError("too many tensor factors")
    rows = list(letters[:n])
    cols = [rows[i] if i not in keep else letters[n + i] for i in range(n)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    t = m.reshape(dims + dims)
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(d, d)


def matexp(a: np.ndarray, scale: complex = 1.0, hermitian: bool | None = None) -> np.ndarray:
    """Return ``exp(scale * a)``.

    Hermitian input goes through an eigendecomposition so that purely
    imaginary ``scale`` yields a unitary to roundoff; anything else uses
    scaling-and-squaring with a degree-13 Pade approximant.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matexp needs a square matrix, got shape {a.shape}")
    if scale == 0:
        return np.eye(a.shape[0], dtype=complex)
    if hermitian is None:
        hermitian = is_hermitian(a)
    if hermitian:
        w, v = np.linalg.eigh(0.5 * (a + dag(a)))
        return (v * np.exp(scale * w)) @ dag(v)
    return scipy.linalg.expm(scale * a)


def fix_phase(v: np.ndarray, threshold: float = 1e-10) -> np.ndarray:
    """Rotate ``v`` so its first non-negligible component is real and positive."""
    idx = np.flatnonzero(np.abs(v) > threshold)
    if idx.size == 0:
        return v
    c = v[idx[0]]
    return v * (abs(c) / c)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal basis (stored as columns) of a subspace of ``ambient``."""

    ambient: TensorSpace
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        if b.size == 0:
            b = np.zeros((self.ambient.dim, 0), dtype=complex)
        if b.shape[0] != self.ambient.dim:
            raise ValueError(f"basis rows {b.shape[0]} != ambient dim {self.ambient.dim}")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.ambient.dim

    @cached_property
    def projector(self) -> np.ndarray:
        p = self.basis @ dag(self.basis)
        p.setflags(write=False)
        return p

    def vectors(self) -> list[np.ndarray]:
        return [self.basis[:, k] for k in range(self.rank)]

    def complement(self, tol: float = RANK_TOL) -> "Subspace":
        """Orthogonal complement, spanned under the same phase convention."""
        q = np.eye(self.dim) - self.projector
        return orthonormalize(list(q.T), self.ambient, tol=max(tol, 1e-8))

    def contains(self, v: np.ndarray, tol: float = 1e-10) -> bool:
        v = np.asarray(v)
        return float(np.linalg.norm(v - self.projector @ v)) <= tol * max(1.0, float(np.linalg.norm(v)))

    def distance(self, other: "Subspace") -> float:
        """Frobenius distance between the two projectors."""
        return float(np.linalg.norm(self.projector - other.projector))

    @classmethod
    def full(cls, space: TensorSpace) -> "Subspace":
        return cls(space, np.eye(space.dim, dtype=complex))

    @classmethod
    def span(cls, vectors: Sequence[np.ndarray], space: TensorSpace, tol: float = RANK_TOL) -> "Subspace":
        return orthonormalize(vectors, space, tol)


def orthonormalize(vectors: Sequence[np.ndarray], space: TensorSpace | int | None = None,
                   tol: float = RANK_TOL) -> Subspace:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    A vector is dropped when its residual after projection falls below
    ``tol`` times the largest input norm. Kept vectors follow the phase
    convention of :func:`fix_phase`.
    """
    vecs = [np.asarray(v, dtype=complex).ravel() for v in vectors]
    if space is None:
        if not vecs:
            raise ValueError("cannot infer ambient space from an empty vector list")
        space = TensorSpace((vecs[0].size,))
    elif isinstance(space, (int, np.integer)):
        space = TensorSpace((int(space),))
    if not vecs:
        return Subspace(space, np.zeros((space.dim, 0), dtype=complex))
    if any(v.size != space.dim for v in vecs):
        raise ValueError("all vectors must share the ambient dimension")
    scale = max(float(np.linalg.norm(v)) for v in vecs)
    cutoff = tol * scale
    basis: list[np.ndarray] = []
    for v in vecs:
        w = v.copy()
        for _ in range(2):
            for q in basis:
                w = w - np.vdot(q, w) * q
        nrm = float(np.linalg.norm(w))
        if nrm <= cutoff or nrm == 0.0:
            continue
        basis.append(fix_phase(w / nrm))
    mat = np.column_stack(basis) if basis else np.zeros((space.dim, 0), dtype=complex)
    return Subspace(space, mat)


def restrict(m: np.ndarray, sub: Subspace) -> np.ndarray:
    """Matrix of ``m`` compressed onto ``sub``: ``B^dag m B``."""
    m = np.asarray(m)
    if m.shape != (sub.dim, sub.dim):
        raise ValueError(f"matrix shape {m.shape} does not match subspace ambient dim {sub.dim}")
    return dag(sub.basis) @ m @ sub.basis
