"""Quantum maps as superoperators and the physical dilations that produce them.

Vectorization is column stacking throughout: ``vec(X) = X.flatten(order="F")``,
so that ``vec(A X B) = (B^T kron A) vec(X)``. A superoperator is the
``d^2 x d^2`` matrix acting on these vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .config import NORM_ATOL, PURIFY_CUTOFF, RANK_TOL
from .tensor import (
    Subspace,
    TensorSpace,
    dag,
    fix_phase,
    is_hermitian,
    is_unitary,
    kron,
    matexp,
    orthonormalize,
    partial_trace,
)

KINDS = (
    "time_independent_hamiltonian",
    "time_dependent_hamiltonian",
    "explicit_unitary_family",
    "fixed_unitary",
)


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).flatten(order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


def commutation_matrix(d: int) -> np.ndarray:
    """Permutation with ``K vec(X) = vec(X^T)``."""
    k = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            k[j + i * d, i + j * d] = 1.0
    return k


def superop_from_conjugation(a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """Superoperator of ``X -> a X b`` (``b`` defaults to ``a^dag``)."""
    b = dag(a) if b is None else b
    return np.kron(np.asarray(b).T, np.asarray(a))


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map on ``d x d`` matrices in the column-stacking convention."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.dim**2, self.dim**2):
            raise ValueError(f"superoperator of a {self.dim}-level system must be {self.dim**2}x{self.dim**2}")
        object.__setattr__(self, "matrix", m)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.dim, self.matrix @ other.matrix)

    def power(self, n: int) -> "Superoperator":
        return Superoperator(self.dim, np.linalg.matrix_power(self.matrix, n))

    @classmethod
    def identity(cls, d: int) -> "Superoperator":
        return cls(d, np.eye(d * d, dtype=complex))

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], d: int) -> "Superoperator":
        cols = []
        for k in range(d * d):
            e = np.zeros(d * d, dtype=complex)
            e[k] = 1.0
            cols.append(vec(fn(unvec(e, d))))
        return cls(d, np.column_stack(cols))

    def choi(self) -> np.ndarray:
        """``sum_ij E_ij kron phi(E_ij)``."""
        d = self.dim
        out = np.zeros((d * d, d * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                e = np.zeros((d, d), dtype=complex)
                e[i, j] = 1.0
                out += np.kron(e, self(e))
        return out

    def dual(self) -> "Superoperator":
        """Heisenberg-picture map, ``Tr[phi(rho) A] = Tr[rho phi^dag(A)]``."""
        k = commutation_matrix(self.dim)
        return Superoperator(self.dim, k @ self.matrix.T @ k)

    def trace_error(self) -> float:
        """Largest trace defect ``|Tr phi(E_ij) - delta_ij|`` over matrix units."""
        d = self.dim
        tr_row = vec(np.eye(d)).conj() @ self.matrix
        return float(np.max(np.abs(tr_row - vec(np.eye(d)).conj())))

    def min_choi_eigenvalue(self) -> float:
        c = self.choi()
        return float(np.linalg.eigvalsh(0.5 * (c + dag(c)))[0])

    def distance(self, other: "Superoperator") -> float:
        return float(np.linalg.norm(self.matrix - other.matrix))


def dual_apply(s: Superoperator, a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.shape != (s.dim, s.dim):
        raise ValueError(f"observable shape {a.shape} does not match map dimension {s.dim}")
    return s.dual()(a)


@dataclass(frozen=True, eq=False)
class UnitaryFamily:
    """Time-parametrized unitary on the system+environment space.

    Exactly one payload is set. ``form`` is one of ``generator``
    (``U(t) = exp(-i H t)``), ``generator_fn`` (time-ordered product of
    ``exp(-i H(s) ds)`` over ``steps`` midpoint slices), ``function`` (any
    callable ``t -> U``), ``table`` (exact only at stored times) or
    ``constant``.
    """

    form: str
    generator: np.ndarray | None = field(default=None, repr=False)
    generator_fn: Callable[[float], np.ndarray] | None = field(default=None, repr=False)
    function: Callable[[float], np.ndarray] | None = field(default=None, repr=False)
    table: tuple[tuple[float, np.ndarray], ...] = field(default=(), repr=False)
    unitary: np.ndarray | None = field(default=None, repr=False)
    steps: int = 400

    @classmethod
    def from_generator(cls, h: np.ndarray) -> "UnitaryFamily":
        h = np.asarray(h, dtype=complex)
        if not is_hermitian(h):
            raise ValueError("generator must be Hermitian")
        return cls("generator", generator=h)

    @classmethod
    def from_generator_fn(cls, fn: Callable[[float], np.ndarray], steps: int = 400) -> "UnitaryFamily":
        return cls("generator_fn", generator_fn=fn, steps=steps)

    @classmethod
    def from_function(cls, fn: Callable[[float], np.ndarray]) -> "UnitaryFamily":
        return cls("function", function=fn)

    @classmethod
    def from_table(cls, times: Sequence[float], unitaries: Sequence[np.ndarray]) -> "UnitaryFamily":
        if len(times) != len(unitaries):
            raise ValueError("times and unitaries differ in length")
        pairs = []
        for t, u in zip(times, unitaries):
            u = np.asarray(u, dtype=complex)
            if not is_unitary(u):
                raise ValueError(f"table entry at t={t} is not unitary")
            pairs.append((float(t), u))
        return cls("table", table=tuple(pairs))

    @classmethod
    def constant(cls, u: np.ndarray) -> "UnitaryFamily":
        u = np.asarray(u, dtype=complex)
        if not is_unitary(u):
            raise ValueError("constant evolution must be unitary")
        return cls("constant", unitary=u)

    @property
    def kind(self) -> str:
        return {
            "generator": "time_independent_hamiltonian",
            "generator_fn": "time_dependent_hamiltonian",
            "function": "explicit_unitary_family",
            "table": "explicit_unitary_family",
            "constant": "fixed_unitary",
        }[self.form]

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.table])

    def at(self, t: float) -> np.ndarray:
        if self.form == "generator":
            return matexp(self.generator, -1j * t, hermitian=True)
        if self.form == "constant":
            return self.unitary
        if self.form == "function":
            return np.asarray(self.function(t), dtype=complex)
        if self.form == "table":
            for ts, u in self.table:
                if ts == t or abs(ts - t) <= 1e-12 * max(1.0, abs(t)):
                    return u
            raise ValueError(f"time {t} is not a tabulated sample")
        if self.form == "generator_fn":
            ds = t / self.steps
            u = None
            for k in range(self.steps):
                step = matexp(self.generator_fn((k + 0.5) * ds), -1j * ds, hermitian=True)
                u = step if u is None else step @ u
            return u
        raise ValueError(f"unknown family form {self.form!r}")

    def tensor_identity(self, d: int) -> "UnitaryFamily":
        """The same family acting as ``U kron I_d`` (used when appending an ancilla)."""
        eye = np.eye(d)
        if self.form == "generator":
            return UnitaryFamily.from_generator(kron(self.generator, eye))
        if self.form == "constant":
            return UnitaryFamily.constant(kron(self.unitary, eye))
        if self.form == "table":
            return UnitaryFamily.from_table(self.times, [kron(u, eye) for _, u in self.table])
        if self.form == "generator_fn":
            fn = self.generator_fn
            return UnitaryFamily.from_generator_fn(lambda s: kron(fn(s), eye), self.steps)
        fn = self.function
        return UnitaryFamily.from_function(lambda t: kron(fn(t), eye))


@dataclass(frozen=True, eq=False)
class StinespringIsometry:
    v: np.ndarray = field(repr=False)
    dims: tuple[int, int]

    def __post_init__(self):
        v = np.asarray(self.v, dtype=complex)
        d_s, d_e = self.dims
        if v.shape != (d_s * d_e, d_s):
            raise ValueError(f"isometry shape {v.shape} inconsistent with dims {self.dims}")
        object.__setattr__(self, "v", v)

    def isometry_error(self) -> float:
        d_s = self.dims[0]
        return float(np.max(np.abs(dag(self.v) @ self.v - np.eye(d_s))))

    def superoperator(self) -> Superoperator:
        d_s, d_e = self.dims
        return Superoperator.from_function(
            lambda rho: partial_trace(self.v @ rho @ dag(self.v), (d_s, d_e), [0]), d_s
        )

    def env_factors(self) -> np.ndarray:
        """Rows ``<s| V |j>`` as environment vectors, shape ``(d_s * d_s, d_e)``."""
        d_s, d_e = self.dims
        # V[(s, e), j] -> [j, s, e]
        return self.v.reshape(d_s, d_e, d_s).transpose(2, 0, 1).reshape(d_s * d_s, d_e)


@dataclass(frozen=True, eq=False)
class Dilation:
    """Physical dilation ``(H_S kron H_E, U(t), rho_E)``.

    ``dims`` lists the system factor first; every later factor belongs to the
    environment (a purified dilation has ``(d_S, d_E, d_C)``). ``env_state``
    is a vector for pure states and a density matrix otherwise.
    ``env_embedding`` is set on minimalized dilations and maps the reduced
    environment into the original one.
    """

    dims: tuple[int, ...]
    env_state: np.ndarray = field(repr=False)
    evolution: UnitaryFamily
    name: str = ""
    env_embedding: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2:
            raise ValueError("a dilation needs a system and at least one environment factor")
        object.__setattr__(self, "dims", dims)
        state = np.asarray(self.env_state, dtype=complex)
        d_e = int(np.prod(dims[1:]))
        if state.ndim == 1:
            if state.size != d_e:
                raise ValueError(f"environment vector has dim {state.size}, expected {d_e}")
            if abs(np.linalg.norm(state) - 1) > NORM_ATOL:
                raise ValueError("environment vector must be normalized")
        elif state.shape == (d_e, d_e):
            if abs(np.trace(state) - 1) > NORM_ATOL or not is_hermitian(state, 1e-10):
                raise ValueError("environment density matrix must be Hermitian with unit trace")
        else:
            raise ValueError(f"environment state shape {state.shape} incompatible with dims {dims}")
        object.__setattr__(self, "env_state", state)

    @property
    def space(self) -> TensorSpace:
        return TensorSpace(self.dims)

    @property
    def d_s(self) -> int:
        return self.dims[0]

    @property
    def d_e(self) -> int:
        return int(np.prod(self.dims[1:]))

    @property
    def kind(self) -> str:
        return self.evolution.kind

    @property
    def is_pure(self) -> bool:
        return self.env_state.ndim == 1

    @property
    def psi_e(self) -> np.ndarray:
        if not self.is_pure:
            raise ValueError("environment state is mixed; purify the dilation first")
        return self.env_state

    @property
    def rho_e(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.env_state, self.env_state.conj())
        return self.env_state

    def unitary(self, t: float) -> np.ndarray:
        return self.evolution.at(t)

    def evolve(self, rho_s: np.ndarray, t: float) -> np.ndarray:
        """``Tr_E[U(t) rho_S kron rho_E U(t)^dag]`` evaluated directly."""
        u = self.unitary(t)
        return partial_trace(u @ kron(rho_s, self.rho_e) @ dag(u), (self.d_s, self.d_e), [0])


def map_from_dilation(d: Dilation, t: float = 0.0) -> Superoperator:
    """Superoperator induced by the dilation at time ``t``."""
    u = d.unitary(t)
    rho_e = d.rho_e
    ds, de = d.d_s, d.d_e
    cols = np.empty((ds * ds, ds * ds), dtype=complex)
    for j in range(ds):
        for i in range(ds):
            e = np.zeros((ds, ds), dtype=complex)
            e[i, j] = 1.0
            out = partial_trace(u @ kron(e, rho_e) @ dag(u), (ds, de), [0])
            cols[:, i + j * ds] = vec(out)
    return Superoperator(ds, cols)


def isometry_from_dilation(d: Dilation, t: float = 0.0) -> StinespringIsometry:
    """``V|phi> = U(t) |phi> kron |psi_E>``."""
    if not d.is_pure:
        raise ValueError("isometry needs a pure environment state; purify first")
    embed = kron(np.eye(d.d_s), d.psi_e.reshape(-1, 1))
    return StinespringIsometry(d.unitary(t) @ embed, (d.d_s, d.d_e))


@dataclass(frozen=True, eq=False)
class MinimalityReport:
    minimal: bool
    support: Subspace
    per_time_dims: tuple[int, ...]
    times: tuple[float, ...]

    @property
    def support_dim(self) -> int:
        return self.support.rank


def environment_support(d: Dilation, times: Sequence[float], tol: float = RANK_TOL) -> MinimalityReport:
    """Span of the environment factors of ``V(t)|j>`` over the sampled times.

    ``span{(A kron I) w}`` over all system operators ``A`` is
    ``H_S kron supp_E(w)``, so minimality reduces to the environment support
    reaching full dimension.
    """
    times = list(times)
    if not times:
        raise ValueError("need at least one time sample")
    env_space = TensorSpace((d.d_e,))
    rows = []
    per_t = []
    for t in times:
        f = isometry_from_dilation(d, t).env_factors()
        per_t.append(orthonormalize(list(f), env_space, tol).rank)
        rows.extend(f)
    support = orthonormalize(rows, env_space, tol)
    # a dilation may lose minimality on isolated times (t = 0 in particular)
    nonzero = [dim for t, dim in zip(times, per_t) if t != 0]
    reached = max(nonzero) if nonzero else max(per_t)
    return MinimalityReport(reached == d.d_e, support, tuple(per_t), tuple(float(t) for t in times))


def is_minimal(d: Dilation, times: Sequence[float], tol: float = RANK_TOL) -> tuple[bool, Subspace]:
    rep = environment_support(d, times, tol)
    return rep.minimal, rep.support


def complete_unitary(v: np.ndarray, d_s: int, d_e: int) -> np.ndarray:
    """Unitary whose columns ``(j, 0)`` are the columns of the isometry ``v``."""
    n = d_s * d_e
    u = np.zeros((n, n), dtype=complex)
    rest = scipy.linalg.null_space(dag(v))
    k = 0
    for j in range(d_s):
        u[:, j * d_e] = v[:, j]
    for j in range(d_s):
        for e in range(1, d_e):
            u[:, j * d_e + e] = fix_phase(rest[:, k])
            k += 1
    return u


def minimalize(d: Dilation, times: Sequence[float], tol: float = RANK_TOL) -> Dilation:
    """Restrict the environment to the support reached by the dilation.

    Hamiltonian dilations keep the compressed generator. Other kinds are
    rebuilt from the restricted isometry with a unitary completion. If the
    environment state has no overlap with the support, the first support
    vector stands in for it; the induced map is unchanged either way because
    only the isometry enters it.
    """
    if not d.is_pure:
        raise ValueError("minimalize needs a pure environment state; purify first")
    rep = environment_support(d, times, tol)
    if rep.support_dim == d.d_e:
        return d
    env_space = TensorSpace((d.d_e,))
    psi = d.psi_e
    inside = rep.support.contains(psi, tol=1e-8)
    if inside:
        q = orthonormalize([psi] + rep.support.vectors(), env_space, 1e-8).basis
    else:
        q = rep.support.basis
    r = q.shape[1]
    big_q = kron(np.eye(d.d_s), q)
    new_psi = dag(q) @ psi if inside else np.eye(r, dtype=complex)[0]
    new_psi = new_psi / np.linalg.norm(new_psi)
    dims = (d.d_s, r)
    name = f"{d.name} (minimal)" if d.name else "minimal"
    embedding = q if d.env_embedding is None else d.env_embedding @ q

    if d.evolution.form == "generator":
        h = dag(big_q) @ d.evolution.generator @ big_q
        fam = UnitaryFamily.from_generator(0.5 * (h + dag(h)))
        return Dilation(dims, new_psi, fam, name, embedding)

    def restricted(t: float) -> np.ndarray:
        v = dag(big_q) @ isometry_from_dilation(d, t).v
        return complete_unitary(v, d.d_s, r)

    if d.evolution.form == "constant":
        fam = UnitaryFamily.constant(restricted(0.0))
    elif d.evolution.form == "table":
        fam = UnitaryFamily.from_table(d.evolution.times, [restricted(t) for t in d.evolution.times])
    else:
        fam = UnitaryFamily.from_function(restricted)
    # the completion places V|j> on column (j, 0), so the reduced state is e_0
    return Dilation(dims, np.eye(r, dtype=complex)[0], fam, name, embedding)


def purify(d: Dilation, cutoff: float = PURIFY_CUTOFF, ancilla_order: str = "aligned") -> Dilation:
    """Replace a mixed environment state by a purification on ``H_E kron H_C``.

    ``|Psi> = sum_i sqrt(p_i) |e_i> |c_i>`` over eigenvalues above ``cutoff``
    (relative to the largest). ``ancilla_order="descending"`` labels ancilla
    states by decreasing weight; ``"aligned"`` labels each eigenvector by the
    environment basis index of its largest component, which reproduces the
    textbook labelling for diagonal states.
    """
    if d.is_pure:
        rho = d.rho_e
    else:
        rho = d.env_state
    w, v = np.linalg.eigh(0.5 * (rho + dag(rho)))
    if w[0] < -1e-10:
        raise ValueError(f"environment state is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    keep = w > cutoff * w[0]
    w, v = w[keep], v[:, keep]
    # degenerate eigenspaces: re-span under the phase convention
    vecs = []
    i = 0
    while i < len(w):
        k = i
        while k + 1 < len(w) and abs(w[k + 1] - w[i]) <= 1e-12 * max(1.0, w[0]):
            k += 1
        block = v[:, i:k + 1]
        if k > i:
            p = block @ dag(block)
            block = orthonormalize(list(p.T), d.d_e, 1e-8).basis
        vecs.extend(fix_phase(block[:, c]) for c in range(block.shape[1]))
        i = k + 1
    if ancilla_order == "aligned":
        keys = [int(np.argmax(np.abs(e) > 0.5 * np.max(np.abs(e)))) for e in vecs]
        perm = np.argsort(keys, kind="stable")
        w = w[perm]
        vecs = [vecs[p] for p in perm]
    elif ancilla_order != "descending":
        raise ValueError(f"unknown ancilla order {ancilla_order!r}")
    r = len(w)
    psi = np.zeros(d.d_e * r, dtype=complex)
    for c, (p, e) in enumerate(zip(w, vecs)):
        psi += np.sqrt(p) * kron(e, np.eye(r)[c])
    psi /= np.linalg.norm(psi)
    name = f"{d.name} (purified)" if d.name else "purified"
    return Dilation(d.dims + (r,), psi, d.evolution.tensor_identity(r), name)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ dag(g)
    return rho / np.trace(rho)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g + dag(g))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)
