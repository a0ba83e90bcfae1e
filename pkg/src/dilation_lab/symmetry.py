"""Group representations, covariance of maps, and strong-symmetry certificates.

All residuals are Frobenius norms. Operators restricted to a subspace ``W``
are compared on ``W`` as their domain, i.e. through ``(X - Y) P_W``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from .config import CERT_TOL, RANK_TOL, default_g_samples
from .maps import Dilation, StinespringIsometry, Superoperator, UnitaryFamily, random_density
from .operators import spin_matrices
from .tensor import Subspace, dag, is_hermitian, is_unitary, kron, matexp

CERT_KINDS = (
    "weak_covariance",
    "invariant_env_state",
    "strong_on_subspace",
    "block_diagonal",
    "conserved_quantity",
    "intertwiner",
    "no_invariant_state",
)


@dataclass(frozen=True, eq=False)
class SymmetryRep:
    """Unitary representation given by generators, sampled elements, or both.

    One generator means a one-parameter group ``g -> exp(-i g J)``; several
    generators span a Lie algebra (as for SU(2)), in which case the sampled
    elements carry the group-level checks. Sampled elements always include
    the identity, labelled ``"e"``.
    """

    dim: int
    generators: tuple[np.ndarray, ...] = field(default=(), repr=False)
    elements: tuple[tuple[str, np.ndarray], ...] = field(default=(), repr=False)

    def __post_init__(self):
        gens = tuple(np.asarray(j, dtype=complex) for j in self.generators)
        for j in gens:
            if j.shape != (self.dim, self.dim) or not is_hermitian(j):
                raise ValueError("generators must be Hermitian and match the representation dim")
        els = tuple((str(label), np.asarray(u, dtype=complex)) for label, u in self.elements)
        for label, u in els:
            if u.shape != (self.dim, self.dim) or not is_unitary(u):
                raise ValueError(f"element {label!r} is not a unitary of dim {self.dim}")
        if els and "e" not in {label for label, _ in els}:
            els = (("e", np.eye(self.dim, dtype=complex)),) + els
        if not gens and not els:
            raise ValueError("a representation needs generators or sampled elements")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "elements", els)

    @property
    def form(self) -> str:
        if len(self.generators) == 1:
            return "generator"
        if self.generators:
            return "lie"
        return "sampled"

    @property
    def generator(self) -> np.ndarray:
        if self.form != "generator":
            raise ValueError(f"{self.form} representation has no single generator")
        return self.generators[0]

    def element(self, g: float) -> np.ndarray:
        return matexp(self.generator, -1j * g, hermitian=True)

    def sample(self, g_samples: Sequence[float] | None = None) -> list[tuple[str, np.ndarray]]:
        """Group elements to test: ``exp(-i g J)`` on ``g_samples`` or the stored elements."""
        if self.form == "generator" and not self.elements:
            gs = default_g_samples() if g_samples is None else g_samples
            return [(f"g={float(g):.12g}", self.element(g)) for g in gs]
        return list(self.elements)

    @classmethod
    def from_generator(cls, j: np.ndarray) -> "SymmetryRep":
        j = np.asarray(j, dtype=complex)
        return cls(j.shape[0], (j,))

    @classmethod
    def sampled(cls, elements: Sequence[tuple[str, np.ndarray]]) -> "SymmetryRep":
        elements = list(elements)
        return cls(np.asarray(elements[0][1]).shape[0], (), tuple(elements))

    @classmethod
    def trivial(cls, d: int) -> "SymmetryRep":
        return cls(d, (np.zeros((d, d), dtype=complex),))


SU2_AXES = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
}


def su2_samples() -> list[tuple[str, float, np.ndarray]]:
    """Twelve deterministic rotations: ``theta = pi`` about each axis plus nine generic ones."""
    out = [(f"pi@{name}", np.pi, np.array(n)) for name, n in SU2_AXES.items()]
    generic = [
        (0.3, (1, 2, 2)), (1.1, (0, 1, -1)), (2.0, (3, -4, 0)),
        (2.7, (1, 1, 1)), (4.0, (-2, 1, 2)), (5.5, (1, -3, 2)),
        (np.pi / 2, (1, 0, 0)), (np.pi / 3, (0, 1, 0)), (3 * np.pi / 2, (0, 0, 1)),
    ]
    for theta, n in generic:
        n = np.asarray(n, dtype=float)
        n /= np.linalg.norm(n)
        out.append((f"{theta:.6g}@({n[0]:.4f},{n[1]:.4f},{n[2]:.4f})", float(theta), n))
    return out


def lie_rep(generators: Sequence[np.ndarray]) -> SymmetryRep:
    """SU(2)-type representation from three generators, sampled at :func:`su2_samples`."""
    gens = tuple(np.asarray(j, dtype=complex) for j in generators)
    if len(gens) != 3:
        raise ValueError("expected three su(2) generators")
    els = [("e", np.eye(gens[0].shape[0], dtype=complex))]
    for label, theta, n in su2_samples():
        els.append((label, matexp(sum(c * j for c, j in zip(n, gens)), -1j * theta, hermitian=True)))
    return SymmetryRep(gens[0].shape[0], gens, tuple(els))


def spin_rep(j: float) -> SymmetryRep:
    return lie_rep(spin_matrices(j))


@dataclass(frozen=True, eq=False)
class ProductRep:
    """``U_g = pi_S(g) kron pi_E(g)``."""

    sys: SymmetryRep
    env: SymmetryRep

    def __post_init__(self):
        if self.sys.form != self.env.form and not (self.sys.elements and self.env.elements):
            raise ValueError("system and environment representations must share their form")
        if self.sys.elements and self.env.elements:
            if [label for label, _ in self.sys.elements] != [label for label, _ in self.env.elements]:
                raise ValueError("sampled representations must share the same labels")

    @property
    def dim(self) -> int:
        return self.sys.dim * self.env.dim

    @property
    def generators(self) -> tuple[np.ndarray, ...]:
        if len(self.sys.generators) != len(self.env.generators):
            return ()
        i_s, i_e = np.eye(self.sys.dim), np.eye(self.env.dim)
        return tuple(kron(a, i_e) + kron(i_s, b) for a, b in zip(self.sys.generators, self.env.generators))

    def sample(self, g_samples: Sequence[float] | None = None) -> list[tuple[str, np.ndarray]]:
        s = self.sys.sample(g_samples)
        e = self.env.sample(g_samples)
        return [(ls, kron(us, ue)) for (ls, us), (_, ue) in zip(s, e)]


@dataclass
class SymmetryCertificate:
    kind: str
    residual: float
    tolerance: float = CERT_TOL
    name: str = ""
    subspace_rank: int | None = None
    evidence: dict[str, float] = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in CERT_KINDS:
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        self.residual = float(self.residual)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def __str__(self) -> str:
        label = self.name or self.kind
        return f"{label}: {self.verdict} (residual {self.residual:.3e}, tol {self.tolerance:.1e})"


@lru_cache(maxsize=None)
def _probe_set(d: int, n: int = 20) -> tuple[np.ndarray, ...]:
    rng = np.random.default_rng(20240917 + d)
    return tuple(random_density(d, rng) for _ in range(n))


def commutator_superop(j: np.ndarray) -> np.ndarray:
    """Vectorized ``X -> [J, X]``."""
    eye = np.eye(j.shape[0])
    return np.kron(eye, j) - np.kron(j.T, eye)


def check_covariance(s: Superoperator, rep: SymmetryRep, samples: Sequence[float] | None = None,
                     tol: float = CERT_TOL) -> SymmetryCertificate:
    """Covariance ``pi^dag phi[rho] pi = phi[pi^dag rho pi]`` on a fixed probe set.

    Generator-form representations are also checked at the Lie-algebra
    level through ``[Phi, [J, .]] = 0``.
    """
    if rep.dim != s.dim:
        raise ValueError(f"representation dim {rep.dim} != map dim {s.dim}")
    evidence = {}
    for label, u in rep.sample(samples):
        worst = 0.0
        for rho in _probe_set(s.dim):
            lhs = dag(u) @ s(rho) @ u
            rhs = s(dag(u) @ rho @ u)
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
        evidence[label] = worst
    for k, j in enumerate(rep.generators):
        jj = commutator_superop(j)
        evidence[f"[Phi,J{k}]"] = float(np.linalg.norm(s.matrix @ jj - jj @ s.matrix))
    return SymmetryCertificate("weak_covariance", max(evidence.values()), tol, evidence=evidence)


def _hermitian_basis(d: int) -> list[np.ndarray]:
    """Hilbert-Schmidt orthonormal basis of d x d Hermitian matrices."""
    out = []
    for k in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[k, k] = 1.0
        out.append(m)
    for k, l in combinations(range(d), 2):
        m = np.zeros((d, d), dtype=complex)
        m[k, l] = m[l, k] = 1 / np.sqrt(2)
        out.append(m)
        m = np.zeros((d, d), dtype=complex)
        m[k, l] = -1j / np.sqrt(2)
        m[l, k] = 1j / np.sqrt(2)
        out.append(m)
    return out


def _realify(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z).ravel()
    return np.concatenate([z.real, z.imag])


def solve_env_generator(d: Dilation, j_s: np.ndarray, k_par: Subspace, tol: float = CERT_TOL,
                        check_minimal: Sequence[float] | None = None) -> tuple[np.ndarray, SymmetryCertificate]:
    """Environment generator making ``J_S kron I + I kron J_E`` conserved on ``k_par``.

    Solves, over Hermitian ``J_E``, the real-linear least-squares system
    ``[H, J_S kron I + I kron J_E] P = 0`` and ``J_E |psi_E> = 0``, returning
    the minimum-Frobenius-norm solution; ``details["nullity"]`` counts the
    remaining free directions (0 means the solution is unique). Pass ``check_minimal`` (a list of
    times) to reject non-minimal dilations up front.
    """
    if d.kind != "time_independent_hamiltonian":
        raise ValueError("solve_env_generator needs a time-independent Hamiltonian dilation")
    psi = d.psi_e
    if check_minimal is not None:
        from .maps import environment_support

        if not environment_support(d, check_minimal).minimal:
            raise ValueError("dilation is not minimal; minimalize it first")
    h = d.evolution.generator
    j_s = np.asarray(j_s, dtype=complex)
    if j_s.shape != (d.d_s, d.d_s):
        raise ValueError("J_S does not act on the system space")
    p = k_par.projector
    i_s, i_e = np.eye(d.d_s), np.eye(d.d_e)
    basis = _hermitian_basis(d.d_e)

    def constraint(j_tot: np.ndarray, j_e: np.ndarray) -> np.ndarray:
        return np.concatenate([_realify((h @ j_tot - j_tot @ h) @ p), _realify(j_e @ psi)])

    a = np.column_stack([constraint(kron(i_s, b), b) for b in basis])
    rhs = -constraint(kron(j_s, i_e), np.zeros((d.d_e, d.d_e)))
    x, _, rank, _ = np.linalg.lstsq(a, rhs, rcond=1e-10)
    j_e = sum(c * b for c, b in zip(x, basis))
    j_e = 0.5 * (j_e + dag(j_e))
    j_tot = kron(j_s, i_e) + kron(i_s, j_e)
    comm = float(np.linalg.norm((h @ j_tot - j_tot @ h) @ p))
    gauge = float(np.linalg.norm(j_e @ psi))
    cert = SymmetryCertificate(
        "conserved_quantity", max(comm, gauge), tol, subspace_rank=k_par.rank,
        evidence={"commutator_on_subspace": comm, "gauge": gauge},
        details={"j_e": j_e, "nullity": len(basis) - int(rank)},
    )
    return j_e, cert


def best_fit_env_unitary(v: StinespringIsometry, pi_s: np.ndarray) -> tuple[np.ndarray, float, bool]:
    """Least-squares ``X`` with ``(pi_S kron X) V = V pi_S``.

    Returns ``(X, residual, determined)``; ``X`` is unique only when the
    environment factors of ``V`` span the whole environment.
    """
    d_s, d_e = v.dims
    t = v.v.reshape(d_s, d_e, d_s)
    w = np.einsum("as,sej->aej", pi_s, t)
    target = (v.v @ pi_s).reshape(d_s, d_e, d_s)
    m = w.transpose(1, 0, 2).reshape(d_e, d_s * d_s)
    r = target.transpose(1, 0, 2).reshape(d_e, d_s * d_s)
    xt, _, rank, _ = np.linalg.lstsq(m.T, r.T, rcond=1e-10)
    x = xt.T
    res = float(np.linalg.norm(kron(pi_s, x) @ v.v - v.v @ pi_s))
    return x, res, int(rank) == d_e


def verify_intertwiner(isometries: Sequence[tuple[float, StinespringIsometry]], rep_s: SymmetryRep,
                       rep_e: SymmetryRep, samples: Sequence[float] | None = None,
                       tol: float = CERT_TOL) -> SymmetryCertificate:
    """``(pi_S(g) kron pi_E(g)) V(t) = V(t) pi_S(g)`` over time and group samples.

    Also fits ``pi_E(g, t)`` independently at every time where the fit is
    unique and reports the largest pairwise change across those times
    (``stationarity_drift``).
    """
    prod = ProductRep(rep_s, rep_e)
    s_elems = rep_s.sample(samples)
    evidence = {}
    for t, v in isometries:
        if v.dims != (rep_s.dim, rep_e.dim):
            raise ValueError("isometry dims do not match the representations")
        for (label, u), (_, us) in zip(prod.sample(samples), s_elems):
            evidence[f"t={t:.6g},{label}"] = float(np.linalg.norm(u @ v.v - v.v @ us))
        for k, (jt, js) in enumerate(zip(prod.generators, rep_s.generators)):
            evidence[f"t={t:.6g},J{k}"] = float(np.linalg.norm(jt @ v.v - v.v @ js))
    drift = 0.0
    fitted_times = 0
    for label, us in s_elems:
        fits = [fit for fit, _, ok in (best_fit_env_unitary(v, us) for _, v in isometries) if ok]
        fitted_times = len(fits)
        for a, b in combinations(fits, 2):
            drift = max(drift, float(np.linalg.norm(a - b)))
    return SymmetryCertificate("intertwiner", max(evidence.values()), tol, evidence=evidence,
                               details={"stationarity_drift": drift, "fitted_times": fitted_times})


def check_invariant_env_state(rep_e: SymmetryRep, psi_e: np.ndarray, samples: Sequence[float] | None = None,
                              tol: float = CERT_TOL) -> SymmetryCertificate:
    """Is ``psi_E`` fixed by the environment representation?"""
    psi_e = np.asarray(psi_e, dtype=complex)
    if psi_e.size != rep_e.dim:
        raise ValueError("state and representation dims differ")
    evidence = {label: float(np.linalg.norm(u @ psi_e - psi_e)) for label, u in rep_e.sample(samples)}
    gen = {f"J{k}": float(np.linalg.norm(j @ psi_e)) for k, j in enumerate(rep_e.generators)}
    evidence.update(gen)
    residual = max(gen.values()) if gen else max(evidence.values())
    return SymmetryCertificate("invariant_env_state", residual, tol, evidence=evidence)


def no_invariant_state(rep_e: SymmetryRep, tol: float = RANK_TOL) -> SymmetryCertificate:
    """Passes iff no nonzero vector is fixed by the whole representation.

    Uses the common null space of the generators when present, else the
    joint eigenvalue-1 space of the sampled elements. The residual is the
    dimension of that space; ``smallest_singular_value`` measures the margin.
    """
    d = rep_e.dim
    if rep_e.generators:
        stack = np.vstack(rep_e.generators)
    else:
        stack = np.vstack([u - np.eye(d) for _, u in rep_e.elements])
    sv = np.linalg.svd(stack, compute_uv=False)
    scale = max(1.0, float(sv[0]) if sv.size else 1.0)
    fixed_dim = int(d - np.sum(sv > tol * scale))
    return SymmetryCertificate("no_invariant_state", fixed_dim, 0.0,
                               evidence={"smallest_singular_value": float(sv[-1]) if sv.size else 0.0},
                               details={"fixed_space_dim": fixed_dim})


Evolution = Union[np.ndarray, UnitaryFamily]


def strong_symmetry_on_subspace(x: Evolution, u_g: ProductRep, sub: Subspace,
                                samples: Sequence[float] | None = None, times: Sequence[float] | None = None,
                                tol: float = CERT_TOL, hamiltonian: bool | None = None,
                                require_invariant: bool = True) -> SymmetryCertificate:
    """Residual of ``U_g^dag X U_g = X`` with ``X`` restricted to ``sub``.

    ``x`` is a Hamiltonian (which must leave ``sub`` invariant), a fixed
    unitary, or a :class:`UnitaryFamily` sampled at ``times``. The invariance
    requirement can be waived for subspaces closed only to a finite order
    (the order-2 collision subspace). For
    generator-form symmetries of a Hamiltonian the Lie-algebra residual
    ``||[H, J] P||`` is reported in ``details``.
    """
    p = sub.projector
    if isinstance(x, UnitaryFamily):
        ts = [0.0] if x.form == "constant" else list(times if times is not None else [])
        if not ts:
            raise ValueError("unitary families need time samples")
        ops = [(f"t={t:.6g}", x.at(t)) for t in ts]
        is_h = False
    else:
        x = np.asarray(x, dtype=complex)
        is_h = is_hermitian(x) if hamiltonian is None else hamiltonian
        ops = [("", x)]
        if is_h and require_invariant:
            leak = float(np.linalg.norm((np.eye(sub.dim) - p) @ x @ p))
            if leak > tol:
                raise ValueError(f"subspace is not invariant under the Hamiltonian (leak {leak:.3e})")
    if any(op.shape != (sub.dim, sub.dim) for _, op in ops) or u_g.dim != sub.dim:
        raise ValueError("operator, symmetry and subspace dims disagree")
    evidence = {}
    for tl, op in ops:
        for gl, u in u_g.sample(samples):
            key = ",".join(k for k in (tl, gl) if k)
            evidence[key] = float(np.linalg.norm((dag(u) @ op @ u - op) @ p))
    details = {}
    if is_h and u_g.generators:
        details["generator_residual"] = max(float(np.linalg.norm((x @ j - j @ x) @ p)) for j in u_g.generators)
    return SymmetryCertificate("strong_on_subspace", max(evidence.values()), tol, subspace_rank=sub.rank,
                               evidence=evidence, details=details)


def block_diagonal_check(x: np.ndarray, sub: Subspace, tol: float = CERT_TOL) -> SymmetryCertificate:
    """Frobenius norm of the part of ``x`` coupling ``sub`` to its complement."""
    x = np.asarray(x)
    if x.shape != (sub.dim, sub.dim):
        raise ValueError("operator does not act on the subspace's ambient space")
    p = sub.projector
    q = np.eye(sub.dim) - p
    a, b = p @ x @ q, q @ x @ p
    res = float(np.linalg.norm(a + b))
    return SymmetryCertificate("block_diagonal", res, tol, subspace_rank=sub.rank,
                               evidence={"par_to_perp": float(np.linalg.norm(b)),
                                         "perp_to_par": float(np.linalg.norm(a))})


def symmetrize_hamiltonian(h: np.ndarray, u_g: ProductRep, k_par: Subspace,
                           samples: Sequence[float] | None = None, tol: float = CERT_TOL) -> np.ndarray:
    """Keep ``h`` on ``k_par`` and replace its complementary block by zero.

    The result generates the same dynamics from ``H_S kron |psi_E>`` and is
    symmetric under ``u_g`` on the whole space whenever ``h`` is symmetric
    on ``k_par``.
    """
    if not block_diagonal_check(h, k_par, tol).passed:
        raise ValueError("Hamiltonian is not block-diagonal with respect to the subspace")
    for label, u in u_g.sample(samples):
        if not block_diagonal_check(u, k_par, tol).passed:
            raise ValueError(f"symmetry element {label} is not block-diagonal with respect to the subspace")
    p = k_par.projector
    out = p @ np.asarray(h, dtype=complex) @ p
    return 0.5 * (out + dag(out))
