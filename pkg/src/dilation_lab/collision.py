"""Collision models: single steps, trajectories, and their GKLS short-time limit.

One collision applies ``exp(-i g_I H_I dt)`` to the system and a fresh
ancilla in ``rho_E`` and discards the ancilla. With ``g_I = sqrt(gamma / dt)``
the step approaches ``Id + dt L`` for the GKLS generator ``L`` built by
:func:`derive_gkls`.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg

from .config import CERT_TOL, max_workers
from .krylov import KrylovResult, k_parallel_order2
from .maps import Dilation, Superoperator, UnitaryFamily, map_from_dilation, purify, random_density
from .symmetry import (
    ProductRep,
    SymmetryCertificate,
    SymmetryRep,
    check_covariance,
    solve_env_generator,
    strong_symmetry_on_subspace,
)
from .tensor import dag, fix_phase, is_hermitian, kron

CENTERING_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CollisionSpec:
    """Interaction ``H_I = sum_a A_a kron B_a`` with ancillas in ``rho_e``."""

    h_terms: tuple[tuple[np.ndarray, np.ndarray], ...] = field(repr=False)
    rho_e: np.ndarray = field(repr=False)
    gamma: float = 1.0
    dt: float = 0.01

    def __post_init__(self):
        terms = tuple((np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)) for a, b in self.h_terms)
        if not terms:
            raise ValueError("need at least one interaction term")
        rho = np.asarray(self.rho_e, dtype=complex)
        if rho.ndim == 1:
            rho = np.outer(rho, rho.conj())
        d_s, d_e = terms[0][0].shape[0], rho.shape[0]
        for k, (a, b) in enumerate(terms):
            if a.shape != (d_s, d_s) or b.shape != (d_e, d_e):
                raise ValueError(f"term {k} has shapes {a.shape}, {b.shape}; expected ({d_s},{d_s}), ({d_e},{d_e})")
        if abs(np.trace(rho) - 1) > 1e-10 or not is_hermitian(rho, 1e-10):
            raise ValueError("rho_e must be a Hermitian unit-trace matrix")
        if not self.gamma > 0 or not self.dt > 0:
            raise ValueError("gamma and dt must be positive")
        object.__setattr__(self, "h_terms", terms)
        object.__setattr__(self, "rho_e", rho)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "dt", float(self.dt))
        h = self.hamiltonian
        if not is_hermitian(h):
            raise ValueError("interaction terms do not add up to a Hermitian H_I")
        for k, (_, b) in enumerate(terms):
            mean = complex(np.trace(b @ rho))
            if abs(mean) > CENTERING_TOL:
                raise ValueError(f"term {k}: Tr[B rho_E] = {mean:.3e} must vanish")

    @property
    def d_s(self) -> int:
        return self.h_terms[0][0].shape[0]

    @property
    def d_e(self) -> int:
        return self.rho_e.shape[0]

    @property
    def g_i(self) -> float:
        return float(np.sqrt(self.gamma / self.dt))

    @cached_property
    def hamiltonian(self) -> np.ndarray:
        return sum(kron(a, b) for a, b in self.h_terms)

    def dilation(self) -> Dilation:
        """Dilation with generator ``H_I``; one collision is its evolution at ``t = g_I dt``."""
        return Dilation((self.d_s, self.d_e), self.rho_e, UnitaryFamily.from_generator(self.hamiltonian),
                        "collision")


@dataclass(frozen=True, eq=False)
class GKLSGenerator:
    """``L[rho] = -i[H, rho] + gamma sum mu_{ab} (A_b rho A_a^dag - 1/2 {A_a^dag A_b, rho})``."""

    hamiltonian: np.ndarray = field(repr=False)
    jump_ops: tuple[np.ndarray, ...] = field(repr=False)
    rate_matrix: np.ndarray = field(repr=False)
    gamma: float = 1.0

    def __post_init__(self):
        mu = np.asarray(self.rate_matrix, dtype=complex)
        n = len(self.jump_ops)
        if mu.shape != (n, n):
            raise ValueError("rate matrix must be square with one row per jump operator")
        if n and (not is_hermitian(mu, 1e-10) or np.linalg.eigvalsh(0.5 * (mu + dag(mu)))[0] < -1e-10):
            raise ValueError("rate matrix must be Hermitian positive semidefinite")
        object.__setattr__(self, "rate_matrix", mu)
        object.__setattr__(self, "hamiltonian", np.asarray(self.hamiltonian, dtype=complex))
        object.__setattr__(self, "jump_ops", tuple(np.asarray(a, dtype=complex) for a in self.jump_ops))

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @cached_property
    def superoperator(self) -> Superoperator:
        d = self.dim
        eye = np.eye(d)
        h = self.hamiltonian
        m = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
        for a_idx, a in enumerate(self.jump_ops):
            for b_idx, b in enumerate(self.jump_ops):
                mu = self.rate_matrix[a_idx, b_idx]
                if mu == 0:
                    continue
                # X -> B X A^dag  is  kron(conj(A), B)
                ab = dag(a) @ b
                m = m + self.gamma * mu * (np.kron(a.conj(), b) - 0.5 * (np.kron(eye, ab) + np.kron(ab.T, eye)))
        return Superoperator(d, m)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return self.superoperator(rho)

    def propagator(self, t: float) -> Superoperator:
        """``exp(L t)``."""
        return Superoperator(self.dim, scipy.linalg.expm(self.superoperator.matrix * t))

    def trace_defect(self, n_probes: int = 20, seed: int = 11) -> float:
        rng = np.random.default_rng(seed)
        return max(abs(np.trace(self(random_density(self.dim, rng)))) for _ in range(n_probes))


def collision_step(spec: CollisionSpec) -> Superoperator:
    """``rho -> Tr_E[exp(-i g_I H_I dt) rho kron rho_E exp(i g_I H_I dt)]``."""
    return map_from_dilation(spec.dilation(), spec.g_i * spec.dt)


def _is_density(rho: np.ndarray, tol: float = 1e-9) -> bool:
    return abs(np.trace(rho) - 1) <= tol and np.linalg.eigvalsh(0.5 * (rho + dag(rho)))[0] >= -tol


def iterate(step: Superoperator, rho0: np.ndarray, n: int) -> list[np.ndarray]:
    """Trajectory ``[rho0, step(rho0), ..., step^n(rho0)]``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    traj = [np.asarray(rho0, dtype=complex)]
    for _ in range(n):
        traj.append(step(traj[-1]))
    return traj


def trajectory_valid(traj: Sequence[np.ndarray], tol: float = 1e-9) -> bool:
    return all(_is_density(r, tol) for r in traj)


def derive_gkls(spec: CollisionSpec) -> GKLSGenerator:
    """Short-time generator with ``mu_{ab} = Tr[B_a^dag B_b rho_E]``."""
    bs = [b for _, b in spec.h_terms]
    n = len(bs)
    mu = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            mu[i, j] = np.trace(dag(bs[i]) @ bs[j] @ spec.rho_e)
    return GKLSGenerator(np.zeros((spec.d_s, spec.d_s), dtype=complex), tuple(a for a, _ in spec.h_terms),
                         0.5 * (mu + dag(mu)), spec.gamma)


def first_order_defect(spec: CollisionSpec) -> float:
    """``||phi_dt - (Id + dt L)||`` (Frobenius); shrinks like ``dt^2``."""
    step = collision_step(spec)
    gen = derive_gkls(spec).superoperator.matrix
    return float(np.linalg.norm(step.matrix - np.eye(step.matrix.shape[0]) - spec.dt * gen))


@dataclass(frozen=True)
class ConvergenceRow:
    dt: float
    steps: int
    time_residual: float
    frobenius: float
    max_entry: float


@dataclass(frozen=True)
class ConvergenceReport:
    t: float
    rows: tuple[ConvergenceRow, ...]
    order: float | None

    @property
    def errors(self) -> list[float]:
        return [r.frobenius for r in self.rows]

    @property
    def strictly_decreasing(self) -> bool:
        e = self.errors
        return all(b < a for a, b in zip(e, e[1:]))


def _convergence_row(spec: CollisionSpec, t: float, exact: np.ndarray) -> ConvergenceRow:
    n = int(round(t / spec.dt))
    approx = collision_step(spec).power(n).matrix
    diff = approx - exact
    return ConvergenceRow(spec.dt, n, float(t - n * spec.dt), float(np.linalg.norm(diff)),
                          float(np.max(np.abs(diff))))


def semigroup_convergence(spec: CollisionSpec, t: float, dts: Sequence[float]) -> ConvergenceReport:
    """Distance between ``phi_dt^n`` (``n = round(t / dt)``) and ``exp(L t)`` per timestep.

    The order is the slope of ``log error`` against ``log dt``; it is
    ``None`` when any error vanishes.
    """
    dts = [float(x) for x in dts]
    if not dts:
        raise ValueError("need at least one timestep")
    exact = derive_gkls(spec).propagator(t).matrix
    specs = [replace(spec, dt=dt) for dt in dts]
    with ThreadPoolExecutor(max_workers=min(max_workers(), len(specs))) as pool:
        rows = tuple(pool.map(lambda s: _convergence_row(s, t, exact), specs))
    errs = np.array([r.frobenius for r in rows])
    order = None
    if len(rows) > 1 and np.all(errs > 1e-14):
        order = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    return ConvergenceReport(float(t), rows, order)


@dataclass(frozen=True, eq=False)
class CollisionSymmetryResult:
    covariance: SymmetryCertificate
    conserved: SymmetryCertificate
    strong: SymmetryCertificate
    k_par2: KrylovResult
    j_e: np.ndarray = field(repr=False)
    dilation: Dilation = field(repr=False)

    @property
    def certificates(self) -> list[SymmetryCertificate]:
        return [self.covariance, self.conserved, self.strong]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates)


def collision_symmetry_pipeline(spec: CollisionSpec, j_s: np.ndarray, tol: float = CERT_TOL,
                                g_samples: Sequence[float] | None = None,
                                probe_time: float = 1.0) -> CollisionSymmetryResult:
    """Strong symmetry of ``H_I`` on the order-2 subspace explored by one collision.

    The semigroup ``exp(L t)`` must be covariant under ``exp(-i g J_S)``;
    the environment generator is then solved on that subspace.
    """
    gkls = derive_gkls(spec)
    rep_s = SymmetryRep.from_generator(j_s)
    cov = check_covariance(gkls.propagator(probe_time), rep_s, g_samples, tol)
    if not cov.passed:
        raise ValueError(f"semigroup is not covariant under J_S (residual {cov.residual:.3e})")
    d = spec.dilation()
    if not _is_pure(d.env_state):
        d = purify(d)
    else:
        _, v = np.linalg.eigh(d.env_state)
        d = Dilation(d.dims, fix_phase(v[:, -1]), d.evolution, d.name)
    h = d.evolution.generator
    k2 = k_parallel_order2(h, d.psi_e, d.space)
    j_e, cons = solve_env_generator(d, j_s, k2.subspace, tol)
    u_g = ProductRep(rep_s, SymmetryRep.from_generator(j_e))
    # the order-2 subspace is only closed under H_I up to the retained order
    strong = strong_symmetry_on_subspace(h, u_g, k2.subspace, g_samples, tol=tol, require_invariant=False)
    return CollisionSymmetryResult(cov, cons, strong, k2, j_e, d)


def _is_pure(rho: np.ndarray) -> bool:
    return abs(np.trace(rho @ rho) - 1) <= 1e-10
