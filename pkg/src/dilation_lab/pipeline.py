"""End-to-end certification of a dilation against a system symmetry.

The steps depend on the evolution kind. Every dilation gets a covariance
certificate for its induced map and a minimality report. Hamiltonian
dilations additionally get the Krylov subspaces, a solved environment
generator (unless one is supplied) and strong-symmetry certificates on
``K_par``, ``K_perp`` and the full space. Other kinds are checked on
``H_S kron span{psi_E}`` with the supplied environment representation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .config import Options
from .krylov import KrylovResult, k_parallel, k_parallel_order2, sigma_parallel_sampled
from .maps import Dilation, environment_support, isometry_from_dilation, map_from_dilation, minimalize, purify
from .symmetry import (
    ProductRep,
    SymmetryCertificate,
    SymmetryRep,
    block_diagonal_check,
    check_covariance,
    check_invariant_env_state,
    no_invariant_state,
    solve_env_generator,
    strong_symmetry_on_subspace,
    verify_intertwiner,
)
from .tensor import Subspace, kron, orthonormalize

CHECK_GROUPS = {
    "all": None,
    "covariance-only": {"weak_covariance"},
}


@dataclass
class PipelineResult:
    certificates: dict[str, SymmetryCertificate] = field(default_factory=dict)
    values: dict[str, int | float | bool] = field(default_factory=dict)
    krylov: dict[str, KrylovResult] = field(default_factory=dict)
    j_e: np.ndarray | None = None
    env_rep: SymmetryRep | None = None
    dilation: Dilation | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates.values())


def evaluation_times(d: Dilation, options: Options) -> list[float]:
    if d.evolution.form == "constant":
        return [0.0]
    if d.evolution.form == "table":
        return [float(t) for t in d.evolution.times]
    return [float(t) for t in options.time_grid]


def covariance_over_times(d: Dilation, rep: SymmetryRep, times: Iterable[float],
                          options: Options) -> SymmetryCertificate:
    """Worst covariance certificate of the induced map across ``times``."""
    worst = None
    evidence = {}
    for t in times:
        cert = check_covariance(map_from_dilation(d, t), rep, options.g_samples, options.tol)
        evidence.update({f"t={t:.6g},{k}": v for k, v in cert.evidence.items()})
        if worst is None or cert.residual > worst.residual:
            worst = cert
    return SymmetryCertificate("weak_covariance", worst.residual, options.tol, evidence=evidence)


def psi_subspace(d: Dilation) -> Subspace:
    """``H_S kron span{psi_E}``."""
    vecs = [kron(np.eye(d.d_s)[:, j], d.psi_e) for j in range(d.d_s)]
    return orthonormalize(vecs, d.space)


def _parse_checks(checks: str | set[str] | None) -> set[str] | None:
    if checks is None or isinstance(checks, set):
        return checks
    if checks in CHECK_GROUPS:
        return CHECK_GROUPS[checks]
    return {c.strip() for c in checks.split(",") if c.strip()}


def certify(d: Dilation, sys_rep: SymmetryRep, env_rep: SymmetryRep | None = None,
            options: Options | None = None, checks: str | set[str] | None = None) -> PipelineResult:
    """Run every applicable certificate; ``checks`` restricts which are kept."""
    options = options or Options()
    wanted = _parse_checks(checks)
    out = PipelineResult()
    times = evaluation_times(d, options)

    def keep(name: str) -> bool:
        return wanted is None or name in wanted

    if sys_rep.dim != d.d_s:
        raise ValueError(f"system representation has dim {sys_rep.dim}, dilation system dim is {d.d_s}")
    out.certificates["weak_covariance"] = covariance_over_times(d, sys_rep, times, options)
    if wanted is not None and wanted <= {"weak_covariance"}:
        return out

    work = d if d.is_pure else purify(d)
    out.values["purified"] = not d.is_pure
    out.values["env_dim"] = work.d_e
    support = environment_support(work, times, options.rank_tol)
    out.values["env_support_dim"] = support.support_dim
    out.values["minimal"] = support.minimal
    if env_rep is not None and env_rep.dim != work.d_e:
        raise ValueError(f"environment representation has dim {env_rep.dim}, environment dim is {work.d_e}")

    if work.kind == "time_independent_hamiltonian":
        if not support.minimal:
            work = minimalize(work, times, options.rank_tol)
        h = work.evolution.generator
        kp = k_parallel(h, work.psi_e, work.space, options.rank_tol)
        k2 = k_parallel_order2(h, work.psi_e, work.space, options.rank_tol)
        out.krylov = {"k_par": kp, "k_par2": k2}
        out.values.update(k_par_rank=kp.rank, k_perp_rank=kp.perp_rank, k_par2_rank=k2.rank)
        if env_rep is None and sys_rep.form == "generator":
            j_e, cert = solve_env_generator(work, sys_rep.generator, kp.subspace, options.tol)
            out.certificates["conserved_quantity"] = cert
            out.j_e = j_e
            env_rep = SymmetryRep.from_generator(j_e)
        out.certificates["block_diagonal"] = block_diagonal_check(h, kp.subspace, options.tol)
        if env_rep is not None:
            u_g = ProductRep(sys_rep, env_rep)
            kw = dict(samples=options.g_samples, tol=options.tol)
            out.certificates["strong_on_k_par"] = strong_symmetry_on_subspace(h, u_g, kp.subspace, **kw)
            if kp.perp_rank:
                out.certificates["strong_on_k_perp"] = strong_symmetry_on_subspace(
                    h, u_g, kp.subspace.complement(options.rank_tol), **kw)
            out.certificates["strong_global"] = strong_symmetry_on_subspace(
                h, u_g, Subspace.full(work.space), **kw)
    else:
        if work.evolution.form != "constant":
            sp = sigma_parallel_sampled(work.evolution, work.psi_e, work.space, times, options.rank_tol)
            out.krylov = {"sigma_par": sp}
            out.values["sigma_par_rank"] = sp.rank
            out.values["sigma_par_stabilized"] = sp.stabilized
        if env_rep is not None:
            u_g = ProductRep(sys_rep, env_rep)
            kw = dict(samples=options.g_samples, times=times, tol=options.tol)
            out.certificates["strong_on_psi"] = strong_symmetry_on_subspace(
                work.evolution, u_g, psi_subspace(work), **kw)
            out.certificates["strong_global"] = strong_symmetry_on_subspace(
                work.evolution, u_g, Subspace.full(work.space), **kw)

    if env_rep is not None:
        out.certificates["invariant_env_state"] = check_invariant_env_state(
            env_rep, work.psi_e, options.g_samples, options.tol)
        isos = [(t, isometry_from_dilation(work, t)) for t in times]
        cert = verify_intertwiner(isos, sys_rep, env_rep, options.g_samples, options.tol)
        out.certificates["intertwiner"] = cert
        out.values["stationarity_drift"] = cert.details["stationarity_drift"]
        if env_rep.form != "generator":
            out.certificates["no_invariant_state"] = no_invariant_state(env_rep, options.rank_tol)
    out.env_rep = env_rep
    out.dilation = work
    if wanted is not None:
        out.certificates = {k: v for k, v in out.certificates.items() if keep(k)}
    return out
