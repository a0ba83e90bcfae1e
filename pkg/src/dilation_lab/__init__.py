"""Weak and strong symmetries of quantum maps, certified through their dilations."""
from .collision import CollisionSpec, GKLSGenerator, derive_gkls, semigroup_convergence
from .config import Options
from .krylov import k_parallel, k_parallel_order2, krylov_basis
from .maps import Dilation, StinespringIsometry, Superoperator, UnitaryFamily, map_from_dilation, minimalize, purify
from .pipeline import PipelineResult, certify
from .scenarios import build_example, run_scenario
from .symmetry import ProductRep, SymmetryCertificate, SymmetryRep, solve_env_generator

__all__ = [
    "CollisionSpec",
    "Dilation",
    "GKLSGenerator",
    "Options",
    "PipelineResult",
    "ProductRep",
    "StinespringIsometry",
    "Superoperator",
    "SymmetryCertificate",
    "SymmetryRep",
    "UnitaryFamily",
    "build_example",
    "certify",
    "derive_gkls",
    "k_parallel",
    "k_parallel_order2",
    "krylov_basis",
    "map_from_dilation",
    "minimalize",
    "purify",
    "run_scenario",
    "semigroup_convergence",
    "solve_env_generator",
]
