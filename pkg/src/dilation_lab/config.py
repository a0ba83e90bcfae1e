"""Numerical tolerances and sampling defaults."""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

RANK_TOL = 1e-10
HERMITIAN_RTOL = 1e-12
UNITARY_ATOL = 1e-10
NORM_ATOL = 1e-10
PURIFY_CUTOFF = 1e-12
CERT_TOL = 1e-9


def default_g_samples(n: int = 16) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


def default_time_grid(n: int = 32, interval: tuple[float, float] = (0.0, 2 * np.pi)) -> np.ndarray:
    return np.linspace(interval[0], interval[1], n)


@dataclass
class Options:
    """Per-run configuration of the certification pipeline."""

    tol: float = CERT_TOL
    rank_tol: float = RANK_TOL
    time_grid: np.ndarray = field(default_factory=default_time_grid)
    g_samples: np.ndarray = field(default_factory=default_g_samples)

    def __post_init__(self):
        self.time_grid = np.asarray(self.time_grid, dtype=float)
        self.g_samples = np.asarray(self.g_samples, dtype=float)


def max_workers() -> int:
    """Thread cap from ``DILATION_LAB_THREADS`` (default: CPU count)."""
    raw = os.environ.get("DILATION_LAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1
