"""Independent brute-force evaluation of the two frozen residuals.

Nothing from the package is used here: operators are written out
element by element, so these checks do not share code with the
certificates they pin down.
"""
import cmath
import math

import pytest

from dilation_lab.scenarios import EX2_PRIME_K_PERP_RESIDUAL, EX5_RESIDUAL_PI_QUARTER


def frob(m):
    return math.sqrt(sum(abs(x) ** 2 for row in m for x in row))


def conj_residual(u, phases, cols):
    """|| (D^dag U D - U) P ||_F for diagonal D = diag(phases), P selecting ``cols``."""
    n = len(u)
    return frob([[phases[i].conjugate() * u[i][j] * phases[j] - u[i][j] if j in cols else 0
                  for j in range(n)] for i in range(n)])


def ex2_prime_residual(g):
    # ascending basis |s e c>, index 4s + 2e + c
    n = 8
    h = [[0j] * n for _ in range(n)]
    for c in (0, 1):
        h[4 * 1 + 2 * 0 + c][4 * 0 + 2 * 1 + c] = 1  # sigma+_S sigma-_E
        h[4 * 0 + 2 * 1 + c][4 * 1 + 2 * 0 + c] = 1
    h[0b001][0b110] = h[0b110][0b001] = 1
    charge = [s + e - c for s in (0, 1) for e in (0, 1) for c in (0, 1)]
    phases = [cmath.exp(-1j * g * q) for q in charge]
    return conj_residual(h, phases, cols={0b001, 0b110})


def ex5_residual(g, t):
    # descending basis: |1S1E>, |1S0E>, |0S1E>, |0S0E>
    c, s = math.cos(t), -1j * math.sin(t)
    u = [[0, 1, 0, 0], [c, 0, 0, s], [s, 0, 0, c], [0, 0, 1, 0]]
    charge = [1 + 1 - 1, 1 + 0 - 1, 0 + 1 - 1, 0 + 0 - 1]  # N_S + N_E - 1
    phases = [cmath.exp(-1j * g * q) for q in charge]
    return conj_residual(u, phases, cols={1, 3})  # environment in |0_E>


def test_ex2_prime_k_perp_residual_is_worst_over_default_samples():
    worst = max(ex2_prime_residual(2 * math.pi * k / 16) for k in range(16))
    assert worst == pytest.approx(EX2_PRIME_K_PERP_RESIDUAL, abs=1e-12)
    assert worst == pytest.approx(2 * math.sqrt(2), abs=1e-12)


def test_ex5_residual_at_pi_and_quarter_period():
    r = ex5_residual(math.pi, math.pi / 4)
    assert r == pytest.approx(EX5_RESIDUAL_PI_QUARTER, abs=1e-12)
    assert r >= 0.5


def test_ex5_residual_vanishes_at_identity():
    assert ex5_residual(0.0, 0.7) == 0.0
