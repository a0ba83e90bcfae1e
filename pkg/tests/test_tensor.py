import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dilation_lab.maps import random_density, random_hermitian
from dilation_lab.tensor import (
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
    restrict,
)

from strategies import hermitians, seeds


def taylor_exp(a, terms=80):
    """Truncated power series; only used on matrices of small norm."""
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def brute_partial_trace(m, d_a, d_b, keep):
    if keep == 0:
        return np.array([[sum(m[i * d_b + k, j * d_b + k] for k in range(d_b)) for j in range(d_a)]
                         for i in range(d_a)])
    return np.array([[sum(m[k * d_b + i, k * d_b + j] for k in range(d_a)) for j in range(d_b)]
                     for i in range(d_b)])


@given(hermitians(), st.floats(min_value=-2.0, max_value=2.0))
def test_matexp_matches_power_series(h, t):
    assert np.allclose(matexp(h, -1j * t), taylor_exp(-1j * t * h), atol=1e-11)


@given(seeds, st.integers(min_value=1, max_value=4))
def test_matexp_non_hermitian_matches_power_series(seed, d):
    rng = np.random.default_rng(seed)
    a = 0.5 * (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    assert np.allclose(matexp(a), taylor_exp(a), atol=1e-10)


@given(hermitians(), st.floats(-3, 3), st.floats(-3, 3))
def test_matexp_unitary_and_semigroup(h, s, t):
    u_s, u_t = matexp(h, -1j * s), matexp(h, -1j * t)
    assert is_unitary(u_s)
    assert np.allclose(u_s @ u_t, matexp(h, -1j * (s + t)), atol=1e-10)


def test_matexp_zero_scale_is_identity():
    assert np.array_equal(matexp(np.ones((3, 3)), 0), np.eye(3))


def test_matexp_rejects_non_square():
    with pytest.raises(ValueError):
        matexp(np.ones((2, 3)))


@pytest.mark.parametrize("keep", [0, 1])
@pytest.mark.parametrize("d_a,d_b", [(2, 2), (2, 3), (3, 2), (4, 1)])
def test_partial_trace_matches_index_sum(rng, d_a, d_b, keep):
    m = random_density(d_a * d_b, rng)
    assert np.allclose(partial_trace(m, (d_a, d_b), [keep]), brute_partial_trace(m, d_a, d_b, keep), atol=1e-14)


def test_partial_trace_of_product_state(rng):
    a, b, c = random_density(2, rng), random_density(3, rng), random_density(2, rng)
    m = kron(a, b, c)
    assert np.allclose(partial_trace(m, (2, 3, 2), [0, 2]), kron(a, c))
    assert np.allclose(partial_trace(m, (2, 3, 2), [1]), b)
    assert np.allclose(partial_trace(m, (2, 3, 2), []), [[1.0]])


def test_partial_trace_shape_mismatch():
    with pytest.raises(ValueError):
        partial_trace(np.eye(5), (2, 2), [0])


def test_tensor_space_index_is_system_first():
    sp = TensorSpace((2, 3))
    assert sp.dim == 6
    assert sp.index(1, 2) == 5
    assert np.array_equal(sp.ket(1, 0), kron(np.eye(2)[1], np.eye(3)[0]))


@given(seeds)
def test_orthonormalize_rank_and_phase(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=4) + 1j * rng.normal(size=4), rng.normal(size=4) + 1j * rng.normal(size=4)
    sub = orthonormalize([a, b, a + 2 * b, 0 * a], 4)
    assert sub.rank == 2
    assert np.allclose(dag(sub.basis) @ sub.basis, np.eye(2), atol=1e-12)
    for v in sub.vectors():
        first = v[np.flatnonzero(np.abs(v) > 1e-10)[0]]
        assert abs(first.imag) < 1e-12 and first.real > 0


def test_subspace_complement_and_distance():
    sp = TensorSpace((2, 2))
    sub = Subspace.span([sp.ket(0, 0), sp.ket(1, 1)], sp)
    comp = sub.complement()
    assert comp.rank == 2
    assert np.allclose(sub.projector + comp.projector, np.eye(4))
    assert sub.distance(Subspace.span([sp.ket(1, 1), sp.ket(0, 0)], sp)) < 1e-14
    assert sub.contains(sp.ket(0, 0)) and not sub.contains(sp.ket(0, 1))


def test_restrict_compresses_operator(rng):
    h = random_hermitian(4, rng)
    sp = TensorSpace((4,))
    sub = Subspace.span([sp.ket(0), sp.ket(2)], sp)
    r = restrict(h, sub)
    assert r.shape == (2, 2)
    assert math.isclose(abs(r[0, 1]), abs(h[0, 2]), abs_tol=1e-14)


def test_fix_phase_makes_first_entry_positive():
    v = np.array([0, 1j, 1]) / math.sqrt(2)
    w = fix_phase(v)
    assert w[1].real > 0 and abs(w[1].imag) < 1e-15
    assert np.isclose(abs(np.vdot(v, w)), 1)


def test_hermitian_and_unitary_predicates():
    assert is_hermitian(np.array([[1, 1j], [-1j, 2]]))
    assert not is_hermitian(np.array([[0, 1], [0, 0]]))
    assert is_unitary(np.array([[0, 1], [1, 0]]))
    assert not is_unitary(2 * np.eye(2))
