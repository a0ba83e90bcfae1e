import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dilation_lab.krylov import k_parallel, k_parallel_order2, krylov_basis, krylov_sum, sigma_parallel_sampled
from dilation_lab.maps import UnitaryFamily, random_hermitian, random_state
from dilation_lab.operators import annihilation, sigma_minus, sigma_plus
from dilation_lab.tensor import TensorSpace, dag, kron

from strategies import seeds


def sampled_rank(h, psi_e, d_s, n_times=40, tol=1e-8):
    """Rank of span{exp(-iHt)|j>|psi_E>} over random times, by SVD of the stacked vectors."""
    rng = np.random.default_rng(99)
    w, v = np.linalg.eigh(h)
    cols = []
    for t in rng.uniform(0, 20, n_times):
        u = (v * np.exp(-1j * w * t)) @ dag(v)
        cols.extend(u @ kron(np.eye(d_s)[j], psi_e) for j in range(d_s))
    sv = np.linalg.svd(np.array(cols).T, compute_uv=False)
    return int(np.sum(sv > tol * sv[0]))


def test_krylov_basis_of_diagonal_matrix():
    a = np.diag([1.0, 2.0, 3.0, 3.0])
    res = krylov_basis(a, np.ones(4))
    assert res.rank == 3
    assert res.seed_dims == (("v", 3),)


def test_krylov_basis_truncation():
    a = np.diag([1.0, 2.0, 3.0, 4.0])
    assert krylov_basis(a, np.ones(4), max_order=2).rank == 2


@pytest.mark.parametrize("bad", [dict(a=np.eye(3), v=np.ones(2)), dict(a=np.eye(2), v=np.zeros(2))])
def test_krylov_basis_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        krylov_basis(bad["a"], bad["v"])


def test_zero_generator_gives_system_rank():
    space = TensorSpace((3, 2))
    res = k_parallel(np.zeros((6, 6)), np.array([1.0, 0.0]), space)
    assert res.rank == 3 and res.perp_rank == 3


def test_exchange_model_ranks_and_seed_dims():
    a = annihilation(4)
    h = kron(dag(a), a) + kron(a, dag(a))
    space = TensorSpace((4, 4))
    kp = k_parallel(h, np.eye(4)[0], space)
    k2 = k_parallel_order2(h, np.eye(4)[0], space)
    assert [n for _, n in kp.seed_dims] == [1, 2, 3, 4]
    assert (kp.rank, k2.rank) == (10, 9)
    assert kp.rank == sampled_rank(h, np.eye(4)[0], 4)


def test_qubit_exchange_rank_three():
    h = kron(sigma_plus(), sigma_minus()) + kron(sigma_minus(), sigma_plus())
    space = TensorSpace((2, 2))
    kp = k_parallel(h, np.eye(2)[0], space)
    assert kp.rank == 3 and kp.perp_rank == 1
    assert k_parallel_order2(h, np.eye(2)[0], space).rank == 3


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_k_parallel_is_invariant_and_matches_sampled_dynamics(seed, d_s, d_e):
    rng = np.random.default_rng(seed)
    h = random_hermitian(d_s * d_e, rng)
    psi = random_state(d_e, rng)
    kp = k_parallel(h, psi, TensorSpace((d_s, d_e)))
    p = kp.projector
    assert np.linalg.norm((np.eye(d_s * d_e) - p) @ h @ p) < 1e-10
    assert kp.rank == sampled_rank(h, psi, d_s)


def test_custom_system_basis_spans_same_subspace():
    rng = np.random.default_rng(4)
    h = random_hermitian(6, rng)
    psi = random_state(2, rng)
    space = TensorSpace((3, 2))
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    a = krylov_sum(h, psi, space)
    b = krylov_sum(h, psi, space, sys_basis=q)
    assert a.subspace.distance(b.subspace) < 1e-9


def test_sigma_parallel_sampled_matches_k_parallel_for_generator():
    a = annihilation(3)
    h = kron(dag(a), a) + kron(a, dag(a))
    space = TensorSpace((3, 3))
    fam = UnitaryFamily.from_generator(h)
    sp = sigma_parallel_sampled(fam, np.eye(3)[0], space, np.linspace(0, 2 * np.pi, 32))
    kp = k_parallel(h, np.eye(3)[0], space)
    assert sp.stabilized and sp.order_cap == "sampled"
    assert sp.subspace.distance(kp.subspace) < 1e-8


def test_sigma_parallel_sampled_flags_undersampling():
    h = random_hermitian(4, np.random.default_rng(1))
    space = TensorSpace((2, 2))
    sp = sigma_parallel_sampled(UnitaryFamily.from_generator(h), np.eye(2)[0], space, [0.0, 0.5])
    assert sp.rank_evidence == (2, 4) and not sp.stabilized
