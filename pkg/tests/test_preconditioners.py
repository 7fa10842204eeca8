import math

import numpy as np
import pytest

from sparsejl.hashing import HashProjection
from sparsejl.preconditioners import (BlockHadamard, ReplicationPlan, block_apply, bucket_stats, fwht_in_place,
                                      hadamard_matrix, parity)
from sparsejl.verification import dense_block_hadamard
from sparsejl.vectors import SparseVector


def test_replicate_scalar():
    np.testing.assert_array_equal(ReplicationPlan(4, 1).replicate(np.array([1.0])), [0.5] * 4)


def test_replicate_zero():
    assert not ReplicationPlan(3, 5).replicate(np.zeros(5)).any()
    assert ReplicationPlan(3, 5).replicate(SparseVector.from_dense(np.zeros(5))).indices.size == 0


def test_replicate_norms():
    x = np.random.default_rng(0).standard_normal(100)
    x /= np.linalg.norm(x)
    px = ReplicationPlan(9, 100).replicate(x)
    assert np.linalg.norm(px) == pytest.approx(1.0, rel=1e-12)
    assert np.abs(px).max() == pytest.approx(np.abs(x).max() / 3, abs=1e-12)


def test_replicate_sparse_layout():
    x = SparseVector(6, np.array([1, 4]), np.array([2.0, -1.0]))
    px = ReplicationPlan(3, 6).replicate(x)
    assert px.dim == 18
    assert px.indices.tolist() == [3, 4, 5, 12, 13, 14]
    np.testing.assert_allclose(px.values, np.repeat([2.0, -1.0], 3) / math.sqrt(3))
    np.testing.assert_array_equal(px.to_dense(), ReplicationPlan(3, 6).replicate(x.to_dense()))


def test_replicate_dim_mismatch():
    with pytest.raises(ValueError):
        ReplicationPlan(3, 6).replicate(np.zeros(5))


def test_parity():
    v = np.arange(1024)
    want = np.array([bin(i).count("1") % 2 for i in range(1024)])
    np.testing.assert_array_equal(parity(v), want)


def test_fwht_m1():
    z = np.array([3.5])
    assert fwht_in_place(z)[0] == 3.5


def test_fwht_m2():
    # F = 2**-0.5 [[1, 1], [1, -1]] from the bit inner products <0,0>, <0,1>, <1,0>, <1,1>
    np.testing.assert_allclose(fwht_in_place(np.array([1.0, 0.0])), [1 / math.sqrt(2)] * 2, atol=1e-15)


def test_fwht_involution():
    z = np.random.default_rng(1).standard_normal(1024)
    np.testing.assert_allclose(fwht_in_place(fwht_in_place(z.copy())), z, atol=1e-12)


def test_fwht_matches_matrix():
    z = np.random.default_rng(2).standard_normal(64)
    np.testing.assert_allclose(fwht_in_place(z.copy()), hadamard_matrix(64) @ z, atol=1e-12)


def test_fwht_rejects_bad_length():
    with pytest.raises(ValueError):
        fwht_in_place(np.zeros(6))


@pytest.mark.parametrize("b", [2, 4, 8])
def test_hadamard_orthogonal(b):
    F = hadamard_matrix(b)
    np.testing.assert_allclose(F.T @ F, np.eye(b), atol=1e-12)


def test_block_apply_zero():
    G = BlockHadamard.from_seed(8, 32, 1)
    assert not block_apply(G, np.zeros(32)).any()


def test_block_apply_isometry():
    G = BlockHadamard.from_seed(64, 256, 3)
    x = np.random.default_rng(3).standard_normal(256)
    x /= np.linalg.norm(x)
    assert np.linalg.norm(block_apply(G, x)) == pytest.approx(1.0, rel=1e-12)


def test_block_apply_matches_explicit_fd():
    G = BlockHadamard.from_seed(4, 4, 5)
    x = np.random.default_rng(4).standard_normal(4)
    D = np.array([G.diag_src.sign_at(j) for j in range(4)])
    F = np.array([[(-1) ** bin(i & j).count("1") for j in range(4)] for i in range(4)]) / 2.0
    np.testing.assert_allclose(block_apply(G, x), F @ (D * x), atol=1e-12)


def test_padding_and_dense_oracle():
    G = BlockHadamard.from_seed(8, 21, 6)
    assert (G.num_blocks, G.padded_dim) == (3, 24)
    x = np.random.default_rng(5).standard_normal(21)
    gx = block_apply(G, x)
    assert gx.shape == (24,)
    np.testing.assert_allclose(gx, dense_block_hadamard(G) @ x, atol=1e-12)
    assert np.linalg.norm(gx) == pytest.approx(np.linalg.norm(x), rel=1e-12)


def test_block_skipping_identical_to_dense():
    G = BlockHadamard.from_seed(16, 160, 7)
    x = SparseVector(160, np.array([3, 5, 90, 91, 3]), np.array([1.0, -2.0, 0.5, 4.0, 0.25]))
    blocks, _ = G.apply_blocks(x)
    assert blocks.tolist() == [0, 5]
    assert np.array_equal(G.apply(x), G.apply(x, dense=True))


def test_block_column():
    G = BlockHadamard.from_seed(8, 20, 8)
    M = dense_block_hadamard(G)
    for j in range(20):
        rows, vals = G.column(j)
        col = np.zeros(G.padded_dim)
        col[rows] = vals
        np.testing.assert_allclose(col, M[:, j], atol=1e-15)


def test_block_requires_pow2():
    with pytest.raises(ValueError):
        BlockHadamard.from_seed(12, 24, 1)


def test_bucket_stats_single_coordinate():
    H = HashProjection.from_seed(8, 32, 2)
    x = np.zeros(32)
    x[0] = 1.0
    st = bucket_stats(H, x, 0.5)
    assert np.count_nonzero(st.sigmas) == 1 and st.sigmas.max() == 1.0
    assert (~st.good_flags).sum() == 1
    assert not st.good


def test_bucket_stats_zero():
    st = bucket_stats(HashProjection.from_seed(8, 32, 2), np.zeros(32), 0.1)
    assert not st.sigmas.any() and st.good


def test_bucket_stats_brute_force():
    H = HashProjection.from_seed(8, 32, 3)
    x = np.random.default_rng(6).standard_normal(32)
    st = bucket_stats(H, x, 0.2)
    want = np.zeros(8)
    for j in range(32):
        want[H.column_of(j)[0]] += x[j] ** 2
    np.testing.assert_allclose(st.sigmas, want, atol=1e-12)
    assert st.sigmas.sum() == pytest.approx(x @ x, rel=1e-12)
    np.testing.assert_array_equal(st.good_flags, want <= 0.2)
