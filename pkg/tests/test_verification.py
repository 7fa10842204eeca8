import itertools
import math

import numpy as np
import pytest

from sparsejl.hashing import HashProjection
from sparsejl.params import derive_params
from sparsejl.preconditioners import BlockHadamard, ReplicationPlan, fwht_in_place
from sparsejl.transforms import HadamardPreconditionError, SparseJL
from sparsejl.vectors import SparseVector
from sparsejl.verification import (DistortionReport, OracleCapExceeded, _infnorm_trials, bucket_z_values,
                                   column_supports, dense_matrix_of, estimate_failure_rate, family_vector,
                                   goodness_rate, infnorm_tail_rate, l1_property_check, max_column_intersection,
                                   max_intersection)


@pytest.fixture(scope="module")
def small():
    return derive_params(0.5, 0.05, 16)


# dense oracles

def test_dense_h_one_sign_per_column():
    M = dense_matrix_of(HashProjection.from_seed(2, 4, 1))
    assert M.shape == (2, 4)
    assert np.all((M != 0).sum(axis=0) == 1)
    assert set(np.abs(M[M != 0])) == {1.0}


def test_dense_phi_columns_from_replica_lists():
    t = SparseJL(4, 3, 4, 2)
    M = dense_matrix_of(t)
    for j in range(4):
        rows, signs = t.replica_columns(j)
        assert rows.size == 3
        want = np.zeros(4)
        np.add.at(want, rows, signs)
        np.testing.assert_allclose(M[:, j] * math.sqrt(3), want, atol=1e-14)


def test_dense_g_equals_fwht_of_dx():
    G = BlockHadamard.from_seed(8, 8, 3)
    x = np.random.default_rng(0).standard_normal(8)
    D = G.diag_src.signs(np.arange(8))
    np.testing.assert_allclose(dense_matrix_of(G) @ x, fwht_in_place(D * x), atol=1e-12)


def test_dense_cap():
    with pytest.raises(OracleCapExceeded):
        dense_matrix_of(HashProjection.from_seed(2, 300, 1))
    with pytest.raises(OracleCapExceeded):
        column_supports(SparseJL(4, 2, 300, 1))
    with pytest.raises(TypeError):
        dense_matrix_of(object())


# distortion harness

def test_zero_vector_trials_skipped(small):
    r = estimate_failure_rate(small, "phi", 1, "zero")
    assert (r.trials, r.failures, r.skipped, r.successes) == (1, 0, 1, 0)


def test_report_accounting(small):
    r = estimate_failure_rate(small, "phi", 50, "sphere")
    assert r.skipped + r.failures + r.successes == r.trials
    assert 0 <= r.empirical_rate <= 1
    assert r.bound == pytest.approx(0.2)


def test_report_deterministic(small):
    assert estimate_failure_rate(small, "phi", 30, "heavy") == estimate_failure_rate(small, "phi", 30, "heavy")


def test_invalid_family_and_path(small):
    with pytest.raises(ValueError):
        estimate_failure_rate(small, "phi", 5, "banana")
    with pytest.raises(ValueError):
        estimate_failure_rate(small, "teleport", 5, "sphere")
    with pytest.raises(ValueError):
        estimate_failure_rate(small, "h", 5, "sphere")
    with pytest.raises(ValueError):
        estimate_failure_rate(small, "phi", 0, "sphere")


def test_h_path_flat_family():
    p = derive_params(0.5, 0.05, 8)
    r = estimate_failure_rate(p, "h", 20, "flat")
    assert r.trials == 20 and r.skipped == 0


def test_hg_path_needs_dimension(small):
    with pytest.raises(HadamardPreconditionError):
        estimate_failure_rate(small, "hg", 5, "sphere")


def test_family_vectors_unit():
    rng = np.random.default_rng(1)
    for fam in ("sphere", "e1", "heavy"):
        assert np.linalg.norm(family_vector(fam, 100, rng)) == pytest.approx(1.0)
    h = family_vector("heavy", 100, rng)
    assert h[0] ** 2 == pytest.approx(0.5)


def test_report_record_fields(small):
    text = estimate_failure_rate(small, "phi", 3, "e1").to_record()
    assert "empirical_rate=" in text and "params.k=144" in text and "passed=" in text


# goodness and infinity-norm tails

def test_goodness_trials_zero_is_error(small):
    with pytest.raises(ValueError):
        goodness_rate(small, 0)


def test_replicated_unit_infnorm_bound():
    rng = np.random.default_rng(2)
    plan = ReplicationPlan(49, 30)
    for _ in range(20):
        u = family_vector("sphere", 30, rng)
        assert np.abs(plan.replicate(u)).max() <= 1 / 7 + 1e-15


def test_goodness_small_run(small):
    r = goodness_rate(small, 5)
    assert r.trials == 5 and r.bound == 0.05


def test_infnorm_spread_vector_rate_zero():
    b, d, c = 16, 1024, 4
    x = SparseVector.from_dense(np.full(d, 1 / math.sqrt(d)))
    hits, worst = _infnorm_trials(b, d, c, x, 200, 7)
    assert hits == 0 and worst <= 1 / math.sqrt(c)


def test_infnorm_deterministic():
    b, d, c = 16, 64, 4
    x = SparseVector(d, np.array([0]), np.array([1.0]))
    assert _infnorm_trials(b, d, c, x, 50, 3) == _infnorm_trials(b, d, c, x, 50, 3)


def test_infnorm_precondition(small):
    with pytest.raises(HadamardPreconditionError):
        infnorm_tail_rate(small, 5, np.eye(16)[0])


def test_infnorm_requires_unit():
    p = derive_params(0.9, 0.09, 1 << 18)
    x = np.zeros(p.d)
    x[0] = 2.0
    with pytest.raises(ValueError):
        infnorm_tail_rate(p, 1, x)


# Z values

def test_z_values_e1_zero():
    H = HashProjection.from_seed(8, 32, 4)
    assert not bucket_z_values(H, [(0, 1.0)]).any()


def test_z_identity_small():
    H = HashProjection.from_seed(4, 16, 5)
    x = np.random.default_rng(3).standard_normal(16)
    y = H.apply_sparse(SparseVector.from_dense(x))
    assert bucket_z_values(H, x).sum() == pytest.approx(y @ y - x @ x, abs=1e-10)


def test_z_mean_zero_over_seeds():
    x = np.random.default_rng(4).standard_normal(16)
    x /= np.linalg.norm(x)
    z = np.array([bucket_z_values(HashProjection.from_seed(4, 16, s), x)[0] for s in range(10_000)])
    assert abs(z.mean()) <= 3 * z.std() / math.sqrt(z.size)


# column intersection

def test_column_intersection_brute_force():
    t = SparseJL(64, 4, 32, 6)
    rep = max_column_intersection(t, 10**6, 0.5)
    brute = 0
    for i, j in itertools.combinations(range(32), 2):
        ri = {int(t.H_prime.column_of(i * 4 + r)[0]) for r in range(4)}
        rj = {int(t.H_prime.column_of(j * 4 + r)[0]) for r in range(4)}
        brute = max(brute, len(ri & rj))
    assert rep.pairs_sampled == 32 * 31 // 2
    assert rep.max_intersection == brute <= 4
    assert rep.threshold_z == pytest.approx(16 * 0.25 * 16)


def test_column_intersection_sampled_is_reproducible():
    t = SparseJL(64, 4, 32, 6)
    assert max_column_intersection(t, 50, 0.5, seed=1) == max_column_intersection(t, 50, 0.5, seed=1)
    assert max_column_intersection(t, 50, 0.5).pairs_sampled == 50


def test_intersection_edge_cases():
    assert max_intersection([frozenset({1, 2}), frozenset({3, 4})], [(0, 1)]) == 0
    s = frozenset({1, 5, 9})
    assert max_intersection([s, s], [(0, 1)]) == 3


# l1 report

def test_l1_property_check_runs():
    r = l1_property_check(derive_params(0.5, 0.05, 16), 20)
    assert r.trials == 20 and r.mean_theory <= 1 + 1e-12
    assert "report=l1" in r.to_record()


def test_distortion_report_pass_logic():
    assert DistortionReport("x", 10, 2, 0, 0.2).passed
    assert not DistortionReport("x", 10, 3, 0, 0.2).passed
