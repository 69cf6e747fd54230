import math

import numpy as np
import pytest

from specmix.errors import DegenerateRow, EstimationFailure
from specmix.estimators import _corner_inverse, ideal_spacl, ideal_svmcone_dcmm, spacl, svmcone_dcmm
from specmix.metrics import membership_error
from specmix.netmodels import (
    build_ptilde_offdiag,
    build_ptilde_standard,
    omega_dcmm,
    omega_mmsb,
    sample_adjacency,
    sample_membership,
    sample_theta,
)


def mmsb_instance(n, K, rho, omega, seed, frac_pure=0.5):
    Pi = sample_membership(n, K, frac_pure, 1.0, seed=seed)
    return omega_mmsb(rho, build_ptilde_standard(K, omega), Pi)


def dcmm_instance(n, K, rho, omega, seed, frac_pure=0.5, theta=None):
    Pi = sample_membership(n, K, frac_pure, 1.0, seed=seed)
    if theta is None:
        theta = sample_theta(n, rho, 0.5, seed=seed + 1000)
    return omega_dcmm(theta, build_ptilde_standard(K, omega), Pi)


def assert_rows_stochastic(rows):
    assert np.all(rows >= 0)
    assert np.max(np.abs(rows.sum(axis=1) - 1)) <= 1e-12


# ideal variants

@pytest.mark.parametrize("seed", range(8))
def test_ideal_spacl_exact(seed):
    pop = mmsb_instance(200, 3, 0.4, 0.7, seed)
    est = ideal_spacl(pop, 3)
    assert_rows_stochastic(est.rows)
    assert membership_error(est.rows, pop.membership).max_l1_error <= 1e-8


def test_ideal_spacl_vertex_only():
    pop = omega_mmsb(0.5, build_ptilde_standard(3, 0.5), np.eye(3))
    err = membership_error(ideal_spacl(pop, 3).rows, np.eye(3))
    assert err.max_l1_error <= 1e-12


def test_ideal_spacl_scale_invariance():
    pop = mmsb_instance(150, 3, 0.4, 0.6, seed=3)
    a = ideal_spacl(pop.omega, 3).rows
    b = ideal_spacl(0.5 * pop.omega, 3).rows
    assert np.max(np.abs(a - b)) <= 1e-10


@pytest.mark.parametrize("seed", range(8))
def test_ideal_svmcone_exact(seed):
    Pi = sample_membership(200, 3, 0.5, 1.0, seed=seed)
    pop = omega_dcmm(sample_theta(200, 0.4, seed=seed + 7), build_ptilde_offdiag(3, 1.3), Pi)
    est = ideal_svmcone_dcmm(pop, 3, seed=seed)
    assert_rows_stochastic(est.rows)
    assert est.n_negative_scale == 0
    assert membership_error(est.rows, Pi).max_l1_error <= 1e-6


def test_ideal_svmcone_all_pure():
    pop = dcmm_instance(120, 3, 0.4, 0.6, seed=1, frac_pure=1.0)
    est = ideal_svmcone_dcmm(pop, 3, seed=0)
    assert membership_error(est.rows, pop.membership).max_l1_error <= 1e-6
    assert np.allclose(est.rows.max(axis=1), 1.0, atol=1e-6)


def test_ideal_svmcone_scale_invariance():
    pop = dcmm_instance(150, 2, 0.4, 0.6, seed=5)
    a = ideal_svmcone_dcmm(pop.omega, 2, seed=0).rows
    b = ideal_svmcone_dcmm(0.3 * pop.omega, 2, seed=0).rows
    assert np.max(np.abs(a - b)) <= 1e-8


def test_ideal_svmcone_matches_spacl_for_constant_theta():
    rho = 0.3
    Pi = sample_membership(150, 3, 0.5, 1.0, seed=9)
    P = build_ptilde_standard(3, 0.7)
    a = ideal_spacl(omega_mmsb(rho, P, Pi), 3).rows
    b = ideal_svmcone_dcmm(omega_dcmm(np.full(150, math.sqrt(rho)), P, Pi), 3).rows
    perm = membership_error(b, a).permutation
    assert np.max(np.abs(b - a[:, list(perm)])) <= 1e-8


# sampled graphs

def test_spacl_two_cliques():
    A = np.zeros((20, 20), dtype=np.int8)
    A[:10, :10] = 1
    A[10:, 10:] = 1
    np.fill_diagonal(A, 0)
    rows = spacl(A, 2).rows
    truth = np.repeat(np.eye(2), 10, axis=0)
    assert membership_error(rows, truth).max_l1_error <= 1e-6


@pytest.mark.parametrize("estimator", ["spacl", "svmcone"])
def test_single_community(estimator):
    pop = mmsb_instance(50, 1, 0.5, 1.0, seed=0)
    A = sample_adjacency(pop, seed=1)
    est = spacl(A, 1) if estimator == "spacl" else svmcone_dcmm(A, 1, seed=0)
    assert np.array_equal(est.rows, np.ones((50, 1)))


def test_spacl_sampled_mmsb_accuracy():
    # Monte Carlo reference over 20 seeds: mean-l1 ranges 0.066-0.144,
    # max-l1 0.32-0.46 at this size
    for seed in range(5):
        pop = mmsb_instance(400, 2, 0.5, 0.9, seed)
        est = spacl(sample_adjacency(pop, seed=seed + 2000), 2)
        assert_rows_stochastic(est.rows)
        err = membership_error(est.rows, pop.membership)
        assert err.mean_l1_error < 0.15
        assert err.max_l1_error < 0.6


def test_svmcone_sampled_dcmm_accuracy():
    # Monte Carlo reference over 20 seeds: mean-l1 0.19-0.25 (mean 0.21),
    # max-l1 0.50-0.78 at this size
    errs = []
    for seed in range(5):
        pop = dcmm_instance(400, 2, 0.5, 0.9, seed)
        est = svmcone_dcmm(sample_adjacency(pop, seed=seed + 2000), 2, seed=seed)
        assert_rows_stochastic(est.rows)
        errs.append(membership_error(est.rows, pop.membership).mean_l1_error)
    assert np.mean(errs) < 0.25


@pytest.mark.slow
@pytest.mark.parametrize("estimator", ["spacl", "svmcone"])
def test_error_shrinks_with_n(estimator):
    def mean_err(n):
        out = []
        for seed in range(4):
            if estimator == "spacl":
                pop = mmsb_instance(n, 2, 0.5, 0.9, seed)
                est = spacl(sample_adjacency(pop, seed=seed + 2000), 2)
            else:
                pop = dcmm_instance(n, 2, 0.5, 0.9, seed)
                est = svmcone_dcmm(sample_adjacency(pop, seed=seed + 2000), 2, seed=seed)
            out.append(membership_error(est.rows, pop.membership).mean_l1_error)
        return np.mean(out)

    assert mean_err(1600) < mean_err(400)


def test_svmcone_isolated_node_named():
    pop = dcmm_instance(60, 2, 0.5, 0.9, seed=0)
    A = sample_adjacency(pop, seed=1)
    A[17, :] = 0
    A[:, 17] = 0
    with pytest.raises(DegenerateRow) as info:
        svmcone_dcmm(A, 2, seed=0)
    assert info.value.row == 17


def test_singular_corner_matrix_fails_with_corners():
    # eigenvector matrices always have full column rank, so build the
    # singular corner case directly
    corners = np.array([4, 9])
    with pytest.raises(EstimationFailure) as info:
        _corner_inverse(np.array([[1.0, 2.0], [2.0, 4.0]]), corners)
    assert info.value.corners.tolist() == [4, 9]


def test_estimates_deterministic():
    pop = dcmm_instance(200, 3, 0.5, 0.8, seed=4)
    A = sample_adjacency(pop, seed=5)
    a = svmcone_dcmm(A, 3, seed=2)
    b = svmcone_dcmm(A, 3, seed=2)
    assert np.array_equal(a.rows, b.rows)
    assert np.array_equal(spacl(A, 3).rows, spacl(A, 3).rows)


def test_diagnostics_recorded():
    pop = mmsb_instance(300, 3, 0.3, 0.6, seed=2)
    est = spacl(sample_adjacency(pop, seed=3), 3)
    assert len(est.corners) == 3 and len(set(est.corners.tolist())) == 3
    assert est.corner_cond >= 1.0
    assert 0 <= est.n_fallback <= est.n_clipped <= 300
    assert est.eigenvectors.shape == (300, 3)
