import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specmix.cornerhunt import _lloyd, kmeans, min_norm_point, successive_projection, svm_cone
from specmix.errors import ClusteringFailure, DegenerateCone, InvalidArgument, RankDeficientInput
from specmix.netmodels import build_ptilde_offdiag, omega_dcmm, sample_membership, sample_theta
from specmix.numlin import row_normalize, sym_eigen_topk


def random_rotation(rng, m):
    Q, R = np.linalg.qr(rng.standard_normal((m, m)))
    return Q * np.sign(np.diag(R))


def planted_cone(rng, K, n, reps=1):
    """Unit rows that are nonnegative mixtures of K orthonormal corners."""
    V = random_rotation(rng, K)
    W = np.vstack([np.repeat(np.eye(K), reps, axis=0), rng.dirichlet(np.ones(K), n)])
    S, _ = row_normalize(W @ V)
    return S, V


# successive projection

def test_sp_hand_example():
    Y = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
    assert successive_projection(Y, 2).tolist() == [0, 1]


def test_sp_basis_rows_with_duplicates():
    Y = np.array([[0, 0, 1], [1, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0]], float)
    picked = successive_projection(Y, 3)
    assert sorted(Y[picked].argmax(axis=1).tolist()) == [0, 1, 2]
    # lowest index wins each tie
    assert picked.tolist() == [0, 1, 3]


def test_sp_single_pick_is_max_norm():
    Y = np.array([[1.0, 1.0], [3.0, 0.0], [0.0, 2.0]])
    assert successive_projection(Y, 1).tolist() == [1]


def test_sp_rank_deficient():
    Y = np.array([[1.0, 2.0], [2.0, 4.0], [0.5, 1.0]])
    with pytest.raises(RankDeficientInput):
        successive_projection(Y, 2)
    with pytest.raises(InvalidArgument):
        successive_projection(Y, 3)


@pytest.mark.parametrize("seed", range(20))
def test_sp_exact_recovery_noiseless(seed):
    rng = np.random.default_rng(seed)
    r, m, n = 3, 5, 60
    V = rng.standard_normal((r, m))
    Pi = np.vstack([np.eye(r), rng.dirichlet(np.ones(r), n)])
    Pi = Pi[rng.permutation(Pi.shape[0])]
    picked = successive_projection(Pi @ V, r)
    pure = {int(np.flatnonzero(Pi[i] == 1)[0]) for i in picked if Pi[i].max() == 1}
    assert pure == set(range(r))


def test_sp_residual_norms_non_increasing(rng):
    Y = rng.standard_normal((30, 4))
    R = Y.copy()
    prev = np.linalg.norm(R, axis=1)
    for _ in range(4):
        k = int(np.argmax(np.linalg.norm(R, axis=1)))
        u = R[k] / np.linalg.norm(R[k])
        R -= np.outer(R @ u, u)
        cur = np.linalg.norm(R, axis=1)
        assert np.all(cur <= prev + 1e-12)
        prev = cur
    # the library path agrees with this reference execution
    assert successive_projection(Y, 4).size == 4


# min-norm point / one-class SVM

def test_mnp_single_row():
    sol = min_norm_point(np.array([[0.6, 0.8]]))
    assert np.allclose(sol.w, [0.6, 0.8])
    assert sol.b == pytest.approx(1.0)


def test_mnp_two_rows_midpoint():
    sol = min_norm_point(np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert np.allclose(sol.w, np.ones(2) / math.sqrt(2), atol=1e-12)
    assert sol.b == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_mnp_origin_in_hull():
    with pytest.raises(DegenerateCone):
        min_norm_point(np.array([[1.0, 0.0], [-1.0, 0.0]]))


@pytest.mark.parametrize("seed", range(10))
def test_mnp_feasibility_and_gap(seed):
    rng = np.random.default_rng(seed)
    S, _ = planted_cone(rng, 3, 80)
    sol = min_norm_point(S)
    margins = S @ sol.w
    assert np.linalg.norm(sol.w) == pytest.approx(1.0)
    assert np.all(margins >= sol.b - 1e-8)
    assert np.min(np.abs(margins - sol.b)) <= 1e-8
    assert sol.gap <= 1e-9


def test_mnp_orthonormal_corners_closed_form(rng):
    # min-norm point of K orthonormal vectors is their centroid
    S, V = planted_cone(rng, 4, 50)
    sol = min_norm_point(S)
    w = V.sum(axis=0) / 2.0
    assert np.allclose(sol.w, w, atol=1e-8)
    assert sol.b == pytest.approx(0.5, abs=1e-8)


# k-means

def test_kmeans_forced_bijection():
    X = np.array([[0.0, 0.0], [5.0, 1.0], [2.0, 7.0]])
    labels, centers = kmeans(X, 3, seed=0)
    assert sorted(labels.tolist()) == [0, 1, 2]
    assert np.allclose(centers[labels], X)


def test_kmeans_duplicated_pairs():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [9.0, 9.0], [9.0, 9.0]])
    labels, centers = kmeans(X, 2, seed=1)
    assert labels[0] == labels[1] != labels[2] == labels[3]
    assert np.allclose(centers[labels], X)


def test_kmeans_matches_voronoi_oracle():
    rng = np.random.default_rng(17)
    truth = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    X = truth[rng.integers(0, 3, 100)] + rng.standard_normal((100, 2))
    voronoi = np.argmin(((X[:, None] - truth[None]) ** 2).sum(-1), axis=1)
    labels, _ = kmeans(X, 3, seed=5)
    # map each learned label to the planted center it mostly covers
    mapping = {k: np.bincount(voronoi[labels == k], minlength=3).argmax() for k in range(3)}
    agree = sum(mapping[l] == v for l, v in zip(labels, voronoi))
    assert agree >= 99


def test_kmeans_errors():
    with pytest.raises(InvalidArgument):
        kmeans(np.zeros((2, 2)), 3, seed=0)
    with pytest.raises(ClusteringFailure):
        kmeans(np.zeros((5, 2)), 2, seed=0)


def test_kmeans_deterministic(rng):
    X = rng.standard_normal((60, 3))
    a = kmeans(X, 4, seed=3)
    b = kmeans(X, 4, seed=3)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(2, 5))
def test_lloyd_objective_non_increasing(seed, K):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((40, 2))
    init = X[rng.choice(40, K, replace=False)]
    _, _, history = _lloyd(X, init)
    assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))


# svm cone

def test_svm_cone_duplicated_orthonormal_corners():
    V = np.eye(3)
    S = np.repeat(V, 4, axis=0)
    picked = svm_cone(S, 3, seed=0)
    assert sorted(S[picked].argmax(axis=1).tolist()) == [0, 1, 2]


def test_svm_cone_single_cluster():
    rng = np.random.default_rng(2)
    S, _ = planted_cone(rng, 3, 30)
    sol = min_norm_point(S)
    assert svm_cone(S, 1, seed=0).tolist() == [int(np.argmin(S @ sol.w))]


@pytest.mark.parametrize("seed", range(10))
def test_svm_cone_planted_corners(seed):
    rng = np.random.default_rng(100 + seed)
    K = 2 + seed % 3
    S, V = planted_cone(rng, K, 100, reps=2)
    picked = svm_cone(S, K, seed=seed)
    dist = np.linalg.norm(S[picked][:, None] - V[None], axis=2)
    assert np.all(dist.min(axis=1) <= 1e-8)
    assert len(set(dist.argmin(axis=1).tolist())) == K


@pytest.mark.parametrize("seed", range(5))
def test_svm_cone_ideal_dcmm_rows(seed):
    n, K = 150, 3
    Pi = sample_membership(n, K, 0.5, 1.0, seed=seed)
    pop = omega_dcmm(sample_theta(n, 0.3, seed=seed + 50), build_ptilde_offdiag(K, 1.4), Pi)
    U = sym_eigen_topk(pop.omega, K).vectors
    S, _ = row_normalize(U)
    picked = svm_cone(S, K, seed=seed)
    truth = S[:K]  # rows 0..K-1 are the pinned pure nodes
    dist = np.linalg.norm(S[picked][:, None] - truth[None], axis=2)
    assert np.all(dist.min(axis=1) <= 1e-8)
    assert len(set(dist.argmin(axis=1).tolist())) == K


def test_svm_cone_permutation_stability():
    rng = np.random.default_rng(8)
    S, _ = planted_cone(rng, 3, 60)
    perm = rng.permutation(S.shape[0])
    a = S[svm_cone(S, 3, seed=1)]
    b = S[perm][svm_cone(S[perm], 3, seed=1)]
    key = lambda M: M[np.lexsort(M.T[::-1])]
    assert np.allclose(key(a), key(b), atol=1e-12)


def test_svm_cone_errors():
    with pytest.raises(InvalidArgument):
        svm_cone(np.eye(2), 3, seed=0)
    with pytest.raises(DegenerateCone):
        svm_cone(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]), 2, seed=0)
