"""Per-instance work units for the acceptance suite.

Every function here takes one picklable task tuple and returns a tuple of
CSV cells, so a criterion can be executed serially or on a process pool and
the resulting CSV compared byte-for-byte.
"""
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from threadpoolctl import threadpool_limits

from specmix.cornerhunt import successive_projection, svm_cone
from specmix.estimators import ideal_spacl, ideal_svmcone_dcmm, spacl, svmcone_dcmm
from specmix.io import fmt
from specmix.metrics import eigenspace_error, membership_error, spectral_deviation
from specmix.netmodels import (
    build_ptilde_standard,
    derive_seed,
    omega_dcmm,
    omega_mmsb,
    sample_adjacency,
    sample_membership,
    sample_theta,
)
from specmix.numlin import row_normalize, sym_eigen_topk

IDEAL_GRID = [(K, rho) for K in (2, 3) for rho in (0.2, 0.5)]


def _limited(args):
    fn, task = args
    with threadpool_limits(limits=1):
        return fn(task)


def pmap(fn, tasks, threads):
    """Ordered map, serial for ``threads == 1`` and a process pool otherwise."""
    jobs = [(fn, t) for t in tasks]
    if threads == 1:
        return [_limited(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_limited, jobs, chunksize=max(1, len(jobs) // (4 * threads))))


def to_csv(header, rows):
    lines = [",".join(header)]
    lines += [",".join(c if isinstance(c, str) else fmt(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


# ideal pipelines

def ideal_mmsb_instance(i):
    K, rho = IDEAL_GRID[i % len(IDEAL_GRID)]
    seed = derive_seed(101, i)
    Pi = sample_membership(200, K, 0.5, 1.0, seed=seed)
    pop = omega_mmsb(rho, build_ptilde_standard(K, 0.8), Pi)
    err = membership_error(ideal_spacl(pop, K).rows, Pi).max_l1_error
    return (i, K, rho, seed, err)


def ideal_dcmm_instance(i):
    K, rho = IDEAL_GRID[i % len(IDEAL_GRID)]
    seed = derive_seed(102, i)
    Pi = sample_membership(200, K, 0.5, 1.0, seed=derive_seed(seed, 0))
    theta = sample_theta(200, rho, 0.5, seed=derive_seed(seed, 1))
    pop = omega_dcmm(theta, build_ptilde_standard(K, 0.8), Pi)
    err = membership_error(ideal_svmcone_dcmm(pop, K, seed=seed).rows, Pi).max_l1_error
    return (i, K, rho, seed, err)


# deviation bounds

def deviation_trial(args):
    model, s = args
    n, K, rho = 500, 2, 0.1
    seed = derive_seed(103 if model == "mmsb" else 104, s)
    Pi = sample_membership(n, K, 0.5, 1.0, seed=derive_seed(seed, 0))
    P = build_ptilde_standard(K, 0.8)
    if model == "mmsb":
        pop = omega_mmsb(rho, P, Pi)
    else:
        pop = omega_dcmm(sample_theta(n, rho, 0.5, seed=derive_seed(seed, 1)), P, Pi)
    A = sample_adjacency(pop, derive_seed(seed, 2))
    r = spectral_deviation(A, pop, alpha=1.0)
    return (s, seed, r.spectral_dev, r.bound, r.ratio)


# model degeneracy

def degeneracy_population(s):
    rng = np.random.default_rng(derive_seed(105, s))
    n = int(rng.integers(20, 200))
    K = int(rng.integers(1, 5))
    rho = float(rng.uniform(0.05, 1.0))
    P = build_ptilde_standard(K, float(rng.uniform(0.1, 1.0)))
    Pi = sample_membership(n, K, float(rng.uniform()), float(rng.uniform(0.2, 3)),
                           seed=derive_seed(105, s, 1))
    a = omega_mmsb(rho, P, Pi).omega
    b = omega_dcmm(np.full(n, math.sqrt(rho)), P, Pi).omega
    return (s, n, K, rho, float(np.max(np.abs(a - b))))


def degeneracy_paired(s):
    n, K, rho = 400, 2, 0.5
    seed = derive_seed(106, s)
    Pi = sample_membership(n, K, 0.5, 1.0, seed=derive_seed(seed, 0))
    pop = omega_dcmm(np.full(n, math.sqrt(rho)), build_ptilde_standard(K, 0.9), Pi)
    A = sample_adjacency(pop, derive_seed(seed, 2))
    a = membership_error(spacl(A, K).rows, Pi)
    b = membership_error(svmcone_dcmm(A, K, seed=derive_seed(seed, 3)).rows, Pi)
    return (s, seed, a.max_l1_error, b.max_l1_error, a.mean_l1_error, b.mean_l1_error)


# oracle equivalences

def greedy_pair(s):
    rng = np.random.default_rng(derive_seed(107, s))
    K = int(rng.integers(2, 5))
    truth = rng.dirichlet(np.ones(K), 20)
    est = 0.8 * truth[:, rng.permutation(K)] + 0.2 * rng.dirichlet(np.ones(K), 20)
    g = membership_error(est, truth, method="greedy").max_l1_error
    e = membership_error(est, truth, method="exhaustive").max_l1_error
    return (s, K, g, e)


def eigenspace_case(s):
    rng = np.random.default_rng(derive_seed(108, s))
    n = int(rng.integers(3, 12))
    K = int(rng.integers(1, n))
    Uh = np.linalg.qr(rng.standard_normal((n, K)))[0]
    U = np.linalg.qr(rng.standard_normal((n, K)))[0]
    dense = float(np.max(np.linalg.norm(Uh @ Uh.T - U @ U.T, axis=1)))
    value = eigenspace_error(Uh, U, block=int(rng.integers(1, 5))).value
    return (s, n, K, value, dense, abs(value - dense))


def eigen_invariants(s):
    rng = np.random.default_rng(derive_seed(109, s))
    n = int(rng.integers(2, 60))
    K = int(rng.integers(1, n + 1))
    X = rng.standard_normal((n, n))
    M = (X + X.T) / 2
    values, V = sym_eigen_topk(M, K)
    scale = max(1.0, float(np.max(np.abs(values))))
    resid = float(np.max(np.linalg.norm(M @ V - V * values, axis=0))) / scale
    ortho = float(np.max(np.abs(V.T @ V - np.eye(K))))
    ordered = bool(np.all(np.diff(np.abs(values)) <= 1e-12))
    lead = np.abs(V).argmax(axis=0)
    signs = bool(np.all(V[lead, np.arange(K)] > 0))
    return (s, n, K, resid, ortho, ordered, signs)


# noiseless corner hunting

def sp_instance(s):
    rng = np.random.default_rng(derive_seed(110, s))
    r = int(rng.integers(2, 6))
    m = r + int(rng.integers(0, 4))
    V = rng.standard_normal((r, m))
    n = int(rng.integers(r, 80))
    Pi = np.vstack([np.eye(r), rng.dirichlet(np.ones(r), n)])
    order = rng.permutation(Pi.shape[0])
    Pi = Pi[order]
    Y = Pi @ V
    picked = successive_projection(Y, r)
    rows = Y[picked]
    dist = np.linalg.norm(rows[:, None] - V[None], axis=2)
    matched = len(set(dist.argmin(axis=1).tolist())) == r
    return (s, r, m, float(dist.min(axis=1).max()), matched)


def cone_instance(s):
    rng = np.random.default_rng(derive_seed(111, s))
    K = int(rng.integers(2, 6))
    Q, R = np.linalg.qr(rng.standard_normal((K, K)))
    V = Q * np.sign(np.diag(R))
    n = int(rng.integers(K, 120))
    W = np.vstack([np.eye(K), rng.dirichlet(np.ones(K), n)])
    W = W[rng.permutation(W.shape[0])]
    S, _ = row_normalize(W @ V)
    picked = svm_cone(S, K, seed=derive_seed(111, s, 1))
    dist = np.linalg.norm(S[picked][:, None] - V[None], axis=2)
    matched = len(set(dist.argmin(axis=1).tolist())) == K
    return (s, K, float(dist.min(axis=1).max()), matched)
