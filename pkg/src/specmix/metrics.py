"""Error metrics and per-instance diagnostics."""
from __future__ import annotations

import itertools
import math
from typing import NamedTuple

import numpy as np

from .errors import InvalidArgument
from .netmodels import Population
from .numlin import spectral_norm, sym_eigen_topk

__all__ = [
    "ErrorReport",
    "EigenspaceReport",
    "DeviationReport",
    "membership_error",
    "eigenspace_error",
    "bernstein_constant",
    "spectral_deviation",
    "is_connected",
    "instance_diagnostics",
]

EXHAUSTIVE_MAX_K = 8


class ErrorReport(NamedTuple):
    """Permutation-matched max-l1 membership error.

    ``permutation[k]`` is the column of the truth matched to column ``k`` of
    the estimate. ``exact`` is False when the greedy matcher was used.
    """

    max_l1_error: float
    permutation: tuple
    per_node: np.ndarray
    exact: bool = True

    @property
    def mean_l1_error(self):
        return float(np.mean(self.per_node))


class EigenspaceReport(NamedTuple):
    value: float
    context: dict


class DeviationReport(NamedTuple):
    spectral_dev: float
    bound: float
    ratio: float


def _row_l1(est, truth, perm):
    return np.abs(est - truth[:, list(perm)]).sum(axis=1)


def _exhaustive(est, truth):
    K = est.shape[1]
    best_val, best_perm = np.inf, None
    for perm in itertools.permutations(range(K)):
        val = float(np.max(_row_l1(est, truth, perm)))
        if val < best_val:
            best_val, best_perm = val, perm
    return best_perm


def _greedy(est, truth):
    K = est.shape[1]
    cost = np.abs(est[:, :, None] - truth[:, None, :]).sum(axis=0)
    order = np.argsort(cost, axis=None, kind="stable")
    perm = [-1] * K
    used_est, used_truth = set(), set()
    for flat in order:
        a, b = divmod(int(flat), K)
        if a in used_est or b in used_truth:
            continue
        perm[a] = b
        used_est.add(a)
        used_truth.add(b)
        if len(used_est) == K:
            break
    return tuple(perm)


def membership_error(est, truth, method="auto"):
    """``min_P max_i ||est[i] - (truth @ P)[i]||_1`` over column permutations.

    Parameters
    ----------
    est, truth : array_like, shape (n, K)
    method : {"auto", "exhaustive", "greedy"}
        ``auto`` searches all K! permutations for K <= 8 and otherwise
        matches columns greedily by summed absolute difference.
    """
    est = np.asarray(est, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if est.shape != truth.shape or est.ndim != 2:
        raise InvalidArgument(f"shape mismatch: {est.shape} vs {truth.shape}")
    if method == "auto":
        method = "exhaustive" if est.shape[1] <= EXHAUSTIVE_MAX_K else "greedy"
    if method == "exhaustive":
        perm = _exhaustive(est, truth)
    elif method == "greedy":
        perm = _greedy(est, truth)
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    per_node = _row_l1(est, truth, perm)
    return ErrorReport(float(per_node.max()), tuple(int(p) for p in perm), per_node,
                       method == "exhaustive")


def eigenspace_error(U_hat, U, context=None, block=256):
    """Row-wise projector distance ``max_i ||(U_hat U_hat' - U U')[i, :]||_2``.

    Evaluated in row blocks so the n x n difference is never held in memory.
    """
    U_hat = np.asarray(U_hat, dtype=float)
    U = np.asarray(U, dtype=float)
    if U_hat.shape != U.shape:
        raise InvalidArgument(f"shape mismatch: {U_hat.shape} vs {U.shape}")
    K = U.shape[1]
    for name, X in (("U_hat", U_hat), ("U", U)):
        if np.max(np.abs(X.T @ X - np.eye(K))) > 1e-8:
            raise InvalidArgument(f"{name} does not have orthonormal columns")
    n = U.shape[0]
    worst = 0.0
    for start in range(0, n, block):
        stop = min(start + block, n)
        D = U_hat[start:stop] @ U_hat.T - U[start:stop] @ U.T
        worst = max(worst, float(np.max(np.linalg.norm(D, axis=1))))
    return EigenspaceReport(worst, dict(context or {}))


def bernstein_constant(alpha):
    """``(alpha + 1 + sqrt((alpha + 1)(alpha + 19))) / 3``."""
    if alpha <= 0:
        raise InvalidArgument(f"alpha must be positive, got {alpha}")
    return (alpha + 1 + math.sqrt((alpha + 1) * (alpha + 19))) / 3


def deviation_bound(pop, alpha):
    """High-probability bound on ``||A - Omega||`` for the model behind ``pop``."""
    n = pop.n
    if pop.model == "mmsb":
        radicand = pop.rho * n
    elif pop.model == "dcmm":
        radicand = float(pop.ptilde.max()) * pop.theta.max() * pop.theta.sum()
    else:
        raise InvalidArgument(f"unknown model {pop.model!r}")
    return bernstein_constant(alpha) * math.sqrt(radicand * math.log(n))


def spectral_deviation(A, pop, alpha=1.0):
    """Measured ``||A - Omega||`` against its model bound."""
    A = np.asarray(A, dtype=float)
    if not isinstance(pop, Population):
        raise InvalidArgument("pop must be a Population (the bound depends on the model)")
    if A.shape != pop.omega.shape:
        raise InvalidArgument(f"shape mismatch: {A.shape} vs {pop.omega.shape}")
    dev = spectral_norm(A - pop.omega)
    bound = deviation_bound(pop, alpha)
    if bound > 0:
        ratio = dev / bound
    else:
        ratio = 0.0 if dev == 0 else math.inf
    return DeviationReport(dev, bound, ratio)


def is_connected(A):
    """Whether the graph with adjacency ``A`` has a single connected component."""
    A = np.asarray(A)
    n = A.shape[0]
    if n <= 1:
        return True
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    components = n
    rows, cols = np.nonzero(np.triu(A, k=1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            components -= 1
            if components == 1:
                return True
    return components == 1


def instance_diagnostics(Pi, ptilde, rho=None, theta=None):
    """Scalars that drive the error bounds of a generated instance.

    Returns a dict with ``sigma_k_p``, ``lambda_k_gram``, ``lambda_1_gram``,
    ``kappa_gram``, ``pi_min``, ``sigma_k_omega`` and, under DCMM,
    ``theta_max``, ``theta_min``, ``theta_l1``.
    """
    Pi = np.asarray(Pi, dtype=float)
    P = np.atleast_2d(np.asarray(ptilde, dtype=float))
    K = P.shape[0]
    sigma_p = np.abs(sym_eigen_topk(P, K).values)
    gram = Pi.T @ Pi
    lam = np.abs(sym_eigen_topk(gram, K).values)
    out = {
        "sigma_k_p": float(sigma_p[-1]),
        "lambda_k_gram": float(lam[-1]),
        "lambda_1_gram": float(lam[0]),
        "kappa_gram": float(lam[0] / lam[-1]) if lam[-1] > 0 else math.inf,
        "pi_min": float(Pi.sum(axis=0).min()),
        "theta_max": None,
        "theta_min": None,
        "theta_l1": None,
    }
    if theta is not None:
        theta = np.asarray(theta, dtype=float)
        B = theta[:, None] * Pi
        out.update(theta_max=float(theta.max()), theta_min=float(theta.min()),
                   theta_l1=float(theta.sum()))
    elif rho is not None:
        B = math.sqrt(rho) * Pi
    else:
        B = None
    if B is not None:
        # nonzero spectrum of B P B' equals that of G^(1/2) P G^(1/2), G = B'B
        w, V = np.linalg.eigh(B.T @ B)
        root = (V * np.sqrt(np.maximum(w, 0.0))) @ V.T
        core = root @ P @ root
        core = (core + core.T) / 2
        out["sigma_k_omega"] = float(np.abs(sym_eigen_topk(core, K).values)[-1])
    else:
        out["sigma_k_omega"] = None
    return out
