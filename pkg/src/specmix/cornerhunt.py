"""
Vertex hunting on rows of eigenvector matrices.

``successive_projection`` finds simplex vertices; ``svm_cone`` finds the
extreme rays of a cone of unit vectors by locating the supporting hyperplane
closest to the origin and clustering the rows that sit on it.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import (
    ClusteringFailure,
    CornerFailure,
    DegenerateCone,
    InvalidArgument,
    RankDeficientInput,
)
from .netmodels import make_rng

__all__ = [
    "SvmSolution",
    "successive_projection",
    "min_norm_point",
    "kmeans",
    "svm_cone",
]

FW_MAX_ITER = 50_000
FW_GAP = 1e-9
POLISH_EVERY = 25
MARGIN_TOL = 1e-9
DISTINCT_TOL = 1e-8


class SvmSolution(NamedTuple):
    """Supporting hyperplane ``{x : w.x = b}`` with every row on the far side."""

    w: np.ndarray
    b: float
    gap: float
    iterations: int


def successive_projection(Y, r):
    """Pick ``r`` rows of ``Y`` by greedy max-norm selection and projection.

    Each step takes the row with the largest residual norm (lowest index on
    ties) and projects every residual onto its orthogonal complement.

    Returns
    -------
    ndarray of int, shape (r,)
        Selected row indices in selection order.

    Raises
    ------
    RankDeficientInput
        If all residuals vanish before ``r`` rows are chosen.
    """
    R = np.array(Y, dtype=float, copy=True)
    if R.ndim != 2:
        raise InvalidArgument("Y must be a 2-D array")
    n, m = R.shape
    r = int(r)
    if not 1 <= r <= min(n, m):
        raise InvalidArgument(f"r={r} must satisfy 1 <= r <= min(n, m) = {min(n, m)}")
    scale = float(np.max(np.linalg.norm(R, axis=1)))
    floor = 1e-12 * max(scale, np.finfo(float).tiny)
    picked = []
    for _ in range(r):
        norms = np.linalg.norm(R, axis=1)
        k = int(np.argmax(norms))
        if norms[k] <= floor:
            raise RankDeficientInput(
                f"residual vanished after {len(picked)} of {r} selections"
            )
        u = R[k] / norms[k]
        R -= np.outer(R @ u, u)
        picked.append(k)
    return np.array(picked, dtype=int)


def _affine_min_norm(P):
    """Min-norm point of the affine hull of the rows of ``P`` (barycentric weights)."""
    q = P.shape[0]
    G = P @ P.T
    kkt = np.zeros((q + 1, q + 1))
    kkt[:q, :q] = G
    kkt[:q, q] = 1.0
    kkt[q, :q] = 1.0
    rhs = np.zeros(q + 1)
    rhs[q] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    return sol[:q]


def _dedupe(X, tol):
    """Indices of a maximal subset of rows pairwise farther apart than ``tol``."""
    keep = []
    for i in range(X.shape[0]):
        if not keep or np.min(np.linalg.norm(X[keep] - X[i], axis=1)) > tol:
            keep.append(i)
    return np.array(keep, dtype=int)


def min_norm_point(X, max_iter=FW_MAX_ITER, tol=FW_GAP):
    """Hard-margin one-class SVM through the minimum-norm point of conv(rows).

    Away-step Frank-Wolfe with exact line search; every ``POLISH_EVERY``
    iterations the active set is tried as an affine subproblem, which makes
    the solve exact once the correct face is identified.

    Returns
    -------
    SvmSolution
        ``w = v / ||v||`` for the minimum-norm point ``v`` and
        ``b = min_i w . x_i``.

    Raises
    ------
    DegenerateCone
        If the hull contains the origin.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise InvalidArgument("X must be a non-empty 2-D array")
    q = X.shape[0]
    lam = np.zeros(q)
    lam[0] = 1.0
    v = X[0].copy()
    gap = np.inf
    it = 0

    def dual_gap(v):
        return float(v @ v - np.min(X @ v))

    for it in range(1, max_iter + 1):
        vv = float(v @ v)
        if vv < 1e-20:
            raise DegenerateCone("the convex hull of the rows contains the origin")
        s = X @ v
        i_fw = int(np.argmin(s))
        gap = vv - float(s[i_fw])
        if gap <= tol:
            break

        if it % POLISH_EVERY == 0:
            active = np.flatnonzero(lam > 0)
            sub = active[_dedupe(X[active], DISTINCT_TOL)]
            mu = _affine_min_norm(X[sub])
            if np.all(mu >= -1e-14):
                mu = np.clip(mu, 0.0, None)
                mu /= mu.sum()
                v_new = mu @ X[sub]
                if dual_gap(v_new) < gap:
                    lam[:] = 0.0
                    lam[sub] = mu
                    v = v_new
                    continue

        active = np.flatnonzero(lam > 0)
        i_away = int(active[np.argmax(s[active])])
        away_gap = float(s[i_away]) - vv
        if gap >= away_gap or lam[i_away] >= 1.0:
            d = X[i_fw] - v
            step_max = 1.0
            fw_step = True
        else:
            d = v - X[i_away]
            step_max = lam[i_away] / (1.0 - lam[i_away])
            fw_step = False
        dd = float(d @ d)
        if dd == 0.0:
            break
        step = min(max(-float(v @ d) / dd, 0.0), step_max)
        if fw_step:
            lam *= 1.0 - step
            lam[i_fw] += step
        else:
            lam *= 1.0 + step
            lam[i_away] -= step
            if step == step_max:
                lam[i_away] = 0.0
        lam[lam < 1e-300] = 0.0
        v = lam @ X

    norm = float(np.linalg.norm(v))
    if norm < 1e-10:
        raise DegenerateCone("the convex hull of the rows contains the origin")
    w = v / norm
    b = float(np.min(X @ w))
    return SvmSolution(w, b, float(max(dual_gap(v), 0.0)), it)


def _kmeanspp(X, K, rng):
    q = X.shape[0]
    centers = np.empty((K, X.shape[1]))
    centers[0] = X[rng.integers(q)]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for k in range(1, K):
        total = d2.sum()
        if total <= 0:
            return None
        idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
        idx = min(idx, q - 1)
        centers[k] = X[idx]
        d2 = np.minimum(d2, np.sum((X - centers[k]) ** 2, axis=1))
    return centers


def _sq_dists(X, C):
    return np.sum((X[:, None, :] - C[None, :, :]) ** 2, axis=2)


def _lloyd(X, centers, max_iter=300):
    """Lloyd iterations; returns labels, centers, inertia history (None if a cluster empties)."""
    K = centers.shape[0]
    history = []
    labels = None
    for _ in range(max_iter):
        d = _sq_dists(X, centers)
        new_labels = np.argmin(d, axis=1)
        history.append(float(d[np.arange(X.shape[0]), new_labels].sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=K)
        if np.any(counts == 0):
            return None, None, history
        centers = np.stack([X[labels == k].mean(axis=0) for k in range(K)])
    d = _sq_dists(X, centers)
    labels = np.argmin(d, axis=1)
    if np.any(np.bincount(labels, minlength=K) == 0):
        return None, None, history
    return labels, centers, history


def kmeans(X, K, seed, n_init=10, max_iter=300):
    """k-means++ seeded Lloyd clustering, best of ``n_init`` restarts.

    Returns
    -------
    labels : ndarray of int, shape (q,)
    centers : ndarray, shape (K, m)

    Raises
    ------
    InvalidArgument
        If there are fewer rows than clusters.
    ClusteringFailure
        If every restart ends with an empty cluster.
    """
    X = np.asarray(X, dtype=float)
    q = X.shape[0]
    K = int(K)
    if K < 1 or q < K:
        raise InvalidArgument(f"need 1 <= K <= q, got q={q}, K={K}")
    rng = make_rng(seed)
    best = None
    for _ in range(n_init):
        init = _kmeanspp(X, K, rng)
        if init is None:
            continue
        labels, centers, history = _lloyd(X, init, max_iter)
        if labels is None:
            continue
        inertia = float(np.sum((X - centers[labels]) ** 2))
        if best is None or inertia < best[0]:
            best = (inertia, labels, centers)
    if best is None:
        raise ClusteringFailure(f"all {n_init} restarts produced an empty cluster")
    return best[1], best[2]


def svm_cone(S, K, seed):
    """Corner rows of a cone of unit vectors.

    Candidates are the rows within ``gamma`` of the supporting hyperplane;
    ``gamma`` climbs through the observed margins until the candidates hold
    ``K`` distinct points that k-means splits into ``K`` clusters. Each
    cluster contributes its lowest-margin row.

    Returns
    -------
    ndarray of int, shape (K,)
        Row indices, ordered by cluster label.
    """
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    K = int(K)
    if K < 1 or n < K:
        raise InvalidArgument(f"need 1 <= K <= n, got n={n}, K={K}")
    sol = min_norm_point(S)
    margins = S @ sol.w - sol.b

    order = np.argsort(margins, kind="stable")
    levels = []
    for value in margins[order]:
        if not levels or value > levels[-1] + MARGIN_TOL:
            levels.append(float(value))

    for level in levels:
        cand = np.flatnonzero(margins <= level + MARGIN_TOL)
        if cand.size < K:
            continue
        if _dedupe(S[cand], DISTINCT_TOL).size < K:
            continue
        try:
            labels, _ = kmeans(S[cand], K, seed)
        except ClusteringFailure:
            continue
        corners = []
        for k in range(K):
            members = cand[labels == k]
            # lexsort: margin first, then index
            corners.append(int(members[np.lexsort((members, margins[members]))[0]]))
        return np.array(corners, dtype=int)
    raise CornerFailure(f"no margin level produced {K} distinct clusters")
