"""
Spectral mixed-membership estimators.

``spacl``          MMSB: eigenvectors -> successive projection -> corner inverse.
``svmcone_dcmm``   DCMM: row-normalized eigenvectors -> cone corners -> degree
                   rescaling of the corner inverse.

The ``ideal_*`` variants run the same pipeline on the population matrix and
recover the membership matrix exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cornerhunt import successive_projection, svm_cone
from .errors import EstimationFailure, IllConditioned, RankDeficientInput
from .netmodels import Population
from .numlin import invert_small, row_normalize, sym_eigen_topk

__all__ = [
    "MembershipEstimate",
    "spacl",
    "ideal_spacl",
    "svmcone_dcmm",
    "ideal_svmcone_dcmm",
]


@dataclass
class MembershipEstimate:
    """Estimated membership rows plus what the pipeline had to patch up.

    ``n_clipped`` counts rows that lost at least one negative entry to
    ``max(0, .)``; ``n_fallback`` counts rows that were entirely clipped and
    replaced by the uniform vector; ``n_negative_scale`` counts negative
    diagonal entries of the degree-rescaling matrix set to zero (DCMM only).
    """

    rows: np.ndarray
    corners: np.ndarray
    corner_cond: float
    n_clipped: int = 0
    n_fallback: int = 0
    n_negative_scale: int = 0
    eigenvalues: np.ndarray = field(default=None, repr=False)
    eigenvectors: np.ndarray = field(default=None, repr=False)


def _matrix(M):
    return M.omega if isinstance(M, Population) else np.asarray(M, dtype=float)


def _normalize_rows(Z):
    """Clip negatives and scale each row to unit l1 norm (uniform if nothing is left)."""
    K = Z.shape[1]
    n_clipped = int(np.sum(np.any(Z < 0, axis=1)))
    Z = np.maximum(Z, 0.0)
    sums = Z.sum(axis=1)
    dead = sums <= 0
    Z[dead] = 1.0
    sums[dead] = K
    return Z / sums[:, None], n_clipped, int(dead.sum())


def _corner_inverse(C, corners):
    try:
        inv = invert_small(C)
    except IllConditioned as exc:
        raise EstimationFailure(f"corner matrix is ill-conditioned: {exc}", corners) from exc
    return inv, float(np.linalg.cond(C))


def spacl(A, K):
    """SPACL membership estimate from an adjacency (or any symmetric) matrix.

    Parameters
    ----------
    A : array_like, shape (n, n)
    K : int
        Number of communities.

    Returns
    -------
    MembershipEstimate

    Raises
    ------
    EstimationFailure
        If successive projection degenerates or the corner matrix is singular.
    """
    M = _matrix(A)
    eig = sym_eigen_topk(M, K)
    U = eig.vectors
    try:
        corners = successive_projection(U, K)
    except RankDeficientInput as exc:
        raise EstimationFailure(str(exc)) from exc
    inv, cond = _corner_inverse(U[corners], corners)
    rows, n_clipped, n_fallback = _normalize_rows(U @ inv)
    return MembershipEstimate(
        rows, corners, cond, n_clipped, n_fallback,
        eigenvalues=eig.values, eigenvectors=U,
    )


def ideal_spacl(omega, K):
    """SPACL run on the population matrix; returns the true membership up to column order."""
    return spacl(_matrix(omega), K)


def svmcone_dcmm(A, K, seed=0):
    """SVM-cone-DCMMSB membership estimate.

    Rows of the top-K eigenvectors are normalized, cone corners are located
    with :func:`svm_cone`, and the corner inverse is rescaled by the square
    root of the diagonal of ``U*[I] @ diag(values) @ U*[I].T`` before the
    nonnegative l1 normalization.

    Raises
    ------
    DegenerateRow
        If some node has an all-zero eigenvector row (an isolated node).
    EstimationFailure
        If the corner matrix is singular.
    """
    M = _matrix(A)
    eig = sym_eigen_topk(M, K)
    U = eig.vectors
    U_star, _ = row_normalize(U)
    corners = svm_cone(U_star, K, seed)
    C = U_star[corners]
    inv, cond = _corner_inverse(C, corners)
    scale2 = np.einsum("ik,k,ik->i", C, eig.values, C)
    n_negative = int(np.sum(scale2 < 0))
    J = np.sqrt(np.maximum(scale2, 0.0))
    rows, n_clipped, n_fallback = _normalize_rows((U @ inv) * J)
    return MembershipEstimate(
        rows, corners, cond, n_clipped, n_fallback, n_negative,
        eigenvalues=eig.values, eigenvectors=U,
    )


def ideal_svmcone_dcmm(omega, K, seed=0):
    """SVM-cone-DCMMSB on the population matrix."""
    return svmcone_dcmm(_matrix(omega), K, seed)
