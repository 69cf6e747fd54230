"""
Dense symmetric linear algebra kernels.

The production eigensolver is LAPACK's ``syevd`` (through ``numpy.linalg.eigh``)
followed by a magnitude-ordered top-K selection and a deterministic sign rule.
A cyclic Jacobi solver is kept alongside it: it is fully independent of LAPACK
and is what the test-suite uses as an oracle on small matrices.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DegenerateRow, IllConditioned, InvalidArgument, NumericFailure

__all__ = [
    "EigenDecomp",
    "sym_eigen_topk",
    "jacobi_eigh",
    "spectral_norm",
    "row_normalize",
    "two_to_infty_norm",
    "invert_small",
    "fix_signs",
]

SYMMETRY_TOL = 1e-12
RESIDUAL_TOL = 1e-8
DEGENERATE_ROW_TOL = 1e-14
MAX_COND = 1e12


class EigenDecomp(NamedTuple):
    """Top-K eigenpairs, ordered by decreasing ``|value|``.

    ``vectors[:, k]`` pairs with ``values[k]``; columns are orthonormal and each
    column's largest-magnitude entry is positive.
    """

    values: np.ndarray
    vectors: np.ndarray


def _as_symmetric(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] < 1:
        raise InvalidArgument("matrix must be at least 1x1")
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.T)) > SYMMETRY_TOL * scale:
        raise InvalidArgument("matrix is not symmetric")
    return M


def fix_signs(vectors):
    """Flip columns so the largest-magnitude entry of each is positive.

    Ties go to the lowest row index (``argmax`` semantics).
    """
    vectors = np.array(vectors, dtype=float, copy=True)
    if vectors.size == 0:
        return vectors
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _order_by_magnitude(values, vectors):
    # stable sort on -|value|; ties keep LAPACK's ascending order, i.e. the
    # negative member of a +/- pair comes first
    order = np.argsort(-np.abs(values), kind="stable")
    return values[order], vectors[:, order]


def sym_eigen_topk(M, K):
    """Top-``K`` eigenpairs of a dense symmetric matrix by eigenvalue magnitude.

    Parameters
    ----------
    M : array_like, shape (n, n)
        Symmetric matrix. Only the lower triangle is read.
    K : int
        Number of pairs, ``1 <= K <= n``.

    Returns
    -------
    EigenDecomp

    Raises
    ------
    InvalidArgument
        If ``K`` is out of range or ``M`` is not symmetric.
    NumericFailure
        If a returned pair misses the residual tolerance.
    """
    M = _as_symmetric(M)
    n = M.shape[0]
    K = int(K)
    if not 1 <= K <= n:
        raise InvalidArgument(f"K={K} must satisfy 1 <= K <= n={n}")
    try:
        values, vectors = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigh did not converge: {exc}") from exc
    values, vectors = _order_by_magnitude(values, vectors)
    values = values[:K].copy()
    vectors = fix_signs(vectors[:, :K])

    norm = max(1.0, float(np.max(np.abs(values))) if n else 0.0)
    resid = np.linalg.norm(M @ vectors - vectors * values, axis=0)
    if np.any(resid > RESIDUAL_TOL * norm):
        raise NumericFailure(
            f"eigenpair residuals {resid.max():.3e} exceed {RESIDUAL_TOL * norm:.3e}"
        )
    return EigenDecomp(values, vectors)


def jacobi_eigh(M, tol=1e-12, max_sweeps=100):
    """Full eigendecomposition by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius mass drops below
    ``tol * ||M||_F``. Returns ``(values, vectors)`` ordered by decreasing
    magnitude with the same sign rule as :func:`sym_eigen_topk`.

    Raises
    ------
    NumericFailure
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    A = _as_symmetric(M).copy()
    A = (A + A.T) / 2
    n = A.shape[0]
    V = np.eye(n)
    target = tol * max(np.linalg.norm(A), np.finfo(float).tiny)

    mask = ~np.eye(n, dtype=bool)

    def off(X):
        return float(np.sqrt(np.sum(X[mask] ** 2)))

    sweeps = 0
    while off(A) > target:
        if sweeps >= max_sweeps:
            raise NumericFailure(
                f"Jacobi did not converge in {max_sweeps} sweeps (off={off(A):.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 1.0 / (2.0 * tau)
                else:
                    t = np.copysign(1.0, tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
        sweeps += 1

    values = np.diag(A).copy()
    order = np.lexsort((values, -np.abs(values)))
    return values[order], fix_signs(V[:, order])


def spectral_norm(M):
    """Largest absolute eigenvalue of a symmetric matrix (its operator 2-norm)."""
    M = _as_symmetric(M)
    if not np.any(M):
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(M))))


def row_normalize(U):
    """Scale every row of ``U`` to unit Euclidean norm.

    Returns
    -------
    U_star : ndarray, shape (n, K)
    norms : ndarray, shape (n,)
        The original row norms.

    Raises
    ------
    DegenerateRow
        On the first row whose norm is below 1e-14.
    """
    U = np.asarray(U, dtype=float)
    norms = np.linalg.norm(U, axis=1)
    bad = np.flatnonzero(norms < DEGENERATE_ROW_TOL)
    if bad.size:
        raise DegenerateRow(int(bad[0]), float(norms[bad[0]]))
    return U / norms[:, None], norms


def two_to_infty_norm(M):
    """Maximum row Euclidean norm."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(M, axis=1)))


def invert_small(M):
    """Inverse of a small square matrix by LU with partial pivoting.

    Raises
    ------
    IllConditioned
        If the 2-norm condition number exceeds 1e12 (this is how a failed
        corner search surfaces downstream).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got shape {M.shape}")
    K = M.shape[0]
    if K > 64:
        raise InvalidArgument(f"invert_small is limited to K <= 64, got {K}")
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > MAX_COND:
        raise IllConditioned(f"condition number {cond:.3e} exceeds {MAX_COND:.0e}", cond)
    return np.linalg.solve(M, np.eye(K))
