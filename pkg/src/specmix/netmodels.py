"""
Generative network models with mixed memberships.

MMSB:  Omega = rho * Pi @ P @ Pi.T
DCMM:  Omega = diag(theta) @ Pi @ P @ Pi.T @ diag(theta)

and the adjacency sampler ``A(i, j) ~ Bernoulli(Omega(i, j))`` for ``i < j``.
All randomness flows through :func:`make_rng`, so every draw is a pure
function of its integer seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, InvalidProbability, SingularMixing

__all__ = [
    "Population",
    "make_rng",
    "derive_seed",
    "build_ptilde_standard",
    "build_ptilde_offdiag",
    "sample_membership",
    "sample_theta",
    "omega_mmsb",
    "omega_dcmm",
    "sample_adjacency",
    "sample_er",
    "sparsity_gate",
    "degree_gate",
]

PROB_TOL = 1e-12


def make_rng(seed):
    """Counter-based (Philox) generator from an int, SeedSequence or Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    if seed is None:
        raise InvalidArgument("a seed is mandatory")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def derive_seed(master, *keys):
    """Child seed for ``keys`` (e.g. a trial index) under ``master``.

    Independent of call order, so serial and parallel runs agree.
    """
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class Population:
    """Population adjacency matrix together with the parameters that built it."""

    omega: np.ndarray
    model: str
    ptilde: np.ndarray
    membership: np.ndarray
    rho: float | None = None
    theta: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self):
        return self.omega.shape[0]

    @property
    def K(self):
        return self.ptilde.shape[0]


def build_ptilde_standard(K, omega):
    """``omega * I + (1 - omega) * 11'``: unit diagonal, ``1 - omega`` elsewhere."""
    K = int(K)
    if K < 1:
        raise InvalidArgument(f"K must be >= 1, got {K}")
    if not 0.0 < omega <= 1.0:
        raise InvalidArgument(f"omega must lie in (0, 1], got {omega}")
    return omega * np.eye(K) + (1.0 - omega) * np.ones((K, K))


def build_ptilde_offdiag(K, beta):
    """``(2 - beta) * I + (beta - 1) * 11'``: unit diagonal, ``beta - 1`` elsewhere.

    The smallest singular value is ``|beta - 2|`` for K = 2; ``beta = 2`` is
    singular and rejected.
    """
    K = int(K)
    if K < 1:
        raise InvalidArgument(f"K must be >= 1, got {K}")
    if beta < 1.0:
        raise InvalidArgument(f"beta must be >= 1, got {beta}")
    if K > 1 and beta == 2.0:
        raise SingularMixing("beta = 2 gives a rank-one mixing matrix")
    return (2.0 - beta) * np.eye(K) + (beta - 1.0) * np.ones((K, K))


def sample_membership(n, K, frac_pure=0.5, dirichlet_a=1.0, seed=0):
    """Row-stochastic ``n x K`` membership matrix with guaranteed pure nodes.

    Rows ``0..K-1`` are the standard basis vectors. Every later row is pure
    with probability ``frac_pure`` (community uniform at random), otherwise a
    symmetric Dirichlet(``dirichlet_a``) draw.
    """
    n, K = int(n), int(K)
    if K < 1 or n < K:
        raise InvalidArgument(f"need 1 <= K <= n, got n={n}, K={K}")
    if not 0.0 <= frac_pure <= 1.0:
        raise InvalidArgument(f"frac_pure must lie in [0, 1], got {frac_pure}")
    if dirichlet_a <= 0:
        raise InvalidArgument(f"dirichlet_a must be positive, got {dirichlet_a}")
    rng = make_rng(seed)
    m = n - K
    is_pure = rng.random(m) < frac_pure
    labels = rng.integers(0, K, size=m)
    gam = rng.gamma(dirichlet_a, size=(m, K))

    Pi = np.zeros((n, K))
    Pi[:K] = np.eye(K)
    sums = gam.sum(axis=1)
    # Gamma draws can underflow to an all-zero row for tiny shape parameters
    underflow = sums <= 0
    is_pure |= underflow
    mixed = ~is_pure
    rows = np.arange(K, n)
    Pi[rows[is_pure], labels[is_pure]] = 1.0
    Pi[rows[mixed]] = gam[mixed] / sums[mixed, None]
    return Pi


def sample_theta(n, rho, lo_ratio=0.5, seed=0):
    """Degree parameters ``sqrt(rho) * Uniform[lo_ratio, 1]``."""
    if rho > 1.0:
        raise InvalidProbability(f"rho must not exceed 1, got {rho}")
    if rho <= 0.0:
        raise InvalidArgument(f"rho must be positive, got {rho}")
    if not 0.0 < lo_ratio <= 1.0:
        raise InvalidArgument(f"lo_ratio must lie in (0, 1], got {lo_ratio}")
    rng = make_rng(seed)
    return math.sqrt(rho) * rng.uniform(lo_ratio, 1.0, size=int(n))


def _check_membership(Pi, K):
    Pi = np.asarray(Pi, dtype=float)
    if Pi.ndim != 2 or Pi.shape[1] != K:
        raise InvalidArgument(f"membership must be n x {K}, got shape {Pi.shape}")
    if np.any(Pi < 0) or np.max(np.abs(Pi.sum(axis=1) - 1.0)) > 1e-12:
        raise InvalidArgument("membership rows must be probability vectors")
    return Pi


def _check_ptilde(P):
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if P.shape[0] != P.shape[1] or not np.allclose(P, P.T, rtol=0, atol=1e-14):
        raise InvalidArgument("mixing matrix must be square and symmetric")
    if np.any(P < 0):
        raise InvalidArgument("mixing matrix must be nonnegative")
    return P


def _symmetrize(X):
    return (X + X.T) / 2


def omega_mmsb(rho, ptilde, Pi):
    """MMSB population matrix ``rho * Pi @ ptilde @ Pi.T``."""
    P = _check_ptilde(ptilde)
    Pi = _check_membership(Pi, P.shape[0])
    if not 0.0 <= rho <= 1.0:
        raise InvalidProbability(f"rho must lie in [0, 1], got {rho}")
    if rho * P.max() > 1.0 + PROB_TOL:
        raise InvalidProbability(f"rho * max(P) = {rho * P.max():.6g} exceeds 1")
    omega = _symmetrize(rho * (Pi @ P @ Pi.T))
    return Population(omega, "mmsb", P, Pi, rho=float(rho))


def omega_dcmm(theta, ptilde, Pi):
    """DCMM population matrix ``Theta @ Pi @ ptilde @ Pi.T @ Theta``."""
    P = _check_ptilde(ptilde)
    Pi = _check_membership(Pi, P.shape[0])
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (Pi.shape[0],):
        raise InvalidArgument(f"theta must have length {Pi.shape[0]}")
    if np.any(theta <= 0):
        raise InvalidArgument("theta entries must be positive")
    if not np.allclose(np.diag(P), 1.0, rtol=0, atol=1e-14):
        raise InvalidArgument("DCMM mixing matrix must have unit diagonal")
    if theta.max() * P.max() > 1.0 + PROB_TOL:
        raise InvalidProbability(
            f"theta_max * max(P) = {theta.max() * P.max():.6g} exceeds 1"
        )
    B = theta[:, None] * Pi
    omega = _symmetrize(B @ P @ B.T)
    return Population(omega, "dcmm", P, Pi, theta=theta)


def sample_adjacency(omega, seed):
    """Symmetric 0/1 adjacency with zero diagonal.

    One uniform deviate per pair ``i < j``; the edge is present iff the
    deviate is below ``omega[i, j]``. Sharing a seed therefore nests the edge
    sets of entrywise-ordered probability matrices.
    """
    omega = omega.omega if isinstance(omega, Population) else np.asarray(omega, float)
    n = omega.shape[0]
    if np.any(omega < -PROB_TOL) or np.any(omega > 1 + PROB_TOL):
        raise InvalidProbability("edge probabilities must lie in [0, 1]")
    rng = make_rng(seed)
    U = rng.random((n, n))
    upper = np.triu(U < omega, k=1)
    A = upper | upper.T
    return A.astype(np.int8)


def sample_er(n, p, seed):
    """Erdos-Renyi G(n, p): the one-community MMSB with ``P = [[1]]``, ``rho = p``."""
    if not 0.0 <= p <= 1.0:
        raise InvalidProbability(f"p must lie in [0, 1], got {p}")
    pop = omega_mmsb(p, np.ones((1, 1)), np.ones((int(n), 1)))
    return sample_adjacency(pop, seed)


def sparsity_gate(rho, n):
    """``rho * n >= log(n)``, the sparsity requirement under MMSB."""
    return rho * n >= math.log(n)


def degree_gate(ptilde, theta):
    """``max(P) * theta_max * ||theta||_1 >= log(n)``, the DCMM analogue."""
    theta = np.asarray(theta, dtype=float)
    return float(np.max(ptilde)) * theta.max() * theta.sum() >= math.log(theta.size)
