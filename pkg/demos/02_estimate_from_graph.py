"""
Estimating memberships from one sampled graph.

A single adjacency matrix is drawn from each model and both estimators are
scored with the permutation-matched l1 error. The max over nodes is the
headline number; the mean is far less noisy at this size.
"""
from specmix import (
    build_ptilde_standard,
    membership_error,
    omega_dcmm,
    omega_mmsb,
    sample_adjacency,
    sample_membership,
    sample_theta,
    spacl,
    svmcone_dcmm,
)

n, K, rho = 800, 3, 0.5
Pi = sample_membership(n, K, frac_pure=0.5, seed=10)
P = build_ptilde_standard(K, 0.9)

A = sample_adjacency(omega_mmsb(rho, P, Pi), seed=11)
print(f"MMSB graph: {int(A.sum()) // 2} edges on {n} nodes")
for name, est in [("spacl", spacl(A, K)), ("svmcone", svmcone_dcmm(A, K, seed=0))]:
    err = membership_error(est.rows, Pi)
    print(f"  {name:8s} max l1 {err.max_l1_error:.3f}  mean l1 {err.mean_l1_error:.3f}  "
          f"clipped rows {est.n_clipped}")

theta = sample_theta(n, rho, lo_ratio=0.5, seed=12)
A = sample_adjacency(omega_dcmm(theta, P, Pi), seed=13)
print(f"DCMM graph: {int(A.sum()) // 2} edges, degrees from {A.sum(1).min()} to {A.sum(1).max()}")
for name, est in [("spacl", spacl(A, K)), ("svmcone", svmcone_dcmm(A, K, seed=0))]:
    err = membership_error(est.rows, Pi)
    print(f"  {name:8s} max l1 {err.max_l1_error:.3f}  mean l1 {err.mean_l1_error:.3f}")

# the first few estimated rows next to the truth (columns matched)
est = svmcone_dcmm(A, K, seed=0)
perm = list(membership_error(est.rows, Pi).permutation)
print("node  estimate             truth")
for i in range(K, K + 5):
    print(f"{i:4d}  {est.rows[i].round(2)}  {Pi[i, perm].round(2)}")
