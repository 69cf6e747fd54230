"""
How the error scales with sparsity and with community separation.

The theory predicts error ~ rho^(-1/2) for fixed separation and
error ~ 1/sigma_K(P) = 1/omega for fixed sparsity. Each sweep below runs a
few seeded trials per grid point and fits a line in log-log space. These are
reduced versions of the full acceptance runs (n=1000, 30 trials), so the
slopes are rougher.
"""
from specmix import SweepConfig, sweep_separation, sweep_sparsity

sparsity = SweepConfig(param="rho", grid=(0.05, 0.1, 0.2, 0.4), n=600, K=2,
                       omega=0.9, trials=8, seed=1)
res = sweep_sparsity(sparsity)
print("rho      mean l1 error")
for row in res.summary:
    print(f"{row['rho']:<8g} {row['mean_l1_error']:.4f}")
print(f"fitted slope {res.fit.slope:.3f} (theory -0.5), R^2 {res.fit.r_squared:.3f}\n")

separation = SweepConfig(param="omega", grid=(0.3, 0.45, 0.675, 0.9), n=600, K=2,
                         rho=0.3, trials=8, seed=2)
res = sweep_separation(separation)
print("omega    mean l1 error   omega*sqrt(rho)")
for row in res.summary:
    print(f"{row['omega']:<8g} {row['mean_l1_error']:.4f}          {row['separation_stat']:.3f}")
print(f"fitted slope {res.fit.slope:.3f} (theory -1), R^2 {res.fit.r_squared:.3f}")
print("At the weakest separation the second eigenvalue of the population matrix is")
print("comparable to the noise norm, which steepens the curve at this graph size.")
