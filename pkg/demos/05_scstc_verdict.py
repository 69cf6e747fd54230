"""
The four-step SCSTC verdict.

Combines a sparsity sweep, a separation sweep and a threshold scan into a
PASS/FLAG report. Step 3 checks the separation slope, step 4 checks that the
connectivity transition sits near p = log(n)/n. At this reduced size the
separation slope typically lands steeper than -1 and step 3 is flagged.
"""
from specmix import SweepConfig, scstc_report, sweep_separation, sweep_sparsity, threshold_scan

sp = sweep_sparsity(SweepConfig(param="rho", grid=(0.05, 0.1, 0.2, 0.4), n=500,
                                omega=0.9, trials=6, seed=4))
se = sweep_separation(SweepConfig(param="omega", grid=(0.4, 0.6, 0.8, 1.0), n=500,
                                  rho=0.3, trials=6, seed=5))
th = threshold_scan(500, [0.5, 1.0, 1.5, 2.0], trials=40, seed=6)
print(scstc_report(sp.fit, se.fit, th)["text"])
