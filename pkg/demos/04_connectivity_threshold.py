"""
The connectivity threshold of G(n, p) at p = log(n)/n.

For each multiplier c the scan samples graphs at p = c log(n)/n and records
the fraction that are connected. Trial t reuses one seed across the whole
grid, so its edge sets are nested and its connectivity can only switch on
as c grows.
"""
from specmix import threshold_scan

res = threshold_scan(n=1000, c_grid=[0.5, 0.75, 1.0, 1.25, 1.5, 2.0], trials=60, seed=3)
print("c      p         connected")
for c, p, f in zip(res.c_grid, res.p, res.frequencies):
    print(f"{c:<6g} {p:.5f}   {f:.2f}  " + "#" * int(round(40 * f)))
print("first c with frequency >= 1/2:", res.crossing())
print("every trial monotone in c:", res.is_monotone())
