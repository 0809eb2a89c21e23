"""One seeded run of the discrete channel with filter-bank noise.

Shows the concentration effect: with focused inputs the noiseless signal
lives on exactly one filter per symbol while every other filter carries
pure noise of variance N*Es.
"""

import numpy as np

import kerrfocus as kf

coeffs = kf.direct_coefficients(h11=1.3, h12=5.0, h21=4.0, h22=0.7, M=1, Es=1.0, N=0.02)
rings1 = kf.RingIndexSet((1, 4, 9), owner=1)
rings2 = kf.RingIndexSet((2, 8), owner=2)
c1 = kf.build_constellation(rings1, coeffs.h21, 4)
c2 = kf.build_constellation(rings2, coeffs.h12, 4)

rng = np.random.default_rng(21)
n = 8
x1 = kf.SymbolBlock(np.asarray(c1.points)[rng.integers(0, len(c1), n)], user=1)
x2 = kf.SymbolBlock(np.asarray(c2.points)[rng.integers(0, len(c2), n)], user=2)
F1 = kf.difference_set(rings2)
F2 = kf.difference_set(rings1)

out1, out2 = kf.simulate(x1, x2, F1, F2, coeffs, noise_on=True, seed=99)

print(f"receiver 1 filters {F1.frequencies}, noise variance N*Es = {coeffs.N * coeffs.Es}\n")
print("j   active f   |y| per filter (active one carries |x|, rest carry noise)")
for j in range(n):
    v = kf.v1(j, x2, coeffs.h12, coeffs.M)
    mags = "  ".join(f"{abs(out1.values[(j, f)]):6.3f}" for f in F1)
    inside = "in bank" if round(v) in F1.frequencies else "outside bank (block edge)"
    print(f"{j}   {round(v):+d} ({inside})   {mags}   |x1[j]| = {abs(x1[j]):.3f}")
