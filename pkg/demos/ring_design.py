"""Design walkthrough: interference-focusing ring sets for two users.

With cross couplings h12 = 5 and h21 = 4 and budgets P1 = 8, P2 = 7, each
user keeps its symbol powers on the grid 2*pi*n/h_cross so every cross-phase
rotation is a whole number of turns.  The receivers then only need filters
at the pairwise differences of the other user's ring indices.
"""

import numpy as np

import kerrfocus as kf

H12, H21 = 5.0, 4.0
P1, P2 = 8.0, 7.0

print(f"couplings: h12 = {H12}, h21 = {H21};  budgets: P1 = {P1}, P2 = {P2}\n")

# user 1's grid is set by how it rotates receiver 2 (h21), and vice versa
rings1 = kf.select_rings(P1, H21, quadratic=1, owner=1)
rings2 = kf.select_rings(P2, H12, explicit=[2, 8], owner=2)

for user, rings, h, budget in ((1, rings1, H21, P1), (2, rings2, H12, P2)):
    powers = kf.ring_powers(rings, h)
    print(f"user {user}: rings {rings.indices}")
    for n, p in zip(rings.indices, powers):
        print(f"  n = {n:2d}   power = {p / np.pi:.2f} pi   amplitude = {np.sqrt(p):.4f}")
    print(f"  average power {np.mean(powers):.4f} <= {budget}\n")

f1 = kf.difference_set(rings2)
f2 = kf.difference_set(rings1)
print(f"receiver 1 filter offsets (differences of user 2's rings): {f1.frequencies}")
print(f"receiver 2 filter offsets (differences of user 1's rings): {f2.frequencies}")

const = kf.build_constellation(rings1, H21, Q=8)
turns = H21 * np.abs(const.points) ** 2 / (2 * np.pi)
print(f"\nuser 1 constellation: {len(const)} points on {len(rings1)} rings, 8 phases each")
print(f"cross rotations in turns, all integers: {sorted({int(round(t)) for t in turns})}")
