"""
Averages of projected mixed volumes
===================================

For random d-dimensional projections P, the mean of V(P A_1, ..., P A_d)
against kappa_d/kappa_n times V(A_1, ..., A_d, B, ..., B).  For the unit
square the mean projection length is 4/pi, for the unit cube the mean shadow
area is 3/2; both sides agree.
"""

import math

from mixvol import cube, segment, strictness_probe, verify_theorem

cases = [
    ("unit square, d=1, n=2", [cube(2)], 4 / math.pi),
    ("two unit cubes, d=2, n=3", [cube(3), cube(3)], 1.5),
    ("segments e1, e2, d=2, n=3", [segment([1, 0, 0]), segment([0, 1, 0])], 0.25),
]
for name, bodies, exact in cases:
    rep = verify_theorem(bodies, samples=5000, seed=1)
    print(f"{name}")
    print(f"  mean over projections {rep.lhs.mean:.5f} +- {rep.lhs.stderr:.5f}   exact {exact:.5f}")
    print(f"  bound bracket [{rep.rhs['lower']:.5f}, {rep.rhs['upper']:.5f}]   {rep.verdict}")

# the probe reports the normalized gap without deciding anything
rep = strictness_probe([cube(3), cube(3)], samples=5000, seed=2)
print(f"\ngap for the cubes: {rep.checks['gap']:+.4f} +- {rep.checks['gap_half_width']:.4f}")
