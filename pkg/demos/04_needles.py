"""
Random needles
==============

The support function of a random needle [0, c] in a fixed direction averages
to r_k, and the Minkowski average of many needles approaches the ball of
radius r_k.
"""

import numpy as np

from mixvol.constants import ball_volume, r_constant
from mixvol.hull import zonotope_volume
from mixvol.sampling import uniform_sphere
from mixvol.verify import verify_needle_average

for k in range(2, 7):
    rep = verify_needle_average(k, samples=100_000, seed=0, needles=0)
    print(f"k={k}  mean {rep.lhs.mean:.5f} +- {rep.lhs.stderr:.5f}   r_k {r_constant(k):.5f}")

# Minkowski average of N needles in the plane is a zonogon
for n_needles in (10, 100, 2000):
    c = uniform_sphere(2, 5, size=n_needles)
    area = zonotope_volume(c / n_needles)
    print(f"N={n_needles:5d}  area {area:.5f}   pi r_2^2 = {ball_volume(2) * r_constant(2) ** 2:.5f}")
