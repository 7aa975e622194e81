"""
Ball constants and the needle constant r_k
==========================================

The ball volumes kappa_k, the sphere areas and the needle constant r_k,
each computed along two independent routes.
"""

from mixvol.constants import ball_volume, constants_table, r_constant, sphere_area, theorem_constant

# kappa_k and |S^(k-1)| for small k
for k in range(1, 7):
    print(f"k={k}  kappa={ball_volume(k):.6f}  sphere={sphere_area(k):.6f}")

# r_k is the average of max(0, <c, e_1>) over the sphere: 1/pi, 1/4, ...
print()
for k in range(2, 7):
    print(f"r_{k} = {r_constant(k):.6f}   kappa_(k-1)/|S^(k-1)| = {ball_volume(k - 1) / sphere_area(k):.6f}")

# the product r_(d+1) ... r_n is the constant in front of the O(n) average
d, n = 2, 5
prod = 1.0
for k in range(d + 1, n + 1):
    prod *= r_constant(k)
print(f"\nr_3 r_4 r_5 = {prod:.12f},  d! kappa_d / (n! kappa_n) = {theorem_constant(d, n):.12f}")

worst = max(constants_table(10), key=lambda r: r.relative_gap)
print(f"largest gap in the identity table: {worst.relative_gap:.1e} ({worst.name} {worst.args})")
