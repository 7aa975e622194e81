"""
Mixed volumes of polytopes
==========================

V(A_1, ..., A_n) from vertex lists, with a few values that can be checked by hand.
"""

import numpy as np

from mixvol import ball_bracket, cube, mixed_volume, quermass_bracket, segment, simplex

# the diagonal gives the ordinary volume
print("V(C, C, C)        =", mixed_volume([cube(3)] * 3).value)
print("V(S, S, S)        =", mixed_volume([simplex(3)] * 3).value, " (1/6)")

# needles give |det| / n!
e = np.eye(3)
print("V([0,e1],[0,e2],[0,e3]) =", mixed_volume([segment(r) for r in e]).value)

# V(C, C, [0, e3]) is a third of the shadow of C along e3
print("V(C, C, [0,e3])   =", mixed_volume([cube(3), cube(3), segment(e[2])]).value)

# with ball slots the value is bracketed by an inscribed polytope and its blow-up
bb = ball_bracket(3, 256, seed=0)
print(f"\nball approximant: {len(bb.inner.vertices)} points, outer scale {bb.outer_scale:.4f}")
for j in (1, 2):
    br = quermass_bracket([cube(3)] * j, m=256)
    print(f"V(C x{j}, B x{3 - j}) in [{br.lower:.4f}, {br.upper:.4f}]")
# exact values: kappa_2 = pi for j = 1, kappa_1 = 2 for j = 2
