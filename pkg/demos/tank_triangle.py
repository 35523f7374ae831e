"""
Three tanks, one server: the exact triangle and the interval picture
====================================================================

With d = (1, 1, 1) the switching thresholds are symmetric and the Poincare map
on the simplex boundary is conjugate to a piecewise map of slope -1/2 on [0, 1).
This script walks one orbit in both pictures side by side.
"""
from fractions import Fraction as F

from pwaffine.contraction import detect_cycle
from pwaffine.serversim import DTriple, interval_map, phi, phi_inv, poincare, state

d = DTriple.exact(1, 1, 1)
f = interval_map(d)
print("breakpoints of the interval map:", [str(x) for x in f.breakpoints])

# a generic start on the edge where tank 1 is empty
s = state(0, F(3, 10), F(7, 10))
t = phi_inv(s)
print("\n  k  simplex state                      phi^-1(state)   f^k(t0)")
for k in range(8):
    print(f"{k:3d}  {str(s):34s} {str(phi_inv(s)):15s} {t}")
    s, t = poincare(s, d), f(t)

# orbits that hit a breakpoint depend on how ties are broken: (0,0,1) reaches (1/2,1/2,0),
# where tank 3 empties with tanks 1 and 2 level, and the lower-index rule picks tank 1
red = [state(0, 0, 1)]
for _ in range(4):
    red.append(poincare(red[-1], d))
print("\nlower-index ties:", " -> ".join(str(x) for x in red))
print("f along the same points:", [str(f(phi_inv(x))) for x in red[:-1]])
print("phi^-1 of the next state:", [str(phi_inv(x)) for x in red[1:]])
print("they differ only at breakpoints, where tie='conjugate' follows f instead:")
print("   ", poincare(red[1], d, tie="conjugate"), "=", phi(f(phi_inv(red[1]))), "vs", red[2])

# the orbit of 0 lands exactly on a 3-cycle
res = detect_cycle(f, 0)
print("\ncycle of 0:", [str(c) for c in res.cycle], "exact hit:", res.exact_hit)
print("as tank levels:")
for c in res.cycle:
    print("   ", phi(c))

# there is a second 3-cycle, the triangle (0,2/3,1/3) -> (1/3,0,2/3) -> (2/3,1/3,0)
tri = state(0, F(2, 3), F(1, 3))
loop = [tri, poincare(tri, d), poincare(poincare(tri, d), d)]
print("\nsecond triangle:", " -> ".join(str(x) for x in loop), "-> back:", poincare(loop[-1], d) == tri)
print("its interval points:", [str(phi_inv(x)) for x in loop])
