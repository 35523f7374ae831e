"""
An attractor that sits on a normal number
=========================================

Place the breakpoints of the slope -1/2 tank map at c - 1/4, c and c + 1/2 with
c the base-4 Champernowne constant. The switching constants d are then known only
through digit enclosures, but the orbit is still driven exactly: tank levels stay
rational and every switch is certified against an enclosure of d.
"""
from fractions import Fraction as F

from pwaffine.errors import PrecisionExhausted
from pwaffine.exactnum import champernowne_stream, decimal_string, offset_add
from pwaffine.serversim import d_from_x, poincare, state, trajectory

c = champernowne_stream(4)
print("c =", decimal_string(c, 40), "...")
xs = (offset_add(c, F(-1, 4)), c, offset_add(c, F(1, 2)))
d = d_from_x(*xs)
print(f"d enclosure width: {float(d.width):.1e}")
print("d midpoints:", [f"{float(v):.12f}" for v in d.values])

for v0 in [("0.11", 0, "0.89"), ("0.8", 0, "0.2")]:
    tr = trajectory(state(*v0), d, 40)
    tail = tr.poincare_states[-4:]
    print(f"\nfrom {v0}: last four boundary states")
    for s in tail:
        print("   ", "  ".join(f"{float(v):.12f}" for v in s.v))

# the 4-cycle (0.4,0.6,0) -> (0,0.8,0.2) -> (0.4,0,0.6) -> (0,0.2,0.8) is hit exactly
s = state("0.4", "0.6", 0)
print("\nexact 4-cycle:")
for _ in range(4):
    print("   ", s)
    s = poincare(s, d)
print("    back to start:", s == state("0.4", "0.6", 0))

# starting right on a switching threshold needs more digits of c than a few
near = state("0.2216", "0.7784", 0)
try:
    poincare(near, d_from_x(*xs, precision=0))
except PrecisionExhausted as e:
    print("\nwith almost no digits:", e)
print("with the default precision:", poincare(near, d))
