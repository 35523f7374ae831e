"""
From breakpoints to a finite attractor, one stage at a time
===========================================================

For a rational map of the theorem form the backward orbits of the breakpoints are
finite. Collecting them gives a partition whose pieces are mapped into pieces,
and the induced map tau on piece indices bounds the attractor.
"""
from fractions import Fraction as F

from pwaffine.contraction import build_map
from pwaffine.quasipart import analyze, attractor_superset, backward_closure, build_partition, verify_partition

f = build_map(2, -1, (0, F(1, 6), F(1, 2), F(5, 6), 1), (1, 2, 1, 2))

bc = backward_closure(f)
print("backward chains from each breakpoint:")
for ch in bc.chains:
    print(f"   {str(ch.x):5s} {ch.status:7s}", " <- ".join(str(p) for p in ch.points))

qp = build_partition(f, bc.H)
print("\npieces and where f sends them:")
for s, (lo, hi) in enumerate(qp.intervals):
    t = qp.tau[s]
    print(f"   [{lo}, {hi})  ->  piece {t + 1}  [{qp.G[t]}, {qp.G[t + 1]})")
print("inclusions verified:", verify_partition(f, qp))

rep = attractor_superset(f, qp)
print("\nperiodic pieces give the superset F:", [str(x) for x in rep.F], " q =", rep.q)

full = analyze(f)
print("verdict:", full.verdict)
print("genuine cycles:", [[str(x) for x in c] for c in full.cycles.genuine])
print("limit-only cycles:", [[str(x) for x in c] for c in full.cycles.limit_only])
