"""
Counting words in digit expansions
==================================

A rational number has an eventually periodic expansion and so only a handful of
distinct length-k words. The Champernowne constant, and any rational shift of it,
contains every word. Here are the factor counts for a few numbers in base 4.
"""
from fractions import Fraction as F

from pwaffine.betadyn import factor_census
from pwaffine.exactnum import champernowne_stream, offset_add, rational_stream

c = champernowne_stream(4)
numbers = {
    "1/3": rational_stream(F(1, 3), 4),
    "5/7": rational_stream(F(5, 7), 4),
    "c": c,
    "c + 1/2": offset_add(c, F(1, 2)),
    "c - 1/4": offset_add(c, F(-1, 4)),
}
prefix = 20_000
print(f"{'x':10s}" + "".join(f"  k={k:<6d}" for k in range(1, 6)) + "  (of 4^k)")
for name, s in numbers.items():
    digits = s.prefix(prefix)
    counts = [factor_census(digits, k, 4).count for k in range(1, 6)]
    print(f"{name:10s}" + "".join(f"  {n:<8d}" for n in counts))
