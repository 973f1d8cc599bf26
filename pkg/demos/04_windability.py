"""
Which four-vertex weights are windable?
=======================================

A weight function is windable when it splits into nonnegative weights on
matchings of its support. Sweep a grid of (a, c) and see that only the
diagonal a == c survives.
"""
from fractions import Fraction

from fourvertex import check_windable, fstar
from fourvertex.windability import verify_certificate

grid = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)]
print("      " + " ".join(f"{str(c):>5}" for c in grid))
for a in grid:
    row = ["  W  " if check_windable(fstar(a, c)).windable else "  .  " for c in grid]
    print(f"{str(a):>5} " + " ".join(row))

f = fstar(1, 1)
result = check_windable(f)
print("certificate for a = c = 1 verifies:", verify_certificate(f, result.certificate))
print("nonzero entries:", sum(1 for v in result.certificate.values() if v))
