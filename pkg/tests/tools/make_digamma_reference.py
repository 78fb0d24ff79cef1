"""Regenerate the digamma reference table in tests/digamma_reference.py.

Arguments are 30 log-spaced float64 values covering [1e-3, 1e6].  Each
reference value is computed at 60 decimal digits on the exact binary double
(not the decimal literal) and then rounded once to the nearest double, so a
correctly rounded implementation can match to well under 1e-12 absolute.

Run from the repository root:

    python tests/tools/make_digamma_reference.py > tests/digamma_reference.py
"""
import mpmath

mpmath.mp.dps = 60

N = 30
LO, HI = 1e-3, 1e6

print('"""Frozen digamma reference values; regenerate with tests/tools/make_digamma_reference.py."""')
print()
print("DIGAMMA_REFERENCE = [")
for i in range(N):
    exponent = -3.0 + 9.0 * i / (N - 1)
    x = float(10.0 ** mpmath.mpf(exponent))
    ref = float(mpmath.digamma(mpmath.mpf(x)))
    print(f"    ({x!r}, {ref!r}),")
print("]")
