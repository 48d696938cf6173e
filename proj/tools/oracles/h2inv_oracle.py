#!/usr/bin/env python3
"""High-precision bisection oracle for the inverse binary entropy (natural log).

Prints h2inv(0.469*ln2) to 20 digits; the value is frozen into the C++ tests.
"""
from mpmath import mp, mpf, log

mp.dps = 40

LN2 = log(2)


def h2(p):
    if p == 0 or p == 1:
        return mpf(0)
    return -p * log(p) - (1 - p) * log(1 - p)


def h2inv(h):
    lo, hi = mpf(0), mpf("0.5")
    for _ in range(200):
        mid = (lo + hi) / 2
        if h2(mid) < h:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


if __name__ == "__main__":
    target = mpf("0.469") * LN2
    x = h2inv(target)
    print(f"h2inv(0.469*ln2) = {mp.nstr(x, 20)}")
    print(f"check h2(x)/ln2  = {mp.nstr(h2(x) / LN2, 20)}")
