"""Independent pure-Python reference computations used as test oracles."""

import math


def nu_ratio(diff, t):
    """t / (t + |diff|) with the unit step at diff = 0."""
    n = math.sqrt(sum(c * c for c in diff))
    if n == 0:
        return 1.0 if t > 0 else 0.0
    u = t / n
    return u / (u + 1.0)


def block_average(xs, ks, r, L, eps):
    """Mean of nu_{x_k - L}(eps) over k_{r-1} < k <= k_r, by explicit looping."""
    lo, hi = ks[r - 1], ks[r]
    total = 0.0
    for k in range(lo + 1, hi + 1):
        total += nu_ratio([a - b for a, b in zip(xs(k), L)], eps)
    return total / (hi - lo)


def squares_in(lo, hi):
    return sum(1 for i in range(1, math.isqrt(hi) + 2) if lo < i * i <= hi)
