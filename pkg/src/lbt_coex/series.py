"""Finite geometric-type sums with removable singularities handled explicitly.

Closed forms are used away from the singular point; near it the sums are
evaluated term by term, which is exact up to rounding for the small orders
(CW sizes, backoff stages) that occur here.
"""

from __future__ import annotations

import math

# Relative distance to a removable singularity below which direct summation is used.
SINGULAR_TOL = 1e-4


def one_minus_pow(r: float, n: float) -> float:
    """1 - r**n, accurate when r is close to 1 or n is large."""
    if r <= 0.0:
        return 1.0 - r**n
    return -math.expm1(n * math.log(r))


def geo(r: float, n: int) -> float:
    """sum_{i=0}^{n-1} r**i."""
    if n <= 0:
        return 0.0
    if abs(1.0 - r) < SINGULAR_TOL:
        total, term = 0.0, 1.0
        for _ in range(n):
            total += term
            term *= r
        return total
    if 0.0 < r < 1.0:
        return one_minus_pow(r, n) / (1.0 - r)
    return (1.0 - r**n) / (1.0 - r)


def geo_weighted(r: float, n: int) -> float:
    """sum_{j=1}^{n} geo(r, j) = sum_{i=0}^{n-1} (n - i) r**i."""
    if n <= 0:
        return 0.0
    if abs(1.0 - r) < SINGULAR_TOL:
        return sum((n - i) * r**i for i in range(n))
    return (n - r * geo(r, n)) / (1.0 - r)


def geo_mixed(x: float, y: float, n: int) -> float:
    """sum_{j=0}^{n-1} y**j x**(n-j)."""
    if n <= 0:
        return 0.0
    scale = max(abs(x), abs(y), 1e-300)
    if abs(x - y) < SINGULAR_TOL * scale:
        return sum(y**j * x ** (n - j) for j in range(n))
    return x * (x**n - y**n) / (x - y)
