"""Psi-class intersection number oracle for the one-dimensional theory.

Computes <tau_{d_1} ... tau_{d_n}>_g by exact recursion with the single
initial condition <tau_0^3>_0 = 1:

* string reduction when some d_i = 0,
* the Virasoro/KdV recursion on the largest insertion when it is >= 2,
* a closed consequence of the two for the remaining all-ones genus-1 case
  (<tau_1^n>_1, derived by eliminating <tau_2 tau_0 tau_1^(n-1)>_1 between
  the string reduction and the Virasoro relation).

Everything is Fraction arithmetic; the dimension constraint
sum d_i = 3g - 3 + n and stability 2g - 2 + n > 0 gate all values.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations


def _double_factorial(n):
    """(2k+1)!! style odd double factorial; (-1)!! = 1."""
    if n <= 0:
        return 1
    out = 1
    while n > 0:
        out *= n
        n -= 2
    return out


def _stable(g, n):
    return 2 * g - 2 + n > 0


@lru_cache(maxsize=None)
def correlator(g, ds):
    """<tau_{d_1} ... tau_{d_n}>_g for the trivial rank-one theory.

    ds is a sorted tuple of descendant levels; returns 0 when the dimension
    constraint fails or (g, n) is unstable.
    """
    n = len(ds)
    if n == 0 or not _stable(g, n) or g < 0:
        return Fraction(0)
    if sum(ds) != 3 * g - 3 + n:
        return Fraction(0)
    if g == 0 and n == 3:
        return Fraction(1)  # forced all-zero by the dimension constraint
    if ds[0] == 0:
        return _string_reduce(g, ds)
    if ds[-1] >= 2:
        return _virasoro_reduce(g, ds)
    # all insertions equal 1; the dimension constraint forces g = 1
    return _all_ones_genus_one(n)


def _string_reduce(g, ds):
    rest = ds[1:]
    total = Fraction(0)
    for j in range(len(rest)):
        if rest[j] == 0:
            continue
        lowered = tuple(sorted(rest[:j] + (rest[j] - 1,) + rest[j + 1:]))
        total += correlator(g, lowered)
    return total


def _virasoro_reduce(g, ds):
    """Solve the Virasoro relation for the correlator with largest index k+1 >= 2.

    (2k+3)!! <tau_{k+1} prod tau_{d_j}>_g =
        sum_j ((2k+2d_j+1)!!/(2d_j-1)!!) <tau_{d_j+k} prod_{i != j}>_g
      + 1/2 sum_{a+b=k-1} (2a+1)!!(2b+1)!! [ <tau_a tau_b prod>_{g-1}
      + sum over ordered stable splittings <tau_a I>_{g'} <tau_b J>_{g''} ].
    """
    k = ds[-1] - 1
    rest = ds[:-1]
    total = Fraction(0)
    for j in range(len(rest)):
        dj = rest[j]
        merged = tuple(sorted(rest[:j] + (dj + k,) + rest[j + 1:]))
        total += Fraction(_double_factorial(2 * k + 2 * dj + 1),
                          _double_factorial(2 * dj - 1)) * correlator(g, merged)
    quad = Fraction(0)
    for a in range(k):
        b = k - 1 - a
        weight = Fraction(_double_factorial(2 * a + 1) * _double_factorial(2 * b + 1))
        quad += weight * correlator(g - 1, tuple(sorted((a, b) + rest)))
        quad += weight * _split_sum(g, rest, a, b)
    total += quad / 2
    return total / _double_factorial(2 * k + 3)


def _split_sum(g, rest, a, b):
    total = Fraction(0)
    idx = range(len(rest))
    for g1 in range(g + 1):
        g2 = g - g1
        for size in range(len(rest) + 1):
            for I in combinations(idx, size):
                Iset = set(I)
                dI = tuple(sorted((a,) + tuple(rest[i] for i in I)))
                dJ = tuple(sorted((b,) + tuple(rest[i] for i in idx if i not in Iset)))
                total += correlator(g1, dI) * correlator(g2, dJ)
    return total


def _all_ones_genus_one(n):
    """<tau_1^n>_1 = ( <tau_0^3 tau_1^(n-1)>_0 + split terms ) / 24."""
    rest = (0,) + (1,) * (n - 1)
    bridge = correlator(0, tuple(sorted((0, 0) + rest)))
    bridge += _split_sum(1, rest, 0, 0)
    return bridge / 24


def dilaton_value(g, ds):
    """<tau_1 prod tau_{d_i}>_g via the dilaton equation (independent route)."""
    m = len(ds)
    anomaly = Fraction(1, 24) if (g == 1 and m == 0) else Fraction(0)
    return (2 * g - 2 + m) * correlator(g, tuple(sorted(ds))) + anomaly


def string_value(g, ds):
    """<tau_0 prod tau_{d_i}>_g via the string equation (independent route).

    The quadratic term of the string equation contributes the anomaly
    <tau_0^3>_0 = 1 on top of the lowering sum.
    """
    ds = tuple(sorted(ds))
    anomaly = Fraction(1) if (g == 0 and ds == (0, 0)) else Fraction(0)
    return _string_reduce(g, (0,) + ds) + anomaly
