"""The psi-class intersection number oracle."""

import math
import random
from fractions import Fraction

from dzdeform.wk import correlator, dilaton_value, string_value

KNOWN = {
    (0, (0, 0, 0)): Fraction(1),
    (0, (0, 0, 0, 1)): Fraction(1),
    (0, (0, 0, 0, 0, 2)): Fraction(1),
    (0, (0, 0, 0, 1, 1)): Fraction(2),
    (0, (0, 0, 2)): Fraction(0),          # dimension constraint
    (1, (1,)): Fraction(1, 24),
    (1, (0, 2)): Fraction(1, 24),
    (1, (1, 1)): Fraction(1, 24),
    (1, (0, 0, 3)): Fraction(1, 24),
    (1, (0, 1, 2)): Fraction(1, 12),
    (1, (1, 1, 1)): Fraction(1, 12),
    (2, (4,)): Fraction(1, 1152),
    (2, (1, 4)): Fraction(1, 384),
    (2, (2, 3)): Fraction(29, 5760),
    (3, (7,)): Fraction(1, 82944),
}


def test_known_values():
    for (g, ds), want in KNOWN.items():
        assert correlator(g, tuple(sorted(ds))) == want, (g, ds)


def test_genus_zero_closed_formula():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(3, 9)
        cuts = sorted(rng.randint(0, n - 3) for _ in range(n - 1))
        parts = [cuts[0]] + [cuts[i + 1] - cuts[i] for i in range(n - 2)] + [n - 3 - cuts[-1]]
        want = Fraction(math.factorial(n - 3))
        for p in parts:
            want /= math.factorial(p)
        assert correlator(0, tuple(sorted(parts))) == want


def test_string_dilaton_cross_checks():
    rng = random.Random(12)
    seen = 0
    while seen < 30:
        g = rng.randint(0, 1)
        n = rng.randint(1, 5)
        ds = tuple(sorted(rng.randint(0, 3) for _ in range(n)))
        assert correlator(g, tuple(sorted(ds + (0,)))) == string_value(g, ds)
        assert correlator(g, tuple(sorted(ds + (1,)))) == dilaton_value(g, ds)
        seen += 1


def test_unstable_and_empty():
    assert correlator(0, (0, 0)) == 0
    assert correlator(1, ()) == 0
    assert correlator(-1, (0,)) == 0
