"""Exact arithmetic substrate: multivariate polynomials and fractions over Q.

Generators are ordered tuples (total order = tuple order):

    (0,)                    the dispersion parameter h (hbar)
    (1, alpha, p)           coupling variable t[alpha,p]
    (2, fam, alpha, s)      jet variable fam in {0:'v', 1:'w', 2:'u'}, s-th x-derivative
    (3, name, derivs)       generic function symbol with applied jet-partials

so hbar < t-variables < jet variables < function symbols, and within each
class the order is lexicographic in the index data.  This order is stable
across runs and fixes the canonical serialization used by golden tests.

Polynomials are sparse dicts  monomial -> Fraction  with monomials stored as
sorted tuples of (generator, exponent) pairs.  Fractions of polynomials are
kept lightly normalized (content and sign); multivariate gcd reduction is
only performed by normalize(full=True), never implicitly, since zero tests
go through exact numerator expansion and need no gcd.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

HBAR = (0,)

ZERO = Fraction(0)
ONE = Fraction(1)


def tvar(alpha, p):
    return (1, alpha, p)


def jetvar(fam, alpha, s):
    return (2, fam, alpha, s)


def symgen(name, derivs=()):
    return (3, name, tuple(derivs))


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        g1, e1 = m1[i]
        g2, e2 = m2[j]
        if g1 == g2:
            out.append((g1, e1 + e2))
            i += 1
            j += 1
        elif g1 < g2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def _mono_degree(m, gen):
    for g, e in m:
        if g == gen:
            return e
    return 0


class PolyExpr:
    """Sparse multivariate polynomial over Q in the ordered generators."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = terms if terms is not None else {}

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero():
        return PolyExpr({})

    @staticmethod
    def const(c):
        c = Fraction(c)
        return PolyExpr({(): c}) if c else PolyExpr({})

    @staticmethod
    def gen(g, exp=1):
        if exp == 0:
            return PolyExpr({(): ONE})
        return PolyExpr({((g, exp),): ONE})

    # -- basic queries -------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def const_value(self):
        if not self.terms:
            return ZERO
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        raise ValueError("not a constant polynomial")

    def generators(self):
        gens = set()
        for m in self.terms:
            for g, _ in m:
                gens.add(g)
        return gens

    def degree_in(self, gen):
        return max((_mono_degree(m, gen) for m in self.terms), default=0)

    def leading_coeff(self):
        """Coefficient of the largest monomial in the canonical order."""
        if not self.terms:
            return ZERO
        return self.terms[max(self.terms)]

    def __eq__(self, other):
        return isinstance(other, PolyExpr) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, PolyExpr):
            other = PolyExpr.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return PolyExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return PolyExpr({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, PolyExpr):
            other = PolyExpr.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return PolyExpr.const(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return PolyExpr({})
            return PolyExpr({m: v * c for m, v in self.terms.items()})
        if not self.terms or not other.terms:
            return PolyExpr({})
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                v = out.get(m)
                if v is None:
                    out[m] = c
                else:
                    v = v + c
                    if v:
                        out[m] = v
                    else:
                        del out[m]
        return PolyExpr(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of polynomial")
        result = PolyExpr.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- calculus ------------------------------------------------------

    def diff(self, gen):
        out = {}
        for m, c in self.terms.items():
            e = _mono_degree(m, gen)
            if not e:
                continue
            newm = tuple((g, x) if g != gen else (g, x - 1) for g, x in m if g != gen or x > 1)
            nc = c * e
            v = out.get(newm)
            out[newm] = nc if v is None else v + nc
            if not out[newm]:
                del out[newm]
        return PolyExpr(out)

    def subs(self, bindings):
        """Simultaneous substitution gen -> FractionExpr; returns FractionExpr."""
        relevant = {g: f for g, f in bindings.items() if any(_mono_degree(m, g) for m in self.terms)}
        if not relevant:
            return FractionExpr(self, PolyExpr.const(1))
        powers = {g: [FractionExpr.one()] for g in relevant}
        result = FractionExpr.zero_frac()
        for m, c in self.terms.items():
            term = FractionExpr(PolyExpr.const(c), PolyExpr.const(1))
            rest = []
            for g, e in m:
                if g in relevant:
                    pw = powers[g]
                    while len(pw) <= e:
                        pw.append(pw[-1] * relevant[g])
                    term = term * pw[e]
                else:
                    rest.append((g, e))
            if rest:
                term = term * FractionExpr(PolyExpr({tuple(rest): ONE}), PolyExpr.const(1))
            result = result + term
        return result

    def eval(self, point):
        """Evaluate at a rational point (dict gen -> Fraction); absent gens error."""
        total = ZERO
        for m, c in self.terms.items():
            v = c
            for g, e in m:
                v *= point[g] ** e
            total += v
        return total

    def rename_gens(self, mapping):
        """Relabel generators by a dict (must stay a generator, e.g. family renames)."""
        out = {}
        for m, c in self.terms.items():
            newm = tuple(sorted((mapping.get(g, g), e) for g, e in m))
            v = out.get(newm)
            out[newm] = c if v is None else v + c
            if not out[newm]:
                del out[newm]
        return PolyExpr(out)

    # -- hbar grading --------------------------------------------------

    def hbar_coefficient(self, g):
        """Coefficient of hbar^g as a polynomial without hbar."""
        out = {}
        for m, c in self.terms.items():
            if _mono_degree(m, HBAR) == g:
                out[tuple(p for p in m if p[0] != HBAR)] = c
        return PolyExpr(out)

    def hbar_truncate(self, order):
        out = {m: c for m, c in self.terms.items() if _mono_degree(m, HBAR) <= order}
        return PolyExpr(out)

    def hbar_degree(self):
        return max((_mono_degree(m, HBAR) for m in self.terms), default=0)

    # -- content and text ----------------------------------------------

    def content(self):
        """Positive rational content (gcd of coefficients); 0 for the zero poly."""
        if not self.terms:
            return ZERO
        num = 0
        den = 1
        for c in self.terms.values():
            num = _int_gcd(num, abs(c.numerator))
            den = den * c.denominator // _int_gcd(den, c.denominator)
        return Fraction(num, den)

    def monomial_content(self):
        """Largest monomial dividing every term."""
        mono = None
        for m in self.terms:
            if mono is None:
                mono = dict(m)
            else:
                cur = dict(m)
                mono = {g: min(e, cur[g]) for g, e in mono.items() if g in cur}
            if not mono:
                return ()
        return tuple(sorted((mono or {}).items()))

    def divide_monomial(self, mono):
        if not mono:
            return self
        div = dict(mono)
        out = {}
        for m, c in self.terms.items():
            newm = []
            for g, e in m:
                k = div.get(g, 0)
                if e - k:
                    newm.append((g, e - k))
            out[tuple(newm)] = c
        return PolyExpr(out)

    def __repr__(self):
        return f"PolyExpr({poly_text(self)})"


# ---------------------------------------------------------------------------
# multivariate gcd (recursive primitive Euclid); only used by full normalize
# ---------------------------------------------------------------------------


def _as_univariate(p, gen):
    """Split p into dict degree -> PolyExpr coefficient in the chosen generator."""
    coeffs = {}
    for m, c in p.terms.items():
        e = _mono_degree(m, gen)
        rest = tuple(t for t in m if t[0] != gen)
        coeffs.setdefault(e, {})[rest] = c
    return {e: PolyExpr(t) for e, t in coeffs.items()}


def _from_univariate(coeffs, gen):
    out = PolyExpr({})
    for e, p in coeffs.items():
        if e:
            out = out + p * PolyExpr.gen(gen, e)
        else:
            out = out + p
    return out


def _poly_content_wrt(p, gen):
    """gcd of the univariate coefficients of p in gen."""
    coeffs = list(_as_univariate(p, gen).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        g = poly_gcd(g, c)
        if g.is_const():
            break
    return g


def _pseudo_rem(a, b, gen):
    """Pseudo-remainder of a by b as univariate polynomials in gen."""
    ua = _as_univariate(a, gen)
    ub = _as_univariate(b, gen)
    db = max(ub)
    lb = ub[db]
    r = a
    while not r.is_zero():
        ur = _as_univariate(r, gen)
        dr = max(ur)
        if dr < db:
            break
        r = r * lb - b * ur[dr] * PolyExpr.gen(gen, dr - db)
        if not r.is_zero() and r.degree_in(gen) >= dr:
            raise ArithmeticError("pseudo-division failed to reduce degree")
    return r


def poly_gcd(a, b):
    """gcd of two polynomials over Q, monic-primitive normalization."""
    if a.is_zero():
        return _make_primitive(b)
    if b.is_zero():
        return _make_primitive(a)
    if a.is_const() or b.is_const():
        return PolyExpr.const(1)
    gens = sorted(a.generators() | b.generators())
    gen = gens[-1]
    da, db = a.degree_in(gen), b.degree_in(gen)
    if da == 0 or db == 0:
        # gen appears in only one of them: gcd divides the contents
        ca = _poly_content_wrt(a, gen) if da else a
        cb = _poly_content_wrt(b, gen) if db else b
        return poly_gcd(ca, cb)
    ca = _poly_content_wrt(a, gen)
    cb = _poly_content_wrt(b, gen)
    cont = poly_gcd(ca, cb)
    pa = _exact_div(a, ca)
    pb = _exact_div(b, cb)
    if pa.degree_in(gen) < pb.degree_in(gen):
        pa, pb = pb, pa
    while True:
        r = _pseudo_rem(pa, pb, gen)
        if r.is_zero():
            break
        if r.degree_in(gen) == 0:
            pb = PolyExpr.const(1)
            break
        r = _exact_div(r, _poly_content_wrt(r, gen))
        pa, pb = pb, r
    return _make_primitive(cont * pb)


def _make_primitive(p):
    if p.is_zero():
        return p
    c = p.content()
    p = p * (1 / c)
    if p.leading_coeff() < 0:
        p = -p
    return p


def _exact_div(a, b):
    """Exact polynomial division a / b (b must divide a)."""
    if b.is_const():
        return a * (1 / b.const_value())
    gens = sorted(b.generators())
    gen = gens[-1]
    ub = _as_univariate(b, gen)
    db = max(ub)
    lb = ub[db]
    q = PolyExpr({})
    r = a
    while not r.is_zero():
        ur = _as_univariate(r, gen)
        dr = max(ur)
        if dr < db:
            raise ArithmeticError("exact division with remainder")
        qc = _exact_div(ur[dr], lb)
        qterm = qc * PolyExpr.gen(gen, dr - db) if dr > db else qc
        q = q + qterm
        r = r - qterm * b
    return q


# ---------------------------------------------------------------------------
# fractions
# ---------------------------------------------------------------------------


class MalformedExpressionError(ValueError):
    pass


class FractionExpr:
    """Quotient num/den of PolyExpr, den nonzero, lightly normalized."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _normalized=False):
        if den is None:
            den = PolyExpr.const(1)
        if den.is_zero():
            raise MalformedExpressionError("zero denominator")
        if not _normalized:
            num, den = _light_normalize(num, den)
        self.num = num
        self.den = den

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero_frac():
        return FractionExpr(PolyExpr({}), PolyExpr.const(1), _normalized=True)

    @staticmethod
    def one():
        return FractionExpr(PolyExpr.const(1), PolyExpr.const(1), _normalized=True)

    @staticmethod
    def const(c):
        return FractionExpr(PolyExpr.const(c), PolyExpr.const(1), _normalized=True)

    @staticmethod
    def gen(g, exp=1):
        return FractionExpr(PolyExpr.gen(g, exp), PolyExpr.const(1), _normalized=True)

    @staticmethod
    def from_poly(p):
        return FractionExpr(p, PolyExpr.const(1))

    # -- queries ----------------------------------------------------------

    def is_zero(self):
        """Exact zero test: the (normalized) numerator is the zero polynomial."""
        return self.num.is_zero()

    def is_poly(self):
        return self.den.is_const()

    def as_poly(self):
        if not self.den.is_const():
            f = self.normalize(full=True)
            if not f.den.is_const():
                raise ValueError("fraction is not polynomial")
            return f.num * (1 / f.den.const_value())
        return self.num * (1 / self.den.const_value())

    def equals(self, other):
        """Exact equality by cross-multiplication; never probabilistic."""
        return (self.num * other.den - other.num * self.den).is_zero()

    def __eq__(self, other):
        return isinstance(other, FractionExpr) and self.equals(other)

    def __hash__(self):
        n = self.normalize(full=True)
        return hash((n.num, n.den))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, FractionExpr):
            other = FractionExpr.const(other)
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return FractionExpr(self.num + other.num, self.den)
        return FractionExpr(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return FractionExpr(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        if not isinstance(other, FractionExpr):
            other = FractionExpr.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return FractionExpr.const(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return FractionExpr.zero_frac()
            return FractionExpr(self.num * c, self.den, _normalized=True)
        if self.num.is_zero() or other.num.is_zero():
            return FractionExpr.zero_frac()
        return FractionExpr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FractionExpr.const(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero fraction")
        return FractionExpr(self.num * other.den, self.den * other.num)

    def __pow__(self, k):
        if k < 0:
            return FractionExpr(self.den, self.num) ** (-k)
        return FractionExpr(self.num ** k, self.den ** k)

    # -- calculus -----------------------------------------------------------

    def diff(self, gen):
        dn = self.num.diff(gen)
        dd = self.den.diff(gen)
        if dd.is_zero():
            return FractionExpr(dn, self.den)
        return FractionExpr(dn * self.den - self.num * dd, self.den * self.den)

    def subs(self, bindings):
        num = self.num.subs(bindings)
        den = self.den.subs(bindings)
        if den.is_zero():
            bad = sorted(bindings)[0]
            raise ZeroDivisionError(f"substitution produced zero denominator (binding {bad})")
        return num / den

    def rename_gens(self, mapping):
        return FractionExpr(self.num.rename_gens(mapping), self.den.rename_gens(mapping),
                            _normalized=True)

    def eval(self, point):
        d = self.den.eval(point)
        if not d:
            raise ZeroDivisionError("denominator vanishes at evaluation point")
        return self.num.eval(point) / d

    # -- normal form ---------------------------------------------------------

    def normalize(self, full=False):
        """Canonical representative; with full=True divide out the polynomial gcd."""
        num, den = self.num, self.den
        if full and not num.is_zero() and not den.is_const():
            g = poly_gcd(num, den)
            if not g.is_const():
                num = _exact_div(num, g)
                den = _exact_div(den, g)
        return FractionExpr(num, den)

    def __repr__(self):
        return f"FractionExpr({frac_text(self)})"


def _light_normalize(num, den):
    if num.is_zero():
        return num, PolyExpr.const(1)
    mn, md = num.monomial_content(), den.monomial_content()
    if mn and md:
        common = dict(mn)
        cut = tuple(sorted((g, min(e, dict(md).get(g, 0))) for g, e in common.items()
                           if dict(md).get(g, 0)))
        cut = tuple((g, e) for g, e in cut if e)
        if cut:
            num = num.divide_monomial(cut)
            den = den.divide_monomial(cut)
    cd = den.content()
    num = num * (1 / cd)
    den = den * (1 / cd)
    if den.leading_coeff() < 0:
        num, den = -num, -den
    return num, den


# ---------------------------------------------------------------------------
# randomized evaluation pre-screen
# ---------------------------------------------------------------------------


def random_point(gens, rng, bound=40):
    return {g: Fraction(rng.randint(1, bound), rng.randint(1, 7)) for g in gens}


def probably_nonzero(f, rng, attempts=3):
    """Fast screen: True means certainly nonzero; False means inconclusive."""
    gens = sorted(f.num.generators() | f.den.generators())
    for _ in range(attempts):
        try:
            if f.eval(random_point(gens, rng)):
                return True
        except ZeroDivisionError:
            continue
    return False


# ---------------------------------------------------------------------------
# canonical serialization
# ---------------------------------------------------------------------------

_FAM_NAMES = {0: "v", 1: "w", 2: "u"}


def gen_text(g):
    if g == HBAR:
        return "h"
    if g[0] == 1:
        return f"t[{g[1]},{g[2]}]"
    if g[0] == 2:
        return f"{_FAM_NAMES[g[1]]}[{g[2]},{g[3]}]"
    if g[0] == 3:
        name, derivs = g[1], g[2]
        if not derivs:
            return name + "{}"
        parts = []
        for jv, mult in derivs:
            t = gen_text(jv)
            parts.append(t if mult == 1 else f"{t}^{mult}")
        return name + "{" + ",".join(parts) + "}"
    raise ValueError(f"unknown generator {g!r}")


def _mono_text(m, coeff):
    parts = []
    if coeff == 1 and m:
        pass
    elif coeff == -1 and m:
        parts.append("-")
    else:
        parts.append(str(coeff))
    body = "*".join(gen_text(g) if e == 1 else f"{gen_text(g)}^{e}" for g, e in m)
    if body:
        if parts and parts[-1] not in ("-",):
            return parts[0] + "*" + body
        return "".join(parts) + body
    return str(coeff)


def poly_text(p):
    if not p.terms:
        return "0"
    pieces = [_mono_text(m, p.terms[m]) for m in sorted(p.terms)]
    out = pieces[0]
    for piece in pieces[1:]:
        if piece.startswith("-"):
            out += " - " + piece[1:]
        else:
            out += " + " + piece
    return out


def frac_text(f):
    if f.num.is_zero():
        return "0"
    if f.den.is_const() and f.den.const_value() == 1:
        return poly_text(f.num)
    return f"({poly_text(f.num)})/({poly_text(f.den)})"
