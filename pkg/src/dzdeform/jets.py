"""Formal jet space calculus: total derivative, jet partials, variational derivative.

Jet variables v[alpha,s] / w[alpha,s] / u[alpha,s] stand for s-th x-derivatives
of the dependent variables.  Expressions are exact rational functions of
finitely many jets, hbar, and generic function symbols.

A generic symbol is either

* unbound -- an arbitrary function of a declared finite set of jets; its
  x-derivative expands by the chain rule and its jet partials are recorded
  in the symbol's derivative multiset, or
* bound -- a function whose x-derivative is a known jet function while its
  own jet dependence is left undetermined (used for the two-point primitives
  dF/dq that are not functions of finitely many jets).  Taking a jet partial
  of a bound symbol is an error; algorithms must eliminate such symbols
  before differentiating.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import FractionExpr, PolyExpr, HBAR, jetvar, symgen, frac_text

FAM_V, FAM_W, FAM_U = 0, 1, 2
FAMILY_NAMES = {FAM_V: "v", FAM_W: "w", FAM_U: "u"}


class BoundSymbolDerivativeError(ValueError):
    """Jet partial requested of a symbol with no jet representation."""


class SymbolInfo:
    __slots__ = ("name", "deps", "dx_image")

    def __init__(self, name, deps, dx_image):
        self.name = name
        self.deps = tuple(deps)
        self.dx_image = dx_image

    @property
    def bound(self):
        return self.dx_image is not None


_REGISTRY: dict[str, SymbolInfo] = {}


def define_symbol(name, deps=(), dx_image=None):
    """Register a generic function symbol; returns its level-0 JetFunction."""
    info = SymbolInfo(name, deps, dx_image)
    old = _REGISTRY.get(name)
    if old is not None and (old.deps != info.deps or
                            (old.dx_image is None) != (dx_image is None)):
        raise ValueError(f"symbol {name!r} already defined with different spec")
    _REGISTRY[name] = info
    return JetFunction(FractionExpr.gen(symgen(name)))


def symbol_info(name):
    return _REGISTRY[name]


def reset_symbols():
    _REGISTRY.clear()


def _derivs_add(derivs, jv):
    d = dict(derivs)
    d[jv] = d.get(jv, 0) + 1
    return tuple(sorted(d.items()))


def _derivs_remove_shift(derivs, jv):
    """Remove one jv and add jv with order lowered by one (0 drops the term)."""
    d = dict(derivs)
    d[jv] -= 1
    if not d[jv]:
        del d[jv]
    fam, alpha, s = jv[1], jv[2], jv[3]
    if s > 0:
        low = jetvar(fam, alpha, s - 1)
        d[low] = d.get(low, 0) + 1
        return tuple(sorted(d.items()))
    return None  # partial with respect to order -1 is zero -> term survives without shift


class JetFunction:
    """Exact rational function of jet variables, hbar and symbols.

    The hbar watermark (None = valid to all orders) records through which
    power of hbar the coefficients are trustworthy; it is the min across
    arithmetic, and every stored numerator is reduced mod hbar^(wm+1).
    The denominator is kept hbar-free, expanding geometrically on demand.
    """

    __slots__ = ("expr", "watermark")

    def __init__(self, expr, watermark=None):
        if expr.den.hbar_degree() > 0:
            if watermark is None:
                raise ValueError("hbar-dependent denominator needs a finite watermark")
            expr = _expand_hbar_den(expr, watermark)
        if watermark is not None:
            expr = FractionExpr(expr.num.hbar_truncate(watermark), expr.den,
                                _normalized=True)
        self.expr = expr
        self.watermark = watermark

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero():
        return JetFunction(FractionExpr.zero_frac())

    @staticmethod
    def const(c):
        return JetFunction(FractionExpr.const(c))

    @staticmethod
    def var(fam, alpha, s):
        return JetFunction(FractionExpr.gen(jetvar(fam, alpha, s)))

    @staticmethod
    def hbar():
        return JetFunction(FractionExpr.gen(HBAR))

    # -- bookkeeping ---------------------------------------------------------

    def is_zero(self):
        return self.expr.is_zero()

    def jet_vars(self):
        return sorted(g for g in self.expr.num.generators() | self.expr.den.generators()
                      if g[0] == 2)

    def symbols(self):
        return sorted(g for g in self.expr.num.generators() | self.expr.den.generators()
                      if g[0] == 3)

    def max_jet_order(self):
        return max((g[3] for g in self.jet_vars()), default=-1)

    def families(self):
        return {g[1] for g in self.jet_vars()}

    def hbar_component(self, g):
        if self.watermark is not None and g > self.watermark:
            raise ValueError(f"hbar^{g} beyond watermark {self.watermark}")
        num = self.expr.num.hbar_coefficient(g)
        return JetFunction(FractionExpr(num, self.expr.den), None)

    def truncate(self, order):
        wm = order if self.watermark is None else min(order, self.watermark)
        return JetFunction(self.expr, wm)

    def rename_family(self, src, dst):
        mapping = {g: jetvar(dst, g[2], g[3]) for g in self.jet_vars() if g[1] == src}
        return JetFunction(self.expr.rename_gens(mapping), self.watermark)

    def equals(self, other, hbar_order=None):
        diff = self - other
        wm = diff.watermark
        if hbar_order is not None:
            wm = hbar_order if wm is None else min(wm, hbar_order)
        if wm is not None:
            return diff.expr.num.hbar_truncate(wm).is_zero()
        return diff.expr.is_zero()

    def __eq__(self, other):
        return isinstance(other, JetFunction) and self.equals(other)

    def __hash__(self):
        return hash(self.expr)

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _wm(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    def _coerce(self, other):
        if isinstance(other, JetFunction):
            return other
        return JetFunction.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        return JetFunction(self.expr + other.expr, self._wm(self.watermark, other.watermark))

    __radd__ = __add__

    def __neg__(self):
        return JetFunction(-self.expr, self.watermark)

    def __sub__(self, other):
        other = self._coerce(other)
        return JetFunction(self.expr - other.expr, self._wm(self.watermark, other.watermark))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return JetFunction(self.expr * other, self.watermark)
        return JetFunction(self.expr * other.expr, self._wm(self.watermark, other.watermark))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return JetFunction(self.expr / other, self.watermark)
        return JetFunction(self.expr / other.expr, self._wm(self.watermark, other.watermark))

    def __pow__(self, k):
        return JetFunction(self.expr ** k, self.watermark)

    def __repr__(self):
        return f"JetFunction({frac_text(self.expr)})"

    def text(self):
        return frac_text(self.expr.normalize(full=True))


def _expand_hbar_den(expr, wm):
    """Rewrite num/den with hbar-dependent den as a truncated hbar series.

    1/(d0 + tail) = sum_k (-tail)^k / d0^(k+1), exact through hbar^wm since
    tail is a multiple of hbar.
    """
    den = expr.den
    d0 = den.hbar_coefficient(0)
    if d0.is_zero():
        raise ZeroDivisionError("denominator vanishes at hbar=0")
    tail = den - d0
    num = PolyExpr.zero()
    power = expr.num
    for j in range(wm + 1):
        num = num + (power * d0 ** (wm - j)).hbar_truncate(wm)
        power = (power * tail * Fraction(-1)).hbar_truncate(wm)
        if power.is_zero():
            break
    return FractionExpr(num.hbar_truncate(wm), d0 ** (wm + 1))


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------


def _dx_generator(g):
    """x-derivative of a single generator, as a FractionExpr."""
    if g == HBAR:
        return FractionExpr.zero_frac()
    if g[0] == 1:
        raise ValueError("t-variables have no place inside jet functions")
    if g[0] == 2:
        return FractionExpr.gen(jetvar(g[1], g[2], g[3] + 1))
    if g[0] == 3:
        name, derivs = g[1], g[2]
        info = _REGISTRY[name]
        if info.bound:
            if derivs:
                raise BoundSymbolDerivativeError(
                    f"bound symbol {name} should not carry jet partials")
            return info.dx_image.expr
        out = FractionExpr.zero_frac()
        for dep in info.deps:
            fam, alpha, s = dep[1], dep[2], dep[3]
            out = out + (FractionExpr.gen(symgen(name, _derivs_add(derivs, dep)))
                         * FractionExpr.gen(jetvar(fam, alpha, s + 1)))
        return out
    raise ValueError(f"cannot differentiate generator {g!r}")


def _poly_dx(p):
    out = FractionExpr.zero_frac()
    for g in p.generators():
        dg = _dx_generator(g)
        if not dg.is_zero():
            out = out + FractionExpr.from_poly(p.diff(g)) * dg
    return out


def total_x_derivative(f):
    """The total derivative d/dx = sum over jets u_{a,k+1} d/du_{a,k}."""
    num, den = f.expr.num, f.expr.den
    dn = _poly_dx(num)
    if den.is_const():
        return JetFunction(dn / den.const_value(), f.watermark)
    dd = _poly_dx(den)
    expr = (dn * FractionExpr.from_poly(den)
            - FractionExpr.from_poly(num) * dd) / FractionExpr.from_poly(den * den)
    return JetFunction(expr, f.watermark)


def dx_iter(f, k):
    for _ in range(k):
        f = total_x_derivative(f)
    return f


def _poly_jet_partial(p, jv):
    out = p.diff(jv)
    result = FractionExpr.from_poly(out)
    for g in p.generators():
        if g[0] != 3:
            continue
        name, derivs = g[1], g[2]
        info = _REGISTRY[name]
        if info.bound:
            raise BoundSymbolDerivativeError(
                f"jet partial of bound symbol {name} is not defined")
        if jv in info.deps:
            img = FractionExpr.gen(symgen(name, _derivs_add(derivs, jv)))
            result = result + FractionExpr.from_poly(p.diff(g)) * img
    return result


def jet_partial(f, fam, alpha, s):
    """Formal partial derivative with respect to the jet variable (fam, alpha, s)."""
    jv = jetvar(fam, alpha, s)
    num, den = f.expr.num, f.expr.den
    dn = _poly_jet_partial(num, jv)
    if den.degree_in(jv) == 0 and not any(g[0] == 3 for g in den.generators()):
        return JetFunction(dn / FractionExpr.from_poly(den), f.watermark)
    dd = _poly_jet_partial(den, jv)
    expr = (dn * FractionExpr.from_poly(den)
            - FractionExpr.from_poly(num) * dd) / FractionExpr.from_poly(den * den)
    return JetFunction(expr, f.watermark)


def jet_dependencies(f, fam):
    """Jet orders s per component alpha on which f can depend."""
    deps = set()
    for g in f.jet_vars():
        if g[1] == fam:
            deps.add((g[2], g[3]))
    for g in f.symbols():
        name, derivs = g[1], g[2]
        info = _REGISTRY[name]
        if info.bound:
            continue
        for dep in info.deps:
            if dep[1] == fam:
                deps.add((dep[2], dep[3]))
        for jv, _ in derivs:
            if jv[1] == fam:
                deps.add((jv[2], jv[3]))
    return sorted(deps)


def variational_derivative(f, fam, alpha):
    """Euler operator: sum_s (-d_x)^s of df/du_{alpha,s}."""
    orders = sorted({s for a, s in jet_dependencies(f, fam) if a == alpha})
    out = JetFunction.zero()
    for s in orders:
        term = jet_partial(f, fam, alpha, s)
        term = dx_iter(term, s)
        if s % 2:
            term = -term
        out = out + term
    if f.watermark is not None:
        out = out.truncate(f.watermark)
    return out


def linearization_coeffs(f, fam, alpha):
    """Coefficients {s: df/du_{alpha,s}} of the linearization operator."""
    coeffs = {}
    for a, s in jet_dependencies(f, fam):
        if a != alpha:
            continue
        c = jet_partial(f, fam, alpha, s)
        if not c.is_zero():
            coeffs[s] = c
    return coeffs


def differential_degree(f, fam=None):
    """Grading report with deg u_{alpha,i} = i, per hbar order.

    Returns {hbar_order: (max_degree, homogeneous_flag)}.  For fractions the
    degree of a term is deg(num term) - deg(den); requires a homogeneous
    denominator (flag False otherwise).
    """

    def term_degrees(p):
        degs = {}
        for m in p.terms:
            h = 0
            d = 0
            for g, e in m:
                if g == HBAR:
                    h = e
                elif g[0] == 2 and (fam is None or g[1] == fam):
                    d += g[3] * e
            degs.setdefault(h, set()).add(d)
        return degs

    den_degs = term_degrees(f.expr.den)
    den_homog = len(den_degs) == 1 and all(len(v) == 1 for v in den_degs.values())
    den_deg = next(iter(den_degs[0])) if den_homog and 0 in den_degs else 0
    report = {}
    for h, degs in term_degrees(f.expr.num).items():
        shifted = {d - den_deg for d in degs}
        report[h] = (max(shifted), len(shifted) == 1 and den_homog)
    return report


def random_jet_polynomial(rng, fam, dim, max_order, max_terms=4, max_deg=2,
                          symbols=()):
    """Random small jet polynomial for property tests (exact coefficients)."""
    terms = JetFunction.zero()
    for _ in range(rng.randint(1, max_terms)):
        coeff = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        if coeff == 0:
            coeff = Fraction(1)
        factor = JetFunction.const(coeff)
        for _ in range(rng.randint(0, max_deg)):
            alpha = rng.randint(1, dim)
            s = rng.randint(0, max_order)
            factor = factor * JetFunction.var(fam, alpha, s)
        if symbols and rng.random() < 0.5:
            factor = factor * rng.choice(symbols)
        terms = terms + factor
    return terms
