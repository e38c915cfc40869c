"""Truncated polynomials in the couplings t[alpha,p] and hbar, with watermarks.

A TSeries carries the largest total t-degree (t_wm) and hbar power (h_wm)
through which its coefficients are guaranteed correct; None means exact.
Every t-derivative lowers t_wm by one, products take the min, and identity
checks only ever compare coefficients valid on both sides.  This bookkeeping
is the load-bearing part of truncated verification, so it lives in the type.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import PolyExpr, HBAR, tvar


def _t_degree(mono):
    return sum(e for g, e in mono if g[0] == 1)


def _h_degree(mono):
    return sum(e for g, e in mono if g == HBAR)


class WatermarkError(ValueError):
    pass


class TSeries:
    __slots__ = ("poly", "t_wm", "h_wm")

    def __init__(self, poly, t_wm=None, h_wm=None):
        terms = {}
        for m, c in poly.terms.items():
            if t_wm is not None and _t_degree(m) > t_wm:
                continue
            if h_wm is not None and _h_degree(m) > h_wm:
                continue
            terms[m] = c
        self.poly = PolyExpr(terms)
        self.t_wm = t_wm
        self.h_wm = h_wm

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(t_wm=None, h_wm=None):
        return TSeries(PolyExpr.zero(), t_wm, h_wm)

    @staticmethod
    def const(c, t_wm=None, h_wm=None):
        return TSeries(PolyExpr.const(c), t_wm, h_wm)

    @staticmethod
    def coupling(alpha, p):
        return TSeries(PolyExpr.gen(tvar(alpha, p)))

    @staticmethod
    def hbar_unit():
        return TSeries(PolyExpr.gen(HBAR))

    # -- watermark algebra ----------------------------------------------------

    @staticmethod
    def _min(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    def truncate(self, t_wm=None, h_wm=None):
        return TSeries(self.poly, self._min(self.t_wm, t_wm), self._min(self.h_wm, h_wm))

    # -- arithmetic -------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TSeries):
            return other
        return TSeries.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        return TSeries(self.poly + other.poly, self._min(self.t_wm, other.t_wm),
                       self._min(self.h_wm, other.h_wm))

    __radd__ = __add__

    def __neg__(self):
        return TSeries(-self.poly, self.t_wm, self.h_wm)

    def __sub__(self, other):
        other = self._coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TSeries(self.poly * other, self.t_wm, self.h_wm)
        return TSeries(self.poly * other.poly, self._min(self.t_wm, other.t_wm),
                       self._min(self.h_wm, other.h_wm))

    __rmul__ = __mul__

    def __pow__(self, k):
        out = TSeries.const(1, self.t_wm, self.h_wm)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus -----------------------------------------------------------------

    def t_diff(self, alpha, p):
        t_wm = None if self.t_wm is None else self.t_wm - 1
        if t_wm is not None and t_wm < 0:
            raise WatermarkError("t-degree watermark exhausted by derivative")
        return TSeries(self.poly.diff(tvar(alpha, p)), t_wm, self.h_wm)

    def unit_t_diff(self, dim):
        """Derivative along the unit direction, sum over components at level 0."""
        out = PolyExpr.zero()
        for alpha in range(1, dim + 1):
            out = out + self.poly.diff(tvar(alpha, 0))
        t_wm = None if self.t_wm is None else self.t_wm - 1
        if t_wm is not None and t_wm < 0:
            raise WatermarkError("t-degree watermark exhausted by derivative")
        return TSeries(out, t_wm, self.h_wm)

    def hbar_coefficient(self, g):
        if self.h_wm is not None and g > self.h_wm:
            raise WatermarkError(f"hbar^{g} beyond watermark")
        return TSeries(self.poly.hbar_coefficient(g), self.t_wm, None)

    def times_hbar(self, k=1):
        if k == 0:
            return self
        return TSeries(self.poly * PolyExpr.gen(HBAR, k), self.t_wm,
                       None if self.h_wm is None else self.h_wm + k)

    def restrict_primary(self):
        """Set every coupling t[alpha,p>=1] to zero."""
        terms = {}
        for m, c in self.poly.terms.items():
            if any(g[0] == 1 and g[2] >= 1 for g, _ in m):
                continue
            terms[m] = c
        return TSeries(PolyExpr(terms), self.t_wm, self.h_wm)

    def subs_tvar(self, mapping):
        """Relabel couplings (alpha,p) -> (alpha',p); used by product builds."""
        ren = {tvar(a, p): tvar(a2, p2) for (a, p), (a2, p2) in mapping.items()}
        return TSeries(self.poly.rename_gens(ren), self.t_wm, self.h_wm)

    # -- inversion -------------------------------------------------------------------

    def inverse(self):
        """Multiplicative inverse, requires invertible constant term and finite wms."""
        if self.t_wm is None or self.h_wm is None:
            raise WatermarkError("series inversion requires finite watermarks")
        c0 = self.poly.terms.get((), Fraction(0))
        if not c0:
            raise ZeroDivisionError("series has no invertible constant term")
        x = self.poly - PolyExpr.const(c0)
        inv = PolyExpr.zero()
        power = PolyExpr.const(1)
        for k in range(self.t_wm + self.h_wm + 1):
            inv = inv + power * (Fraction((-1) ** k) / c0 ** (k + 1))
            power = TSeries(power * x, self.t_wm, self.h_wm).poly
            if power.is_zero():
                break
        return TSeries(inv, self.t_wm, self.h_wm)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        inv = other.inverse()
        return self * inv

    # -- comparison ---------------------------------------------------------------------

    def is_zero(self):
        return self.poly.is_zero()

    def first_mismatch(self, other):
        """None if equal within the joint watermark, else the offending monomial."""
        other = self._coerce(other)
        diff = self - other
        if diff.poly.is_zero():
            return None
        return min(diff.poly.terms)

    def equals(self, other):
        return self.first_mismatch(other) is None

    def coefficient(self, mono):
        return self.poly.terms.get(mono, Fraction(0))

    def __repr__(self):
        from .poly import poly_text
        return f"TSeries({poly_text(self.poly)}; t<={self.t_wm}, h<={self.h_wm})"
