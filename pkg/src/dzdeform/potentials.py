"""Concrete CohFT inputs at desk scale.

Supported constructions are the trivial one-dimensional theory (potentials
from the psi-class oracle) and products of copies of it with disjoint
component couplings.  The basis is orthonormal and the unit is the sum of
the basis vectors, so unit-direction derivatives are component sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .poly import PolyExpr, tvar
from .series import TSeries
from . import wk

CONSTRUCTIONS = ("trivial-1d", "product-of-trivial")


@dataclass(frozen=True)
class CohFTSpec:
    dim: int
    construction: str
    genus_max: int
    t_degree_max: int

    def validate(self):
        errors = []
        if self.construction not in CONSTRUCTIONS:
            errors.append(f"unknown construction {self.construction!r}")
        if self.construction == "trivial-1d" and self.dim != 1:
            errors.append("trivial-1d requires dim=1")
        if self.dim < 1:
            errors.append("dim must be >= 1")
        if self.genus_max < 0:
            errors.append("genus_max must be >= 0")
        if self.t_degree_max < 3:
            errors.append("t_degree_max must be >= 3")
        return errors


def _partitions_with_parts(total, parts):
    """Sorted tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _partitions_with_parts(total - first, parts - 1):
            if rest and first > rest[0]:
                continue
            yield (first,) + rest


def _one_dim_potential(g, degree_max):
    """F_g for the trivial rank-one theory, truncated at total t-degree."""
    total = PolyExpr.zero()
    n_min = 3 if g == 0 else 1
    for n in range(n_min, degree_max + 1):
        target = 3 * g - 3 + n
        if target < 0:
            continue
        for ds in _partitions_with_parts(target, n):
            c = wk.correlator(g, ds)
            if not c:
                continue
            mult = {}
            for d in ds:
                mult[d] = mult.get(d, 0) + 1
            sym = Fraction(1)
            mono = []
            for d, m in sorted(mult.items()):
                sym /= factorial(m)
                mono.append((tvar(1, d), m))
            total = total + PolyExpr({tuple(mono): c * sym})
    return TSeries(total, degree_max, None)


class PotentialStore:
    """Truncated genus potentials F_g of a CohFT spec."""

    def __init__(self, spec):
        errs = spec.validate()
        if errs:
            raise ValueError("; ".join(errs))
        self.spec = spec
        self.dim = spec.dim
        self.genus_max = spec.genus_max
        self.degree_max = spec.t_degree_max
        self.F = {}
        for g in range(spec.genus_max + 1):
            base = _one_dim_potential(g, spec.t_degree_max)
            if spec.construction == "trivial-1d":
                self.F[g] = base
            else:
                acc = TSeries.zero(spec.t_degree_max, None)
                levels = sorted({gen[2] for m in base.poly.terms for gen, _ in m})
                for alpha in range(1, spec.dim + 1):
                    ren = {(1, p): (alpha, p) for p in levels}
                    acc = acc + base.subs_tvar(ren)
                self.F[g] = acc

    # -- two and three point series ------------------------------------------

    def _check_component(self, *alphas):
        for a in alphas:
            if not 1 <= a <= self.dim:
                raise IndexError(f"component index {a} out of range 1..{self.dim}")

    def two_point(self, alpha, p, beta, q):
        """Omega_{alpha,p;beta,q} as an hbar series of second t-derivatives.

        Level -1 follows the shifted-potential convention and evaluates to
        the constant delta_{p,0} delta_{alpha,beta}.
        """
        self._check_component(alpha, beta)
        if q == -1:
            value = Fraction(1) if (p == 0 and alpha == beta) else Fraction(0)
            return TSeries.const(value, None, self.genus_max)
        if p == -1:
            return self.two_point(beta, q, alpha, p)
        out = TSeries.zero(self.degree_max - 2, self.genus_max)
        for g in range(self.genus_max + 1):
            piece = self.F[g].t_diff(alpha, p).t_diff(beta, q)
            out = out + piece.times_hbar(g).truncate(h_wm=self.genus_max)
        return out

    def three_point(self, alpha, p, beta, q, gamma, r):
        self._check_component(alpha, beta, gamma)
        if -1 in (p, q, r):
            return TSeries.const(0, None, self.genus_max)
        out = TSeries.zero(self.degree_max - 3, self.genus_max)
        for g in range(self.genus_max + 1):
            piece = self.F[g].t_diff(alpha, p).t_diff(beta, q).t_diff(gamma, r)
            out = out + piece.times_hbar(g).truncate(h_wm=self.genus_max)
        return out

    def two_point_unit(self, alpha, p):
        """Omega_{alpha,p;unit,0} = sum over components of the level-0 slot."""
        out = TSeries.zero(self.degree_max - 2, self.genus_max)
        for beta in range(1, self.dim + 1):
            out = out + self.two_point(alpha, p, beta, 0)
        return out

    # -- topological solution jets ---------------------------------------------

    def topological_jets(self, family, alpha, k):
        """t-series of the k-th x-derivative of the topological solution.

        Differentiation along the unit direction realizes d/dx; family 'v'
        is the hbar-constant part, family 'w' the full series.
        """
        self._check_component(alpha)
        series = self.two_point_unit(alpha, 0)
        for _ in range(k):
            series = series.unit_t_diff(self.dim)
        if family == "v":
            v = series.hbar_coefficient(0)
            return TSeries(v.poly, series.t_wm, self.genus_max)
        if family == "w":
            return series
        raise ValueError(f"unknown family {family!r}")

    # -- axioms ---------------------------------------------------------------------

    def _vector_field_O(self, alpha, k, series):
        """The tameness vector fields, recursively defined through genus-0 data."""
        if k == 0:
            return series.t_diff(alpha, 0)
        out = series.t_diff(alpha, k)
        for i in range(k):
            for beta in range(1, self.dim + 1):
                coeff = self.F[0].t_diff(alpha, i).t_diff(beta, 0)
                out = out - coeff * self._vector_field_O(beta, k - i - 1, series)
        return out

    def check_tameness(self, k_max=3, pq_max=2):
        """Topological recursion relations on all retained coefficients.

        Verifies O_{alpha,k}(d2 F_0 / dt dt) = 0 for 0 < k <= k_max and
        O_{alpha,k}(F_g) = 0 for g >= 1, 3g-2 < k <= 3g-2+k_max.
        """
        for alpha in range(1, self.dim + 1):
            for k in range(1, k_max + 1):
                for beta in range(1, self.dim + 1):
                    for gamma in range(1, self.dim + 1):
                        for p in range(pq_max + 1):
                            for q in range(pq_max + 1):
                                series = self.F[0].t_diff(beta, p).t_diff(gamma, q)
                                res = self._vector_field_O(alpha, k, series)
                                if not res.is_zero():
                                    return False, ("genus0", alpha, k, beta, p, gamma, q,
                                                   min(res.poly.terms))
            for g in range(1, self.genus_max + 1):
                for k in range(3 * g - 1, 3 * g - 1 + k_max):
                    res = self._vector_field_O(alpha, k, self.F[g])
                    if not res.is_zero():
                        return False, (f"genus{g}", alpha, k, min(res.poly.terms))
        return True, None

    def check_string(self):
        """String equation for every retained genus."""
        for g in range(self.genus_max + 1):
            lhs = TSeries.zero(self.degree_max - 1, None)
            for alpha in range(1, self.dim + 1):
                lhs = lhs + self.F[g].t_diff(alpha, 0)
            rhs = TSeries.zero(self.degree_max - 1, None)
            levels = sorted({gen[2] for m in self.F[g].poly.terms for gen, _ in m})
            for nu in range(1, self.dim + 1):
                for k in levels:
                    rhs = rhs + TSeries.coupling(nu, k + 1) * self.F[g].t_diff(nu, k)
            if g == 0:
                extra = TSeries.zero(None, None)
                for alpha in range(1, self.dim + 1):
                    extra = extra + TSeries.coupling(alpha, 0) * TSeries.coupling(alpha, 0)
                rhs = rhs + extra * Fraction(1, 2)
            bad = lhs.first_mismatch(rhs)
            if bad is not None:
                return False, (g, bad)
        return True, None


def build_potential(spec):
    return PotentialStore(spec)
