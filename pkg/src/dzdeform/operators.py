"""Normal-form differential operators sum_s c_s d_x^s with jet-function coefficients.

All coefficients stand to the left of powers of d_x; composition reorders via
the Leibniz rule d_x^s o f = sum_k C(s,k) (d_x^k f) d_x^(s-k).  Purely
differential calculus: there is no formal antiderivative anywhere.
"""

from __future__ import annotations

from math import comb

from .jets import (JetFunction, total_x_derivative, dx_iter, jet_partial,
                   jet_dependencies, linearization_coeffs, variational_derivative)


class DiffOperator:
    """Finite normal-form operator {s >= 0: JetFunction coefficient}."""

    __slots__ = ("coeffs", "watermark")

    def __init__(self, coeffs=None, watermark=None):
        clean = {}
        wm = watermark
        for s, c in (coeffs or {}).items():
            if c.watermark is not None:
                wm = c.watermark if wm is None else min(wm, c.watermark)
        for s, c in (coeffs or {}).items():
            if wm is not None:
                c = c.truncate(wm)
            if not c.is_zero():
                clean[s] = c
        self.coeffs = clean
        self.watermark = wm

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero():
        return DiffOperator({})

    @staticmethod
    def identity():
        return DiffOperator({0: JetFunction.const(1)})

    @staticmethod
    def dx(power=1):
        return DiffOperator({power: JetFunction.const(1)})

    @staticmethod
    def mult(f):
        return DiffOperator({0: f})

    @staticmethod
    def from_coeffs(coeffs, watermark=None):
        return DiffOperator(coeffs, watermark)

    # -- structure -----------------------------------------------------------

    def order(self):
        return max(self.coeffs, default=-1)

    def is_zero(self, hbar_order=None):
        if hbar_order is None:
            return not self.coeffs
        return all(c.equals(JetFunction.zero(), hbar_order) for c in self.coeffs.values())

    def coeff(self, s):
        return self.coeffs.get(s, JetFunction.zero())

    def truncate(self, order):
        return DiffOperator(dict(self.coeffs), order)

    def hbar_component(self, g):
        return DiffOperator({s: c.hbar_component(g) for s, c in self.coeffs.items()})

    def map_coeffs(self, fn):
        return DiffOperator({s: fn(c) for s, c in self.coeffs.items()}, self.watermark)

    # -- algebra ---------------------------------------------------------------

    def __add__(self, other):
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out[s] + c if s in out else c
        wm = JetFunction._wm(self.watermark, other.watermark)
        return DiffOperator(out, wm)

    def __neg__(self):
        return DiffOperator({s: -c for s, c in self.coeffs.items()}, self.watermark)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return DiffOperator({s: c * scalar for s, c in self.coeffs.items()}, self.watermark)

    __rmul__ = __mul__

    def lmul(self, f):
        """Left multiplication by a jet function."""
        return DiffOperator({s: f * c for s, c in self.coeffs.items()},
                            JetFunction._wm(self.watermark, f.watermark))

    def compose(self, other):
        out = {}
        wm = JetFunction._wm(self.watermark, other.watermark)
        for s, a in self.coeffs.items():
            for k, b in other.coeffs.items():
                db = b
                for m in range(s + 1):
                    term = a * db * comb(s, m)
                    key = s - m + k
                    out[key] = out[key] + term if key in out else term
                    if m < s:
                        db = total_x_derivative(db)
        return DiffOperator(out, wm)

    def adjoint(self):
        out = {}
        for s, c in self.coeffs.items():
            sign = -1 if s % 2 else 1
            dc = c
            for m in range(s + 1):
                term = dc * (sign * comb(s, m))
                key = s - m
                out[key] = out[key] + term if key in out else term
                if m < s:
                    dc = total_x_derivative(dc)
        return DiffOperator(out, self.watermark)

    def apply(self, f):
        out = JetFunction.zero()
        df = f
        last = 0
        for s in sorted(self.coeffs):
            df = dx_iter(df, s - last)
            last = s
            out = out + self.coeffs[s] * df
        if self.watermark is not None:
            out = out.truncate(self.watermark)
        return out

    def __repr__(self):
        return f"DiffOperator({operator_text(self)})"


def linearization(f, fam, alpha):
    """The operator sum_s (df/du_{alpha,s}) d_x^s attached to f."""
    return DiffOperator(linearization_coeffs(f, fam, alpha), f.watermark)


def tau_apply(fam, xi, k, f):
    """T_{xi,k} f = sum_{n>=k} C(n,k) (-d_x)^(n-k) df/du_{xi,n}."""
    out = JetFunction.zero()
    for alpha, n in jet_dependencies(f, fam):
        if alpha != xi or n < k:
            continue
        term = dx_iter(jet_partial(f, fam, xi, n), n - k)
        if (n - k) % 2:
            term = -term
        out = out + term * comb(n, k)
    if f.watermark is not None:
        out = out.truncate(f.watermark)
    return out


def variational_delta(fam, xi, f):
    """delta_xi f, the variational derivative (equals T_{xi,0} f)."""
    return variational_derivative(f, fam, xi)


class OpMismatch:
    __slots__ = ("order", "hbar", "difference")

    def __init__(self, order, hbar, difference):
        self.order = order
        self.hbar = hbar
        self.difference = difference

    def describe(self):
        return (f"coefficient of Dx^{self.order} differs at hbar^{self.hbar}: "
                f"{self.difference.text()}")


def op_equal(a, b, hbar_order=None):
    """Exact coefficientwise comparison; returns (bool, OpMismatch | None)."""
    wm = JetFunction._wm(a.watermark, b.watermark)
    if hbar_order is not None:
        wm = hbar_order if wm is None else min(wm, hbar_order)
    diff = a - b
    for s in sorted(diff.coeffs):
        c = diff.coeffs[s]
        if wm is not None:
            c = c.truncate(wm)
        if c.is_zero():
            continue
        top = wm if wm is not None else c.expr.num.hbar_degree()
        for g in range(top + 1):
            comp = c.hbar_component(g)
            if not comp.is_zero():
                return False, OpMismatch(s, g, comp)
    return True, None


class OperatorMatrix:
    """Dense N x N matrix of DiffOperator entries."""

    __slots__ = ("dim", "entries")

    def __init__(self, dim, entries=None):
        self.dim = dim
        if entries is None:
            entries = [[DiffOperator.zero() for _ in range(dim)] for _ in range(dim)]
        self.entries = entries

    @staticmethod
    def identity(dim):
        m = OperatorMatrix(dim)
        for i in range(dim):
            m.entries[i][i] = DiffOperator.identity()
        return m

    @staticmethod
    def dx_matrix(dim):
        m = OperatorMatrix(dim)
        for i in range(dim):
            m.entries[i][i] = DiffOperator.dx()
        return m

    def __getitem__(self, idx):
        a, b = idx
        return self.entries[a - 1][b - 1]

    def __setitem__(self, idx, value):
        a, b = idx
        self.entries[a - 1][b - 1] = value

    def __add__(self, other):
        out = OperatorMatrix(self.dim)
        for i in range(self.dim):
            for j in range(self.dim):
                out.entries[i][j] = self.entries[i][j] + other.entries[i][j]
        return out

    def __sub__(self, other):
        out = OperatorMatrix(self.dim)
        for i in range(self.dim):
            for j in range(self.dim):
                out.entries[i][j] = self.entries[i][j] - other.entries[i][j]
        return out

    def __neg__(self):
        out = OperatorMatrix(self.dim)
        for i in range(self.dim):
            for j in range(self.dim):
                out.entries[i][j] = -self.entries[i][j]
        return out

    def map_entries(self, fn):
        out = OperatorMatrix(self.dim)
        for i in range(self.dim):
            for j in range(self.dim):
                out.entries[i][j] = fn(self.entries[i][j])
        return out

    def matmul(self, other):
        out = OperatorMatrix(self.dim)
        for i in range(self.dim):
            for j in range(self.dim):
                acc = DiffOperator.zero()
                for k in range(self.dim):
                    acc = acc + self.entries[i][k].compose(other.entries[k][j])
                out.entries[i][j] = acc
        return out

    def adjoint_entries(self):
        return self.map_entries(lambda e: e.adjoint())

    def is_zero(self, hbar_order=None):
        return all(e.is_zero(hbar_order) for row in self.entries for e in row)


def matrix_equal(a, b, hbar_order=None):
    """Entrywise exact comparison, with the first mismatch located."""
    for i in range(a.dim):
        for j in range(a.dim):
            ok, bad = op_equal(a.entries[i][j], b.entries[i][j], hbar_order)
            if not ok:
                return False, (i + 1, j + 1, bad)
    return True, None


def is_skew(matrix, hbar_order=None):
    """A^{b,x} = -sum_s (-d_x)^s o A^{x,b}_s, i.e. A* = -A entrywise-transposed."""
    for i in range(matrix.dim):
        for j in range(matrix.dim):
            lhs = matrix.entries[i][j]
            rhs = -matrix.entries[j][i].adjoint()
            ok, _ = op_equal(lhs, rhs, hbar_order)
            if not ok:
                return False
    return True


def operator_text(op):
    if not op.coeffs:
        return "0"
    parts = []
    for s in sorted(op.coeffs):
        parts.append(f"({op.coeffs[s].text()}) (x) Dx^{s}")
    return "  +  ".join(parts)
