"""Jet calculus: total derivative, partials, variational derivative, grading."""

import random

import pytest

from dzdeform.poly import jetvar
from dzdeform.jets import (JetFunction, FAM_V, total_x_derivative,
                           jet_partial, variational_derivative, define_symbol,
                           differential_degree, random_jet_polynomial,
                           BoundSymbolDerivativeError)
from dzdeform.operators import linearization, op_equal, DiffOperator


def v(a, s):
    return JetFunction.var(FAM_V, a, s)


def test_total_derivative_examples():
    assert total_x_derivative(v(1, 0) * v(1, 0)).equals(2 * v(1, 0) * v(1, 1))
    assert total_x_derivative(JetFunction.const(5)).is_zero()
    got = total_x_derivative(v(1, 2) / v(1, 1))
    want = v(1, 3) / v(1, 1) - v(1, 2) * v(1, 2) / (v(1, 1) * v(1, 1))
    assert got.equals(want)


def test_jet_partial_examples():
    assert jet_partial(v(1, 0) * v(1, 1), FAM_V, 1, 1).equals(v(1, 0))
    assert jet_partial(v(2, 0), FAM_V, 1, 0).is_zero()
    U = define_symbol("tp_U", deps=[jetvar(FAM_V, 1, 2)])
    out = jet_partial(U, FAM_V, 1, 2)
    assert out.symbols() and out.symbols()[0][2] != ()


def test_variational_derivative_examples():
    assert variational_derivative(v(1, 1) * v(1, 1) / 2, FAM_V, 1).equals(-v(1, 2))
    exact = total_x_derivative(v(1, 0) * v(1, 1))
    assert variational_derivative(exact, FAM_V, 1).is_zero()
    cubic = v(1, 0) * v(1, 0) * v(1, 0) / 6
    assert variational_derivative(cubic, FAM_V, 1).equals(v(1, 0) * v(1, 0) / 2)


def test_linearization_examples():
    L = linearization(v(1, 1) * v(1, 1), FAM_V, 1)
    assert sorted(L.coeffs) == [1] and L.coeffs[1].equals(2 * v(1, 1))
    ident = linearization(v(1, 0), FAM_V, 1)
    assert sorted(ident.coeffs) == [0] and ident.coeffs[0].equals(JetFunction.const(1))
    assert not linearization(v(2, 0), FAM_V, 1).coeffs


def test_differential_degree():
    assert differential_degree(v(1, 2)) == {0: (2, True)}
    assert differential_degree(v(1, 1) * v(1, 1)) == {0: (2, True)}
    assert differential_degree(v(1, 0)) == {0: (0, True)}
    mixed = v(1, 2) + v(1, 1)
    assert differential_degree(mixed)[0] == (2, False)
    g = (v(1, 3) / v(1, 1) - v(1, 2) * v(1, 2) / (v(1, 1) * v(1, 1)))
    assert differential_degree(g) == {0: (2, True)}


def test_watermark_semantics():
    h = JetFunction.hbar()
    f = v(1, 0) + h * v(1, 1)
    t = f.truncate(0)
    assert t.equals(v(1, 0))
    a = DiffOperator.dx()
    b = DiffOperator({1: JetFunction.const(1), 2: h}).truncate(0)
    ok, _ = op_equal(a, b, 0)
    assert ok


def test_bound_symbol_rules():
    img = v(1, 0)
    B = define_symbol("tp_B", dx_image=img)
    assert total_x_derivative(B).equals(v(1, 0))
    assert total_x_derivative(B * v(1, 1)).equals(v(1, 0) * v(1, 1) + B * v(1, 2))
    with pytest.raises(BoundSymbolDerivativeError):
        jet_partial(B, FAM_V, 1, 0)


def test_generic_symbol_chain_rule():
    deps = [jetvar(FAM_V, 1, 0), jetvar(FAM_V, 1, 1)]
    U = define_symbol("tp_U2", deps=deps)
    d = total_x_derivative(U)
    rng = random.Random(0)
    f = random_jet_polynomial(rng, FAM_V, 1, 1, symbols=(U,))
    lhs = DiffOperator.dx().compose(linearization(f, FAM_V, 1))
    rhs = linearization(total_x_derivative(f), FAM_V, 1)
    ok, bad = op_equal(lhs, rhs)
    assert ok, bad.describe()
    assert len(d.expr.num.terms) == 2
