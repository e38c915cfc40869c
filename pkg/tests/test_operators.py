"""Normal-form differential operators: composition, adjoint, tau operators."""

import random

from dzdeform.jets import JetFunction, FAM_V, FAM_W, random_jet_polynomial
from dzdeform.operators import (DiffOperator, op_equal, tau_apply,
                                variational_delta, is_skew, OperatorMatrix)


def v(a, s):
    return JetFunction.var(FAM_V, a, s)


def w(a, s):
    return JetFunction.var(FAM_W, a, s)


def test_compose_examples():
    Dx = DiffOperator.dx()
    u = DiffOperator.mult(v(1, 0))
    c = Dx.compose(u)
    assert c.coeff(0).equals(v(1, 1)) and c.coeff(1).equals(v(1, 0))
    fg = DiffOperator.mult(v(1, 1)).compose(DiffOperator.mult(v(1, 2)))
    assert sorted(fg.coeffs) == [0] and fg.coeff(0).equals(v(1, 1) * v(1, 2))
    c2 = Dx.compose(Dx).compose(u)
    assert c2.coeff(0).equals(v(1, 2))
    assert c2.coeff(1).equals(2 * v(1, 1))
    assert c2.coeff(2).equals(v(1, 0))


def test_adjoint_examples():
    Dx = DiffOperator.dx()
    ok, _ = op_equal(Dx.adjoint(), -Dx)
    assert ok
    fdx = DiffOperator({1: v(1, 0)})
    adj = fdx.adjoint()
    assert adj.coeff(1).equals(-v(1, 0)) and adj.coeff(0).equals(-v(1, 1))
    c = DiffOperator.mult(v(1, 0))
    ok, _ = op_equal(c.adjoint(), c)
    assert ok


def test_apply_examples():
    Dx = DiffOperator.dx()
    assert Dx.apply(v(1, 0) * v(1, 0)).equals(2 * v(1, 0) * v(1, 1))
    assert DiffOperator.identity().apply(v(1, 2)).equals(v(1, 2))
    op = DiffOperator({2: v(1, 0)})
    assert op.apply(v(1, 0)).equals(v(1, 0) * v(1, 2))


def test_tau_examples():
    rng = random.Random(3)
    for _ in range(12):
        f = random_jet_polynomial(rng, FAM_W, 2, 3)
        xi = rng.randint(1, 2)
        assert (tau_apply(FAM_W, xi, 0, f) - variational_delta(FAM_W, xi, f)).is_zero()
    assert tau_apply(FAM_W, 1, 2, w(1, 2)).equals(JetFunction.const(1))
    assert tau_apply(FAM_W, 1, 1, w(1, 2)).is_zero()


def test_op_equal_watermark():
    a = DiffOperator.dx()
    b = a + DiffOperator({2: JetFunction.hbar()})
    ok, _ = op_equal(a, b, hbar_order=0)
    assert ok
    ok, bad = op_equal(a, b, hbar_order=1)
    assert not ok and bad.order == 2 and bad.hbar == 1


def test_skew_detection():
    m = OperatorMatrix(1)
    m.entries[0][0] = DiffOperator.dx()
    assert is_skew(m)
    m.entries[0][0] = DiffOperator.identity()
    assert not is_skew(m)
