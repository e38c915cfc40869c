"""The universal suite: identities with fully generic function symbols."""

import random

from dzdeform.jets import JetFunction, FAM_V
from dzdeform.operators import DiffOperator, op_equal
from dzdeform import universal


def test_universal_suite_all_pass():
    results = universal.run_universal_suite(seed=2024, cases=8)
    for name, (ok, detail) in results.items():
        assert ok, f"{name}: {detail}"


def test_universal_reduction_map_data():
    rng = random.Random(1)
    ok, detail = universal.check_universal_reduction(rng, cases=1, dim=2, max_order=1)
    assert ok, detail


def test_delta_L_zero_case():
    rng = random.Random(2)
    ok, detail = universal.check_delta_L_vanishes(rng, cases=1, dim=2, max_order=1)
    assert ok, detail


def test_reduction_constant_function():
    """U = 1 collapses the right side: the effective range 1..r of the inner
    sum empties, so the three terms cancel outright."""
    data = universal.UniversalMapData(1, 2)
    one = JetFunction.const(1)
    rhs = universal.reduced_expression(data, one, 1, 1)
    ok, _ = op_equal(rhs, DiffOperator.zero())
    assert ok


def test_reduction_respects_substituted_derivative():
    """Consistency under passing from U to d_x U on both sides."""
    from dzdeform.jets import total_x_derivative, define_symbol, jetvar
    data = universal.UniversalMapData(1, 1)
    U = define_symbol("tu_U", deps=(jetvar(FAM_V, 1, 0), jetvar(FAM_V, 1, 1)))
    lhs = universal.three_term_expression(data, total_x_derivative(U), 1, 1)
    rhs = universal.reduced_expression(data, total_x_derivative(U), 1, 1)
    ok, bad = op_equal(lhs, rhs)
    assert ok, bad.describe()
