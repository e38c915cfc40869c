"""Jet representations, the quasi-Miura map, L, the bracket, Hamiltonians."""

import math
import random
from fractions import Fraction
from pathlib import Path

import pytest

from dzdeform.jets import (JetFunction, FAM_V, FAM_W,
                           variational_derivative, random_jet_polynomial)
from dzdeform.operators import DiffOperator, op_equal, is_skew, operator_text
from dzdeform.hierarchy import (Hierarchy, fixture_hierarchy,
                                quasi_miura_fixture, RepresentationError)
from dzdeform.potentials import CohFTSpec, PotentialStore

GOLDEN = Path(__file__).parent / "golden"


def v(a, s):
    return JetFunction.var(FAM_V, a, s)


@pytest.fixture(scope="module")
def hier():
    return fixture_hierarchy("trivial-1d")


@pytest.fixture(scope="module")
def hier2():
    return fixture_hierarchy("product-2d")


def test_genus0_omega_closed_form(hier):
    # expected values computed independently from the genus-zero correlator
    # formula <tau_p tau_q tau_0^(p+q+1)> = (p+q)!/(p! q!)
    for p in range(4):
        for q in range(4):
            om = hier.omega0_jet(1, p, 1, q)
            want = v(1, 0) ** (p + q + 1) / (
                math.factorial(p) * math.factorial(q) * (p + q + 1))
            assert om.equals(want), (p, q)
    assert hier.omega0_jet(1, 0, 1, 1).equals(v(1, 0) * v(1, 0) / 2)


def test_product_omega_vanishing(hier2):
    assert hier2.omega0_jet(1, 0, 2, 0).is_zero()
    assert hier2.omega0_jet(1, 2, 2, 1).is_zero()


def test_quasi_miura_fixture_closed_form(hier):
    G = hier.G(1)
    want = (v(1, 3) / v(1, 1) - v(1, 2) * v(1, 2) / (v(1, 1) * v(1, 1))) / 24
    assert G.equals(want)
    fix = quasi_miura_fixture("trivial-1d-g1")
    w1 = fix.w_of_v(1)
    assert w1.hbar_component(0).equals(v(1, 0))
    assert w1.hbar_component(1).equals(want)
    assert fix.truncated(0).w_of_v(1).equals(v(1, 0))


def test_quasi_miura_product_componentwise(hier2):
    for a in (1, 2):
        G = hier2.G(a)
        want = (v(a, 3) / v(a, 1) - v(a, 2) * v(a, 2) / (v(a, 1) * v(a, 1))) / 24
        assert G.equals(want)


def test_quasi_miura_fixture_unknown():
    with pytest.raises(KeyError):
        quasi_miura_fixture("no-such-fixture")


def test_fixture_fault_detected():
    store = PotentialStore(CohFTSpec(1, "trivial-1d", 1, 10))
    bad = Hierarchy(store)
    original = bad.phi_jet
    bad.phi_jet = lambda b, q: original(b, q) * Fraction(24, 25)
    with pytest.raises(RepresentationError) as err:
        bad.G(1)
    assert "monomial" in str(err.value)


def test_jet_rep_validation_windows(hier):
    series = hier.store.two_point_unit(1, 0).hbar_coefficient(1)
    assert hier.verify_jet_rep(hier.G(1), series, hbar_order=0, t_degree=5)
    res = hier.verify_jet_rep(hier.G(1), series, hbar_order=0, t_degree=50)
    assert not res and "window" in res.detail


def test_L_operator(hier, hier2):
    golden = (GOLDEN / "L_trivial_1d.txt").read_text().strip()
    assert operator_text(hier.L_matrix()[1, 1]) == golden
    ident = hier.L_matrix()[1, 1].hbar_component(0)
    assert sorted(ident.coeffs) == [0]
    golden2 = (GOLDEN / "L_product_2d.txt").read_text().strip().splitlines()
    lines = [f"L[{a},{b}] = " + operator_text(hier2.L_matrix()[a, b])
             for a in (1, 2) for b in (1, 2)]
    assert lines == golden2


def test_toy_polynomial_map_bracket():
    """w = v + hbar v_2 gives L = 1 + hbar Dx^2 and A = Dx + 2 hbar Dx^3."""
    from dzdeform.hierarchy import QuasiMiuraMap
    toy = QuasiMiuraMap(1, {(1, 1): v(1, 2)}, 1)
    w1 = toy.w_of_v(1)
    from dzdeform.operators import linearization
    L = linearization(w1, FAM_V, 1)
    assert sorted(L.coeffs) == [0, 2]
    A = L.compose(DiffOperator.dx()).compose(L.adjoint()).truncate(1)
    want = DiffOperator({1: JetFunction.const(1), 3: JetFunction.hbar() * 2})
    ok, bad = op_equal(A, want, 1)
    assert ok, bad and bad.describe()


def test_full_bracket(hier, hier2):
    A = hier.bracket_w()
    golden = (GOLDEN / "A_trivial_1d.txt").read_text().strip()
    assert operator_text(A[1, 1]) == golden
    assert is_skew(A, 1)
    assert all(0 not in e.coeffs for row in A.entries for e in row)
    A2 = hier2.bracket_w()
    assert is_skew(A2, 1)
    ok, _ = op_equal(A2[1, 2], DiffOperator.zero(), 1)
    assert ok


def test_principal_equation(hier):
    assert hier.principal_equation(1, 1, 1).equals(v(1, 0) * v(1, 1))
    assert hier.principal_equation(1, 1, 0).equals(v(1, 1))


def test_hamiltonians_and_commutation(hier):
    h0 = hier.hamiltonian(1, 0)
    h1 = hier.hamiltonian(1, 1)
    # genus-zero parts match the principal Hamiltonians up to exact terms
    d0 = hier.to_v(h0.value).hbar_component(0) - v(1, 0) * v(1, 0) / 2
    assert variational_derivative(d0, FAM_V, 1).is_zero()
    d1 = hier.to_v(h1.value).hbar_component(0) - v(1, 0) ** 3 / 6
    assert variational_derivative(d1, FAM_V, 1).is_zero()
    assert hier.commute_check(h0, h1).ok
    assert hier.commute_check(h0, h0).ok


def test_commute_detects_bracket_fault(hier):
    h0 = hier.hamiltonian(1, 0)
    h1 = hier.hamiltonian(1, 1)
    good = hier.bracket_w()
    perturbed = good.map_entries(lambda e: e)
    perturbed.entries[0][0] = good.entries[0][0] + DiffOperator(
        {1: JetFunction.hbar() * JetFunction.var(FAM_W, 1, 1)})
    saved = hier._A_w
    hier._A_w = perturbed
    try:
        assert not hier.commute_check(h0, h1).ok
    finally:
        hier._A_w = saved


def test_variational_pullback_property(hier):
    rng = random.Random(17)
    L = hier.L_matrix()
    for _ in range(10):
        f = random_jet_polynomial(rng, FAM_W, 1, 2)
        fv = hier.to_v(f)
        lhs = L[1, 1].adjoint().apply(hier.to_v(variational_derivative(f, FAM_W, 1)))
        rhs = variational_derivative(fv, FAM_V, 1)
        assert lhs.truncate(1).equals(rhs, 1)


def test_bracket_degree_grading(hier):
    from dzdeform.jets import differential_degree
    for row in hier.bracket_w().entries:
        for e in row:
            for s, c in e.coeffs.items():
                report = differential_degree(c, FAM_W)
                for h, (deg, homog) in report.items():
                    assert homog
                    assert deg + s == 2 * h + 1


def test_to_w_to_v_roundtrip(hier):
    rng = random.Random(23)
    for _ in range(6):
        f = random_jet_polynomial(rng, FAM_V, 1, 3).truncate(1)
        back = hier.to_v(hier.to_w(f))
        assert back.equals(f, 1)
