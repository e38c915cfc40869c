"""Acceptance battery: one check per criterion, printed pass/fail lines.

Every assertion is exact (rational arithmetic); the stated runtime caps are
asserted with wall-clock measurements.
"""

import random
import time
from fractions import Fraction

import pytest

from dzdeform import verify as verify_mod
from dzdeform.jets import (FAM_V, FAM_W, variational_derivative,
                           random_jet_polynomial)
from dzdeform.operators import is_skew
from dzdeform.potentials import CohFTSpec, PotentialStore
from dzdeform.hierarchy import (Hierarchy, fixture_hierarchy,
                                RepresentationError)
from dzdeform.givental import DeformationContext, make_generator
from dzdeform import universal, wk


def _announce(num, label, started):
    print(f"[criterion {num:02d}] {label}: PASS ({time.time() - started:.1f}s)")


@pytest.fixture(scope="module")
def trivial():
    return fixture_hierarchy("trivial-1d")


@pytest.fixture(scope="module")
def product():
    return fixture_hierarchy("product-2d")


def test_criterion_01_universal_suite():
    t0 = time.time()
    results = universal.run_universal_suite(seed=2024, cases=25)
    for name, (ok, detail) in results.items():
        assert ok, f"{name}: {detail}"
    assert time.time() - t0 <= 120, "universal suite exceeded two minutes"
    _announce(1, "universal identities, >=25 randomized instances each", t0)


def test_criterion_02_cohft_axioms():
    t0 = time.time()
    for spec in (CohFTSpec(1, "trivial-1d", 1, 8),
                 CohFTSpec(2, "product-of-trivial", 1, 8)):
        store = PotentialStore(spec)
        ok, info = store.check_tameness(k_max=2, pq_max=2 if spec.dim == 1 else 1)
        assert ok, info
        ok, info = store.check_string()
        assert ok, info
    rng = random.Random(2024)
    for _ in range(30):
        g = rng.randint(0, 1)
        ds = tuple(sorted(rng.randint(0, 3) for _ in range(rng.randint(1, 5))))
        assert wk.correlator(g, tuple(sorted(ds + (0,)))) == wk.string_value(g, ds)
        assert wk.correlator(g, tuple(sorted(ds + (1,)))) == wk.dilaton_value(g, ds)
    _announce(2, "tameness + string at t-degree 8, oracle cross-checks", t0)


def test_criterion_03_hierarchy_construction(trivial, product):
    t0 = time.time()
    for hier in (trivial, product):
        for a in range(1, hier.dim + 1):
            for b in range(1, hier.dim + 1):
                for p in range(4):
                    for q in range(4):
                        series = hier.store.two_point(a, p, b, q).hbar_coefficient(0)
                        res = hier.verify_jet_rep(
                            hier.omega0_jet(a, p, b, q), series,
                            hbar_order=0, t_degree=min(p + q + 1, series.t_wm))
                        assert res, f"omega0({a},{p},{b},{q}): {res.detail}"
        for a in range(1, hier.dim + 1):
            series = hier.store.two_point_unit(a, 0).hbar_coefficient(1)
            res = hier.verify_jet_rep(hier.G(a), series, hbar_order=0, t_degree=5)
            assert res, f"quasi-Miura G[{a}]: {res.detail}"
    rng = random.Random(31)
    L = trivial.L_matrix()
    for _ in range(10):
        f = random_jet_polynomial(rng, FAM_W, 1, 2)
        lhs = L[1, 1].adjoint().apply(
            trivial.to_v(variational_derivative(f, FAM_W, 1)))
        rhs = variational_derivative(trivial.to_v(f), FAM_V, 1)
        assert lhs.truncate(1).equals(rhs, 1)
    for hier in (trivial, product):
        A = hier.bracket_w()
        assert is_skew(A, 1)
        assert all(0 not in e.coeffs for row in A.entries for e in row)
    res = trivial.commute_check(trivial.hamiltonian(1, 0), trivial.hamiltonian(1, 1))
    assert res.ok, res.detail
    _announce(3, "jet representations, pullback, bracket shape, commutation", t0)


@pytest.mark.parametrize("fixture,kind,level,matrix", [
    ("trivial-1d", "r", 1, [[1]]),
    ("trivial-1d", "r", 3, [[1]]),
    ("product-2d", "r", 2, [[0, 1], [-1, 0]]),
])
def test_criterion_04_map_deformation_r(fixture, kind, level, matrix, trivial, product):
    t0 = time.time()
    hier = trivial if fixture == "trivial-1d" else product
    ctx = DeformationContext(hier, make_generator(kind, level, matrix))
    rep = ctx.verify_map_deformation()
    assert rep.ok, rep.mismatch
    assert time.time() - t0 <= 600
    _announce(4, f"map deformation, {kind}{level} on {fixture}", t0)


@pytest.mark.parametrize("fixture,matrix", [
    ("trivial-1d", [[1]]),
    ("product-2d", [[2, 1], [1, -1]]),
])
def test_criterion_05_map_deformation_s(fixture, matrix, trivial, product):
    t0 = time.time()
    hier = trivial if fixture == "trivial-1d" else product
    ctx = DeformationContext(hier, make_generator("s", 1, matrix))
    rep = ctx.verify_map_deformation()
    assert rep.ok, rep.mismatch
    _announce(5, f"map deformation, s1 on {fixture}", t0)


def test_criterion_06_bad_terms_reduction(trivial, product):
    t0 = time.time()
    ctx = DeformationContext(trivial, make_generator("r", 1, [[1]]))
    rep = ctx.verify_bad_terms_reduction()
    assert rep.ok, rep.mismatch
    assert "jet-order" in rep.stages
    # bound check for the matrix-valued generator as well
    ctx2 = DeformationContext(product, make_generator("r", 2, [[0, 1], [-1, 0]]))
    bound = 3 * ctx2.wm + 1
    worst = -1
    for a in (1, 2):
        for b in (1, 2):
            red = ctx2.reduced_bad_terms(a, b)
            for c in red.coeffs.values():
                worst = max(worst, c.max_jet_order())
    assert worst <= bound
    _announce(6, f"bad-terms reduction; jet order {worst} <= bound {bound}", t0)


@pytest.mark.parametrize("fixture,level,matrix", [
    ("trivial-1d", 1, [[1]]),
    ("product-2d", 2, [[0, 1], [-1, 0]]),
])
def test_criterion_07_bracket_deformation_r(fixture, level, matrix, trivial, product):
    t0 = time.time()
    hier = trivial if fixture == "trivial-1d" else product
    ctx = DeformationContext(hier, make_generator("r", level, matrix))
    rep = ctx.verify_bracket_deformation(replay=True)
    assert rep.ok, rep.mismatch
    for stage in ("internal(map)", "internal(directional)", "three-point-symmetry",
                  "recursion-identity", "cancellation-bracket", "diff-group(4.3)",
                  "twelve-term-total"):
        assert rep.stages[stage] is True, (stage, rep.stages[stage])
    assert time.time() - t0 <= 1800
    _announce(7, f"twelve-term bracket deformation with replay, r{level} on {fixture}", t0)


@pytest.mark.parametrize("fixture,matrix", [
    ("trivial-1d", [[1]]),
    ("product-2d", [[2, 1], [1, -1]]),
])
def test_criterion_08_bracket_deformation_s(fixture, matrix, trivial, product):
    t0 = time.time()
    hier = trivial if fixture == "trivial-1d" else product
    ctx = DeformationContext(hier, make_generator("s", 1, matrix))
    rep = ctx.verify_bracket_deformation()
    assert rep.ok, rep.mismatch
    _announce(8, f"bracket deformation, s1 on {fixture}", t0)


def test_criterion_09_fault_injection(trivial):
    t0 = time.time()
    detected = {}

    store = PotentialStore(CohFTSpec(1, "trivial-1d", 1, 10))
    bad = Hierarchy(store)
    orig = bad.phi_jet
    bad.phi_jet = lambda b, q: orig(b, q) * Fraction(24, 25)
    with pytest.raises(RepresentationError) as err:
        bad.G(1)
    assert "monomial" in str(err.value)
    detected["miura-1-25"] = str(err.value)

    faulted = verify_mod._inject_store_fault(
        PotentialStore(CohFTSpec(1, "trivial-1d", 1, 8)), "tameness-1-23")
    ok, info = faulted.check_string()
    assert not ok and info is not None
    detected["tameness-1-23"] = str(info)

    for fault in ("flip-term-III", "drop-term-X"):
        ctx = DeformationContext(trivial, make_generator("r", 1, [[1]]), fault=fault)
        rep = ctx.verify_bracket_deformation(replay=False)
        assert not rep.ok and "Dx^" in rep.mismatch and "hbar^" in rep.mismatch
        detected[fault] = rep.mismatch

    ctx = DeformationContext(trivial, make_generator("r", 1, [[1]]),
                             fault="flip-map-third-summand")
    rep = ctx.verify_map_deformation()
    assert not rep.ok and "Dx^" in rep.mismatch
    detected["flip-map-third-summand"] = rep.mismatch

    store2 = PotentialStore(CohFTSpec(1, "trivial-1d", 1, 10))
    pert = verify_mod._inject_hierarchy_fault(Hierarchy(store2), "perturb-bracket")
    assert not is_skew(pert.bracket_w(), 1)
    detected["perturb-bracket"] = "skew-symmetry violation"

    assert len(detected) >= 5
    _announce(9, f"{len(detected)} injected faults detected with locators", t0)


def test_criterion_10_determinism(tmp_path):
    t0 = time.time()
    cfg = verify_mod.validate_config({
        "cohft": {"dim": 1, "construction": "trivial-1d",
                  "genus_max": 1, "t_degree_max": 10},
        "generators": [{"kind": "r", "level": 1, "matrix": [[1]]},
                       {"kind": "s", "level": 1, "matrix": [[1]]}],
        "suites": ["universal", "cohft-axioms", "hierarchy", "deformation"],
        "seed": 99,
        "cases": 10,
    })
    payload1, _, ok1 = verify_mod.run_suite(cfg)
    payload2, _, ok2 = verify_mod.run_suite(cfg)
    assert ok1 and ok2
    b1 = verify_mod.report_json(payload1).encode()
    b2 = verify_mod.report_json(payload2).encode()
    assert b1 == b2, "reports are not byte-identical"
    _announce(10, "bit-identical JSON reports for identical config and seed", t0)
