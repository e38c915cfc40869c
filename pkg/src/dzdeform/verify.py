"""Suite orchestration: configuration, runs, reports, fault injection.

A run is deterministic given (config, seed): randomized property checks draw
from a seeded generator, every collection is iterated in sorted order, and
the JSON report carries no wall-clock data (timings go to the text output
only, so that identical runs are byte-identical).
"""

from __future__ import annotations

import json
import random
import time
from fractions import Fraction

from .series import TSeries
from .poly import tvar, PolyExpr
from .jets import JetFunction, FAM_V, FAM_W, variational_derivative
from .operators import DiffOperator, is_skew
from .potentials import CohFTSpec, PotentialStore
from .hierarchy import Hierarchy, RepresentationError
from .givental import DeformationContext, make_generator, IdentityReport
from . import wk
from . import universal

FAULTS = {
    "miura-1-25": "replace the 1/24 of the genus-one seed by 1/25",
    "tameness-1-23": "perturb the t[1,1] coefficient of F_1 to 1/23",
    "flip-term-III": "flip the sign of line (III) in the bracket deformation",
    "drop-term-X": "omit line (X) (the hbar/2 three-point line) from the bracket deformation",
    "flip-map-third-summand": "flip the sign of the third map-deformation summand",
    "perturb-bracket": "add a spurious hbar w[1,1] to a bracket coefficient",
}

SUITES = ("universal", "cohft-axioms", "hierarchy", "deformation")


class ConfigError(ValueError):
    pass


DEFAULT_CONFIG = {
    "cohft": {"dim": 1, "construction": "trivial-1d", "genus_max": 1, "t_degree_max": 12},
    "generators": [
        {"kind": "r", "level": 1, "matrix": [[1]]},
        {"kind": "r", "level": 3, "matrix": [[1]]},
        {"kind": "s", "level": 1, "matrix": [[1]]},
    ],
    "suites": list(SUITES),
    "seed": 2024,
    "cases": 25,
    "check_window": 4,
    "operator_order_cap": 7,
    "fault": None,
}

def validate_config(raw):
    errors = []
    cfg = dict(DEFAULT_CONFIG)
    cfg.update(raw or {})
    co = cfg.get("cohft", {})
    spec = CohFTSpec(co.get("dim", 1), co.get("construction", "trivial-1d"),
                     co.get("genus_max", 1), co.get("t_degree_max", 12))
    errors.extend(spec.validate())
    gens = []
    for k, g in enumerate(cfg.get("generators", [])):
        try:
            matrix = [[Fraction(str(x)) for x in row] for row in g["matrix"]]
            gens.append(make_generator(g["kind"], g["level"], matrix))
        except Exception as exc:  # noqa: BLE001 - collect all validation errors
            errors.append(f"generators[{k}]: {exc}")
    for name in cfg.get("suites", []):
        if name not in SUITES:
            errors.append(f"unknown suite {name!r}; valid: {', '.join(SUITES)}")
    fault = cfg.get("fault")
    if fault is not None and fault not in FAULTS:
        errors.append(f"unknown fault tag {fault!r}; valid: {', '.join(sorted(FAULTS))}")
    if errors:
        raise ConfigError("; ".join(errors))
    cfg["_spec"] = spec
    cfg["_generators"] = gens
    return cfg


def load_config(path=None, overrides=None):
    raw = dict(DEFAULT_CONFIG)
    if path is not None:
        with open(path) as fh:
            raw.update(json.load(fh))
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config(raw)


# ---------------------------------------------------------------------------
# fault hooks
# ---------------------------------------------------------------------------


def _inject_store_fault(store, fault):
    if fault == "tameness-1-23":
        bump = Fraction(1, 23) - Fraction(1, 24)
        store.F[1] = store.F[1] + TSeries(PolyExpr({((tvar(1, 1), 1),): bump}))
    return store


def _inject_hierarchy_fault(hier, fault):
    if fault == "miura-1-25":
        original = hier.phi_jet

        def bad_phi(b, q):
            return original(b, q) * Fraction(24, 25)

        hier.phi_jet = bad_phi
    if fault == "perturb-bracket":
        A = hier.bracket_w()
        spur = JetFunction.hbar() * JetFunction.var(FAM_W, 1, 1)
        A.entries[0][0] = A.entries[0][0] + DiffOperator({1: spur})
        hier._A_w = A
    return hier


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def run_cohft_axioms(store, rng, cases=30):
    reports = []
    ok, info = store.check_tameness(k_max=2, pq_max=2)
    reports.append(IdentityReport("tameness", ok, None if ok else str(info)))
    ok, info = store.check_string()
    reports.append(IdentityReport("string-equation", ok, None if ok else str(info)))
    good = True
    detail = None
    for _ in range(cases):
        g = rng.randint(0, 1)
        n = rng.randint(1, 5)
        ds = tuple(sorted(rng.randint(0, 3) for _ in range(n)))
        via_string = wk.string_value(g, ds)
        direct0 = wk.correlator(g, tuple(sorted(ds + (0,))))
        via_dilaton = wk.dilaton_value(g, ds)
        direct1 = wk.correlator(g, tuple(sorted(ds + (1,))))
        if via_string != direct0 or via_dilaton != direct1:
            good = False
            detail = f"oracle inconsistency at (g={g}, ds={ds})"
            break
    reports.append(IdentityReport("oracle-string-vs-dilaton", good, detail))
    return reports


def run_hierarchy_suite(hier, rng, cases=10):
    reports = []
    # jet representations of the genus-zero two-point functions
    bad = None
    for a in range(1, hier.dim + 1):
        for b in range(1, hier.dim + 1):
            for p in range(4):
                for q in range(4):
                    series = hier.store.two_point(a, p, b, q).hbar_coefficient(0)
                    res = hier.verify_jet_rep(hier.omega0_jet(a, p, b, q), series,
                                              hbar_order=0, t_degree=4)
                    if not res:
                        bad = f"omega0({a},{p},{b},{q}): {res.detail}"
                        break
    reports.append(IdentityReport("genus0-jet-representations", bad is None, bad))
    # quasi-Miura fixture against the genus-one series
    bad = None
    for a in range(1, hier.dim + 1):
        series = hier.store.two_point_unit(a, 0).hbar_coefficient(1)
        res = hier.verify_jet_rep(hier.G(a), series, hbar_order=0, t_degree=5)
        if not res:
            bad = f"G[{a}]: {res.detail}"
    reports.append(IdentityReport("quasi-miura-fixture", bad is None, bad))
    # variational-derivative pullback through the map
    bad = None
    L = hier.L_matrix()
    for _ in range(cases):
        from .jets import random_jet_polynomial
        f = random_jet_polynomial(rng, FAM_W, hier.dim, 2)
        fv = hier.to_v(f)
        for alpha in range(1, hier.dim + 1):
            lhs = JetFunction.zero()
            for b in range(1, hier.dim + 1):
                arg = hier.to_v(variational_derivative(f, FAM_W, b))
                lhs = lhs + L[b, alpha].adjoint().apply(arg)
            rhs = variational_derivative(fv, FAM_V, alpha)
            if not lhs.truncate(hier.gmax).equals(rhs, hier.gmax):
                bad = f"pullback failed (alpha={alpha})"
                break
        if bad:
            break
    reports.append(IdentityReport("variational-pullback", bad is None, bad))
    # bracket structure
    A = hier.bracket_w()
    reports.append(IdentityReport("bracket-skew", is_skew(A, hier.gmax)))
    no_s0 = all(0 not in e.coeffs for row in A.entries for e in row)
    reports.append(IdentityReport("bracket-no-order-zero", no_s0))
    # commutation of the first two Hamiltonians
    try:
        h0 = hier.hamiltonian(1, 0)
        h1 = hier.hamiltonian(1, 1)
        res = hier.commute_check(h0, h1)
        reports.append(IdentityReport("hamiltonian-commutation", res.ok, res.detail))
    except RepresentationError as exc:
        reports.append(IdentityReport("hamiltonian-commutation", False, str(exc)))
    return reports


def run_deformation_suite(hier, generators, fault=None, order_cap=7):
    reports = []
    for gen in generators:
        ctx = DeformationContext(hier, gen, fault=fault, order_cap=order_cap)
        try:
            reports.append(ctx.verify_map_deformation())
            for alpha in range(1, hier.dim + 1):
                reports.append(ctx.crosscheck_coordinate_deformation(alpha))
            if gen.kind == "r":
                reports.append(ctx.verify_bad_terms_reduction())
            reports.append(ctx.verify_bracket_deformation(replay=True))
        except AssertionError as exc:
            reports.append(IdentityReport(
                f"deformation[{gen.kind}{gen.level}]", False, str(exc)))
    return reports


def run_suite(config):
    """Execute the selected suites; returns (SuiteReport-dict, text, ok)."""
    spec = config["_spec"]
    generators = config["_generators"]
    fault = config.get("fault")
    seed = config.get("seed", 2024)
    cases = config.get("cases", 25)
    t_start = time.time()
    reports = []
    timings = []

    def run_stage(name, fn):
        t0 = time.time()
        out = fn()
        timings.append((name, time.time() - t0))
        return out

    if "universal" in config["suites"]:
        res = run_stage("universal", lambda: universal.run_universal_suite(seed, cases))
        for name, (ok, detail) in sorted(res.items()):
            reports.append(IdentityReport(f"universal/{name}", ok, detail))

    store = hier = None
    if {"cohft-axioms", "hierarchy", "deformation"} & set(config["suites"]):
        store = _inject_store_fault(PotentialStore(spec), fault)
        hier = _inject_hierarchy_fault(
            Hierarchy(store, config.get("check_window", 4)), fault)

    if "cohft-axioms" in config["suites"]:
        rng = random.Random(seed + 1)
        reports.extend(run_stage("cohft-axioms",
                                 lambda: run_cohft_axioms(store, rng, max(cases, 30))))

    if "hierarchy" in config["suites"]:
        rng = random.Random(seed + 2)
        def stage():
            try:
                return run_hierarchy_suite(hier, rng)
            except RepresentationError as exc:
                return [IdentityReport("hierarchy-construction", False, str(exc))]
        reports.extend(run_stage("hierarchy", stage))

    if "deformation" in config["suites"]:
        def stage():
            try:
                return run_deformation_suite(hier, generators, fault,
                                             config.get("operator_order_cap", 7))
            except RepresentationError as exc:
                return [IdentityReport("deformation-construction", False, str(exc))]
        reports.extend(run_stage("deformation", stage))

    total = len(reports)
    failed = [r for r in reports if not r.ok]
    ok = not failed
    echo = {k: v for k, v in config.items() if not k.startswith("_")}
    payload = {
        "configuration": echo,
        "results": [r.as_dict() for r in reports],
        "totals": {"run": total, "passed": total - len(failed), "failed": len(failed)},
        "verdict": "pass" if ok else "fail",
    }
    lines = [f"suite verdict: {'PASS' if ok else 'FAIL'}",
             f"checks run: {total}, failed: {len(failed)}"]
    for r in reports:
        lines.append(f"  [{'ok' if r.ok else 'FAIL'}] {r.name}"
                     + (f" -- {r.mismatch}" if r.mismatch else ""))
    lines.append(f"elapsed: {time.time() - t_start:.1f}s")
    for name, dt in timings:
        lines.append(f"  stage {name}: {dt:.1f}s")
    return payload, "\n".join(lines), ok


def report_json(payload):
    return json.dumps(payload, indent=2, sort_keys=True, default=str)
