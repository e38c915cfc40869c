"""Universal identities verified with fully generic function symbols.

These checks involve no CohFT data at all: the inputs are arbitrary
functions of finitely many jets, realized as unbound symbols whose
derivatives are free generators.  Equality is exact equality of normal-form
operators in the free algebra, so a pass is a proof of the identity for
every specialization with the same finite jet dependence.
"""

from __future__ import annotations

import random
from math import comb

from .poly import jetvar
from .jets import (JetFunction, FAM_V, define_symbol,
                   total_x_derivative, dx_iter, jet_partial, jet_dependencies,
                   variational_derivative, random_jet_polynomial)
from .operators import (DiffOperator, linearization, op_equal, tau_apply,
                        variational_delta)

_counter = [0]


def _fresh(prefix):
    _counter[0] += 1
    return f"{prefix}{_counter[0]}"


def _deps(dim, max_order, fam=FAM_V):
    return tuple(jetvar(fam, a, s) for a in range(1, dim + 1) for s in range(max_order + 1))


def check_chain_rule_commutation(rng, cases=25, dim=2, max_order=2):
    """d_x o L_f = L_{d_x f} for the linearization operator (Lemma 2.1 shape)."""
    deps = _deps(dim, max_order)
    for _ in range(cases):
        U = define_symbol(_fresh("U"), deps=deps)
        f = random_jet_polynomial(rng, FAM_V, dim, max_order, symbols=(U,))
        alpha = rng.randint(1, dim)
        lhs = DiffOperator.dx().compose(linearization(f, FAM_V, alpha))
        rhs = linearization(total_x_derivative(f), FAM_V, alpha)
        ok, bad = op_equal(lhs, rhs)
        if not ok:
            return False, bad.describe()
    return True, None


def check_commutator_rule(rng, cases=25, dim=2, max_order=3):
    """d_x o d/du_{a,s} - d/du_{a,s} o d_x = -d/du_{a,s-1} on random inputs."""
    deps = _deps(dim, max_order)
    for _ in range(cases):
        U = define_symbol(_fresh("U"), deps=deps)
        f = random_jet_polynomial(rng, FAM_V, dim, max_order, symbols=(U,))
        alpha = rng.randint(1, dim)
        s = rng.randint(0, max_order)
        left = total_x_derivative(jet_partial(f, FAM_V, alpha, s))
        right = jet_partial(total_x_derivative(f), FAM_V, alpha, s)
        low = jet_partial(f, FAM_V, alpha, s - 1) if s >= 1 else JetFunction.zero()
        if not (left - right + low).is_zero():
            return False, f"commutator rule failed at (alpha={alpha}, s={s})"
    return True, None


def check_variational_kills_dx(rng, cases=25, dim=2, max_order=2):
    """delta/delta u_alpha annihilates total x-derivatives."""
    deps = _deps(dim, max_order)
    for _ in range(cases):
        U = define_symbol(_fresh("U"), deps=deps)
        f = random_jet_polynomial(rng, FAM_V, dim, max_order, symbols=(U,))
        alpha = rng.randint(1, dim)
        res = variational_derivative(total_x_derivative(f), FAM_V, alpha)
        if not res.is_zero():
            return False, f"delta o d_x != 0 (alpha={alpha})"
    return True, None


def check_derivation_property(rng, cases=25, dim=2, max_order=2):
    """d_x(fg) = (d_x f) g + f (d_x g)."""
    deps = _deps(dim, max_order)
    for _ in range(cases):
        U = define_symbol(_fresh("U"), deps=deps)
        f = random_jet_polynomial(rng, FAM_V, dim, max_order, symbols=(U,))
        g = random_jet_polynomial(rng, FAM_V, dim, max_order)
        lhs = total_x_derivative(f * g)
        rhs = total_x_derivative(f) * g + f * total_x_derivative(g)
        if not (lhs - rhs).is_zero():
            return False, "Leibniz rule failed"
    return True, None


def check_adjoint_laws(rng, cases=25, dim=2, max_order=2):
    """(AB)* = B*A*, A** = A, and the adjoint pairing up to total derivatives."""
    for _ in range(cases):
        A = _random_operator(rng, dim, max_order)
        B = _random_operator(rng, dim, max_order)
        ok, bad = op_equal(A.compose(B).adjoint(), B.adjoint().compose(A.adjoint()))
        if not ok:
            return False, "adjoint antihomomorphism failed: " + bad.describe()
        ok, bad = op_equal(A.adjoint().adjoint(), A)
        if not ok:
            return False, "adjoint involution failed: " + bad.describe()
        f = random_jet_polynomial(rng, FAM_V, dim, max_order)
        g = random_jet_polynomial(rng, FAM_V, dim, max_order)
        density = f * A.apply(g) - A.adjoint().apply(f) * g
        for alpha in range(1, dim + 1):
            if not variational_derivative(density, FAM_V, alpha).is_zero():
                return False, "adjoint pairing density is not d_x-exact"
    return True, None


def check_compose_apply(rng, cases=25, dim=2, max_order=2):
    """apply(A o B, f) = apply(A, apply(B, f)) and associativity of o."""
    for _ in range(cases):
        A = _random_operator(rng, dim, max_order)
        B = _random_operator(rng, dim, max_order)
        C = _random_operator(rng, dim, 1)
        ok, bad = op_equal(A.compose(B).compose(C), A.compose(B.compose(C)))
        if not ok:
            return False, "composition associativity failed"
        f = random_jet_polynomial(rng, FAM_V, dim, max_order)
        if not (A.compose(B).apply(f) - A.apply(B.apply(f))).is_zero():
            return False, "apply/compose compatibility failed"
    return True, None


def check_tau_zero_is_delta(rng, cases=25, dim=2, max_order=3):
    """T_{xi,0} agrees with the variational derivative."""
    from .jets import FAM_W
    for _ in range(cases):
        f = random_jet_polynomial(rng, FAM_W, dim, max_order)
        xi = rng.randint(1, dim)
        if not (tau_apply(FAM_W, xi, 0, f) - variational_delta(FAM_W, xi, f)).is_zero():
            return False, "T_{xi,0} != delta_xi"
    return True, None


def _random_operator(rng, dim, max_order, top=2):
    coeffs = {}
    for s in range(rng.randint(1, top + 1)):
        coeffs[s] = random_jet_polynomial(rng, FAM_V, dim, max_order, max_terms=2)
    return DiffOperator(coeffs)


# ---------------------------------------------------------------------------
# the universal three-term reduction (arbitrary U, arbitrary map data)
# ---------------------------------------------------------------------------


class UniversalMapData:
    """Generic quasi-Miura-type data: w_alpha and dv/dq as free functions."""

    def __init__(self, dim, max_order):
        self.dim = dim
        self.max_order = max_order
        deps = _deps(dim, max_order)
        self.W = {a: define_symbol(_fresh("W"), deps=deps) for a in range(1, dim + 1)}
        self.P = {a: define_symbol(_fresh("P"), deps=deps) for a in range(1, dim + 1)}

    def q_derivative(self, f):
        """The derivation with dv_{gamma,p}/dq = d_x^p P_gamma."""
        out = JetFunction.zero()
        for gamma, p in jet_dependencies(f, FAM_V):
            out = out + jet_partial(f, FAM_V, gamma, p) * dx_iter(self.P[gamma], p)
        return out

    def L_entry(self, alpha, beta):
        return linearization(self.W[alpha], FAM_V, beta)


def three_term_expression(data, U, alpha, beta):
    """Left side of the universal reduction for the function U.

    The first and third summands are taken in their v-jet covariant form
    (the rewriting used repeatedly in the source derivations, verified here
    independently through check_chain_rule_commutation).
    """
    dqW = data.q_derivative(data.W[alpha])
    term1 = linearization(U * dqW, FAM_V, beta)
    term2 = DiffOperator.zero()
    for gamma in range(1, data.dim + 1):
        term2 = term2 + data.L_entry(alpha, gamma).compose(
            linearization(U * data.P[gamma], FAM_V, beta))
    term3 = DiffOperator.zero()
    lcoeffs = {s: jet_partial(data.W[alpha], FAM_V, beta, s)
               for _, s in jet_dependencies(data.W[alpha], FAM_V)}
    for s, c in lcoeffs.items():
        term3 = term3 + DiffOperator({s: U * data.q_derivative(c)})
    return term1 - term2 - term3


def reduced_expression(data, U, alpha, beta):
    """Right side: -sum (dw_alpha/dv_{nu,r}) lin_beta( sum_k C(r,k) d_x^k U d_x^(r-k) P_nu )."""
    out = DiffOperator.zero()
    dxU = [U]
    max_r = max((s for _, s in jet_dependencies(data.W[alpha], FAM_V)), default=0)
    while len(dxU) <= max_r:
        dxU.append(total_x_derivative(dxU[-1]))
    for nu, r in jet_dependencies(data.W[alpha], FAM_V):
        if r < 1:
            continue
        inner = JetFunction.zero()
        for k in range(1, r + 1):
            inner = inner + dxU[k] * dx_iter(data.P[nu], r - k) * comb(r, k)
        coeff = jet_partial(data.W[alpha], FAM_V, nu, r)
        out = out - linearization(inner, FAM_V, beta).lmul(coeff)
    return out


def check_universal_reduction(rng, cases=3, dim=1, max_order=2):
    """The universal three-term reduction with a fully generic U."""
    for _ in range(cases):
        data = UniversalMapData(dim, max_order)
        U = define_symbol(_fresh("Ugen"), deps=_deps(dim, max_order))
        for alpha in range(1, dim + 1):
            for beta in range(1, dim + 1):
                lhs = three_term_expression(data, U, alpha, beta)
                rhs = reduced_expression(data, U, alpha, beta)
                ok, bad = op_equal(lhs, rhs)
                if not ok:
                    return False, f"universal reduction ({alpha},{beta}): " + bad.describe()
    return True, None


def check_delta_L_vanishes(rng, cases=3, dim=1, max_order=2):
    """U = 1 case: the three-term expression is identically zero."""
    for _ in range(cases):
        data = UniversalMapData(dim, max_order)
        one = JetFunction.const(1)
        for alpha in range(1, dim + 1):
            for beta in range(1, dim + 1):
                expr = three_term_expression(data, one, alpha, beta)
                ok, bad = op_equal(expr, DiffOperator.zero())
                if not ok:
                    return False, f"Delta L != 0 at ({alpha},{beta}): " + bad.describe()
    return True, None


UNIVERSAL_CHECKS = [
    ("chain-rule-commutation", check_chain_rule_commutation),
    ("partial-dx-commutator", check_commutator_rule),
    ("variational-kills-dx", check_variational_kills_dx),
    ("dx-derivation", check_derivation_property),
    ("adjoint-laws", check_adjoint_laws),
    ("compose-apply", check_compose_apply),
    ("tau0-equals-delta", check_tau_zero_is_delta),
    ("universal-reduction", check_universal_reduction),
    ("deltaL-vanishes", check_delta_L_vanishes),
]


def run_universal_suite(seed, cases=25):
    rng = random.Random(seed)
    results = {}
    for name, fn in UNIVERSAL_CHECKS:
        small = name in ("universal-reduction", "deltaL-vanishes")
        ok, detail = fn(rng, cases=3 if small else cases)
        results[name] = (ok, detail)
    return results
