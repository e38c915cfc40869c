"""Jet-space representations of the hierarchy data.

Bridges the coupling-series world (PotentialStore) and the jet world:
genus-zero two/three point functions as functions of v, the genus-one
quasi-Miura data, the operator L of the coordinate change, the Poisson
bracket of the full hierarchy, and Hamiltonians.  Every jet representation
is validated against its defining t-series by exact coefficient comparison
(verify_jet_rep) before use; nothing is trusted on construction.

Genus-one jet data is generated from the per-component seed

    Phi[beta,q] = d_x^2( Omega0_{beta,0;beta,q} ) / (24 v[beta,1]),

the first t-derivatives of the standard rank-one genus-one potential, and
transported with the genus-zero flows.  The seed is an input fixture; the
validation against the oracle t-series is what certifies it.
"""

from __future__ import annotations

from .poly import FractionExpr, HBAR, jetvar, tvar
from .series import TSeries
from .jets import (JetFunction, FAM_V, FAM_W, total_x_derivative, dx_iter,
                   jet_partial, jet_dependencies, variational_derivative)
from .operators import DiffOperator, OperatorMatrix, linearization, is_skew

UNIT = 0  # sentinel component index for the unit direction (sum over components)


class RepresentationError(ValueError):
    pass


class VerifyResult:
    __slots__ = ("ok", "detail")

    def __init__(self, ok, detail=None):
        self.ok = ok
        self.detail = detail

    def __bool__(self):
        return self.ok


class JetRepresentation:
    """A jet function together with the t-series window it was matched to."""

    __slots__ = ("value", "source", "hbar_order", "t_degree")

    def __init__(self, value, source, hbar_order, t_degree):
        self.value = value
        self.source = source
        self.hbar_order = hbar_order
        self.t_degree = t_degree


class QuasiMiuraMap:
    """w_alpha = v_alpha + sum_g hbar^g G_{alpha,g}(v-jets)."""

    __slots__ = ("dim", "corrections", "genus")

    def __init__(self, dim, corrections, genus):
        self.dim = dim
        self.corrections = corrections  # {(alpha, g): JetFunction}
        self.genus = genus

    def w_of_v(self, alpha):
        out = JetFunction.var(FAM_V, alpha, 0)
        h = JetFunction.hbar()
        hp = h
        for g in range(1, self.genus + 1):
            corr = self.corrections.get((alpha, g))
            if corr is not None:
                out = out + hp * corr
            hp = hp * h
        return out.truncate(self.genus)

    def truncated(self, genus):
        corrections = {(a, g): c for (a, g), c in self.corrections.items() if g <= genus}
        return QuasiMiuraMap(self.dim, corrections, genus)


class Hierarchy:
    """All jet-space structures derived from one potential store."""

    def __init__(self, store, check_window=4):
        self.store = store
        self.dim = store.dim
        self.gmax = store.genus_max
        if self.gmax > 1:
            raise NotImplementedError("shipped jet constructions stop at genus one")
        self.check_window = check_window
        self._omega0 = {}
        self._omega0_3 = {}
        self._omega1 = {}
        self._phi = {}
        self._dxcache = {}
        self._slice_checked = False
        self._map = None
        self._L = None
        self._A_v = None
        self._A_w = None

    # ---------------------------------------------------------------- series

    def topo_series(self, family, alpha, k):
        return self.store.topological_jets(family, alpha, k)

    def omega_series(self, a, p, b, q):
        if b == UNIT:
            return self.store.two_point_unit(a, p)
        if a == UNIT:
            return self.store.two_point_unit(b, q)
        return self.store.two_point(a, p, b, q)

    # ------------------------------------------------------ jet substitution

    def eval_jet_function(self, f, symbol_series=None):
        """Evaluate a jet function on the topological solution, as a TSeries."""
        t_wm = self.store.degree_max
        mapping = {}
        for g in sorted(f.expr.num.generators() | f.expr.den.generators()):
            if g == HBAR:
                mapping[g] = TSeries.hbar_unit().truncate(h_wm=self.gmax)
            elif g[0] == 2:
                fam = {FAM_V: "v", FAM_W: "w"}[g[1]]
                mapping[g] = self.topo_series(fam, g[2], g[3])
            elif g[0] == 3:
                if symbol_series is None or g[1] not in symbol_series:
                    raise RepresentationError(f"symbol {g!r} has no t-series image")
                mapping[g] = symbol_series[g[1]]
            else:
                raise RepresentationError(f"unexpected generator {g!r}")
        num = self._eval_poly(f.expr.num, mapping, t_wm)
        den = self._eval_poly(f.expr.den, mapping, t_wm)
        out = num / den
        if f.watermark is not None:
            out = out.truncate(h_wm=f.watermark)
        return out.truncate(h_wm=self.gmax)

    def _eval_poly(self, p, mapping, t_wm):
        powers = {g: [TSeries.const(1, t_wm, self.gmax)] for g in mapping}
        total = TSeries.zero(None, None)
        for m, c in p.terms.items():
            term = TSeries.const(c, None, None)
            for g, e in m:
                pw = powers[g]
                while len(pw) <= e:
                    pw.append(pw[-1] * mapping[g])
                term = term * pw[e]
            total = total + term
        return total.truncate(t_wm, self.gmax)

    def verify_jet_rep(self, f, target, hbar_order=None, t_degree=None):
        """Exact coefficient comparison of a jet function against its t-series."""
        series = self.eval_jet_function(f)
        diff = series - target
        if hbar_order is not None and (diff.h_wm is None or diff.h_wm < hbar_order):
            return VerifyResult(False, f"hbar window {diff.h_wm} below requested {hbar_order}")
        if t_degree is not None and (diff.t_wm is None or diff.t_wm < t_degree):
            return VerifyResult(False, f"t-degree window {diff.t_wm} below requested {t_degree}")
        diff = diff.truncate(t_degree, hbar_order)
        bad = diff.first_mismatch(TSeries.zero())
        if bad is None:
            return VerifyResult(True)
        return VerifyResult(False, f"first differing monomial {bad}")

    # -------------------------------------------------------- genus-zero jets

    def _check_slice_identity(self):
        """v_alpha(t_0, 0, ...) = t_{alpha,0}: the string-equation consequence
        that licenses reading jet representations off the primary slice."""
        if self._slice_checked:
            return
        for alpha in range(1, self.dim + 1):
            sliced = self.topo_series("v", alpha, 0).restrict_primary()
            want = TSeries.coupling(alpha, 0).truncate(sliced.t_wm, sliced.h_wm)
            if not sliced.equals(want):
                raise RepresentationError(
                    f"slice identity failed for component {alpha}")
        self._slice_checked = True

    def _slice_to_jets(self, series):
        """Rebuild a primary-slice series as a polynomial in v[.,0]."""
        sliced = series.restrict_primary()
        ren = {tvar(alpha, 0): jetvar(FAM_V, alpha, 0) for alpha in range(1, self.dim + 1)}
        return JetFunction(FractionExpr.from_poly(sliced.poly.rename_gens(ren)))

    @staticmethod
    def _delta_value(a, p, b):
        """Two-point data with level -1 in the second slot: delta_{p,0} delta_{a,b},
        with UNIT slots contracted over components."""
        if p != 0:
            return 0
        if a == UNIT or b == UNIT:
            return 1
        return 1 if a == b else 0

    def omega0_jet(self, a, p, b, q, verify=True):
        """Omega^0_{a,p;b,q} as a polynomial in v[.,0]; unit slots via UNIT."""
        if q <= -2 or p <= -2:
            return JetFunction.zero()
        if q == -1:
            return JetFunction.const(self._delta_value(a, p, b))
        if p == -1:
            return JetFunction.const(self._delta_value(b, q, a))
        key = (a, p, b, q)
        cached = self._omega0.get(key)
        if cached is not None:
            return cached
        if a == UNIT:
            out = sum((self.omega0_jet(k, 0, b, q, verify) for k in range(1, self.dim + 1)),
                      JetFunction.zero())
        elif b == UNIT:
            out = sum((self.omega0_jet(a, p, k, 0, verify) for k in range(1, self.dim + 1)),
                      JetFunction.zero())
        else:
            self._check_slice_identity()
            series = self.store.two_point(a, p, b, q).hbar_coefficient(0)
            out = self._slice_to_jets(series)
            if verify:
                res = self.verify_jet_rep(out, series,
                                          hbar_order=0,
                                          t_degree=min(self.check_window,
                                                       series.t_wm))
                if not res:
                    raise RepresentationError(
                        f"omega0 jet rep {key} failed validation: {res.detail}")
        self._omega0[key] = out
        return out

    def omega0_3jet(self, a, p, b, q, c, r):
        """Genus-zero three point function, a function of v[.,0] and v[.,1].

        Built by differentiating the two-point jet representation along the
        genus-zero flow in the third slot; validated against the t-series.
        """
        if -1 in (p, q, r):
            return JetFunction.zero()
        key = (a, p, b, q, c, r)
        cached = self._omega0_3.get(key)
        if cached is not None:
            return cached
        if c == UNIT:
            out = sum((self.omega0_3jet(a, p, b, q, k, 0) for k in range(1, self.dim + 1)),
                      JetFunction.zero())
        else:
            out = self.transport(c, r, self.omega0_jet(a, p, b, q))
            if UNIT not in (a, b):
                series = self.store.three_point(a, p, b, q, c, r).hbar_coefficient(0)
                res = self.verify_jet_rep(out, series, hbar_order=0,
                                          t_degree=min(self.check_window - 1, series.t_wm))
                if not res:
                    raise RepresentationError(f"three-point jet rep {key}: {res.detail}")
        self._omega0_3[key] = out
        return out

    def restricted_3jet(self, a, b, mu, i):
        """The primary-slice reading of the third derivative in (a,0),(b,0),(mu,i):
        a function of v[.,0] only, used by the symmetry identity."""
        self._check_slice_identity()
        series = self.store.three_point(a, 0, b, 0, mu, i).hbar_coefficient(0)
        return self._slice_to_jets(series)

    # ------------------------------------------------------------- transports

    def dx_omega0(self, lam, b, q, order):
        """Cached x-derivatives of Omega^0_{lam,0;b,q}."""
        key = (lam, b, q, order)
        got = self._dxcache.get(key)
        if got is None:
            got = dx_iter(self.omega0_jet(lam, 0, b, q), order)
            self._dxcache[key] = got
        return got

    def transport(self, b, q, f):
        """d/dt_{b,q} along the principal flows, acting on v-jet functions."""
        out = JetFunction.zero()
        for lam, s in jet_dependencies(f, FAM_V):
            out = out + jet_partial(f, FAM_V, lam, s) * self.dx_omega0(lam, b, q, s + 1)
        return out

    # ------------------------------------------------------------ genus one

    def phi_jet(self, b, q):
        """Seed: dF_1/dt_{b,q} as a rational v-jet function (per component)."""
        key = (b, q)
        got = self._phi.get(key)
        if got is None:
            core = dx_iter(self.omega0_jet(b, 0, b, q), 2)
            got = core / (JetFunction.var(FAM_V, b, 1) * 24)
            self._phi[key] = got
        return got

    def omega1_jet(self, a, p, b, q, verify=True):
        """hbar^1 coefficient of Omega_{a,p;b,q} as a v-jet function."""
        if q == -1 or p == -1:
            return JetFunction.zero()
        key = (a, p, b, q)
        got = self._omega1.get(key)
        if got is not None:
            return got
        if a == UNIT:
            out = sum((self.omega1_jet(k, 0, b, q, verify) for k in range(1, self.dim + 1)),
                      JetFunction.zero())
        elif b == UNIT:
            out = sum((self.omega1_jet(a, p, k, 0, verify) for k in range(1, self.dim + 1)),
                      JetFunction.zero())
        else:
            out = self.transport(a, p, self.phi_jet(b, q))
            if verify:
                series = self.store.two_point(a, p, b, q).hbar_coefficient(1)
                res = self.verify_jet_rep(out, series, hbar_order=0,
                                          t_degree=min(self.check_window - 1, series.t_wm))
                if not res:
                    raise RepresentationError(
                        f"omega1 jet rep {(a, p, b, q)} failed validation: {res.detail}")
        self._omega1[key] = out
        return out

    def omega_jet(self, a, p, b, q):
        """Omega_{a,p;b,q} through the hbar watermark, as a v-jet function."""
        out = self.omega0_jet(a, p, b, q)
        if self.gmax >= 1 and q >= 0 and p >= 0:
            out = out + JetFunction.hbar() * self.omega1_jet(a, p, b, q)
        return out.truncate(self.gmax)

    def omega3_jet(self, a, p, b, q, c, r):
        """Three point function through the watermark (genus-one transported)."""
        out = self.omega0_3jet(a, p, b, q, c, r)
        if self.gmax >= 1 and -1 not in (p, q, r):
            if UNIT in (a, b, c):
                pieces = []
                if a == UNIT:
                    pieces = [self.omega3_jet(k, 0, b, q, c, r) for k in range(1, self.dim + 1)]
                elif b == UNIT:
                    pieces = [self.omega3_jet(a, p, k, 0, c, r) for k in range(1, self.dim + 1)]
                else:
                    pieces = [self.omega3_jet(a, p, b, q, k, 0) for k in range(1, self.dim + 1)]
                return sum(pieces, JetFunction.zero()).truncate(self.gmax)
            g1 = self.transport(a, p, self.transport(b, q, self.phi_jet(c, r)))
            out = out + JetFunction.hbar() * g1
        return out.truncate(self.gmax)

    # --------------------------------------------------------------- the map

    def quasi_miura(self):
        if self._map is None:
            corrections = {}
            if self.gmax >= 1:
                for alpha in range(1, self.dim + 1):
                    corrections[(alpha, 1)] = self.omega1_jet(alpha, 0, UNIT, 0)
            self._map = QuasiMiuraMap(self.dim, corrections, self.gmax)
        return self._map

    def G(self, alpha):
        return self.quasi_miura().corrections.get((alpha, 1), JetFunction.zero())

    # family conversions at genus watermark one

    def to_w(self, f):
        """Re-express a v-jet function in w-jets, order by order in hbar."""
        wm = self.gmax if f.watermark is None else min(f.watermark, self.gmax)
        f0 = f.hbar_component(0)
        out = f0.rename_family(FAM_V, FAM_W)
        if wm >= 1:
            f1 = f.hbar_component(1) if (f.watermark is None or f.watermark >= 1) else JetFunction.zero()
            corr = JetFunction.zero()
            for lam, s in jet_dependencies(f0, FAM_V):
                corr = corr + jet_partial(f0, FAM_V, lam, s) * dx_iter(self.G(lam), s)
            out = out + JetFunction.hbar() * (f1 - corr).rename_family(FAM_V, FAM_W)
        return out.truncate(wm)

    def to_v(self, f):
        """Re-express a w-jet function in v-jets by substituting the map."""
        wm = self.gmax if f.watermark is None else min(f.watermark, self.gmax)
        images = {}
        for g in sorted(f.expr.num.generators() | f.expr.den.generators()):
            if g[0] == 2 and g[1] == FAM_W:
                alpha, s = g[2], g[3]
                img = JetFunction.var(FAM_V, alpha, s)
                if self.gmax >= 1:
                    img = img + JetFunction.hbar() * dx_iter(self.G(alpha), s)
                images[g] = img.expr
        num = f.expr.num.subs(images)
        den = f.expr.den.subs(images)
        return JetFunction((num / den).normalize(), wm)

    # ------------------------------------------------------------ L operator

    def L_matrix(self):
        if self._L is None:
            m = OperatorMatrix.identity(self.dim)
            if self.gmax >= 1:
                h = JetFunction.hbar()
                for alpha in range(1, self.dim + 1):
                    for beta in range(1, self.dim + 1):
                        lin = linearization(self.G(alpha), FAM_V, beta)
                        m.entries[alpha - 1][beta - 1] = (
                            m.entries[alpha - 1][beta - 1] + lin.map_coeffs(lambda c: h * c))
            m = m.map_entries(lambda e: e.truncate(self.gmax))
            self._L = m
        return self._L

    def L_entry_w(self, alpha, beta):
        """L^alpha_beta with coefficients re-expressed in w-jets."""
        return self.L_matrix()[alpha, beta].map_coeffs(self.to_w)

    # --------------------------------------------------------------- bracket

    def bracket_v(self):
        """A = sum_gamma L o d_x o L* with coefficients in v-jets."""
        if self._A_v is None:
            L = self.L_matrix()
            dx = DiffOperator.dx()
            out = OperatorMatrix(self.dim)
            for b in range(self.dim):
                for x in range(self.dim):
                    acc = DiffOperator.zero()
                    for g in range(self.dim):
                        acc = acc + L.entries[b][g].compose(dx).compose(
                            L.entries[x][g].adjoint())
                    out.entries[b][x] = acc.truncate(self.gmax)
            self._A_v = out
        return self._A_v

    def bracket_w(self):
        """The bracket with coefficients re-expressed in w-jets; checked skew
        and free of a Dx^0 term."""
        if self._A_w is None:
            A = self.bracket_v().map_entries(lambda e: e.map_coeffs(self.to_w))
            if not is_skew(A, self.gmax):
                raise RepresentationError("full bracket lost skew-symmetry")
            for row in A.entries:
                for e in row:
                    if 0 in e.coeffs and not e.coeffs[0].is_zero():
                        raise RepresentationError("full bracket has a Dx^0 term")
            self._A_w = A
        return self._A_w

    # ----------------------------------------------------------- Hamiltonians

    def hamiltonian(self, alpha, p, verify=True):
        """Density of h_{alpha,p} = Omega_{alpha,p+1;unit,0} in w-jets."""
        density_v = self.omega_jet(alpha, p + 1, UNIT, 0)
        density = self.to_w(density_v)
        if verify:
            series = self.store.two_point_unit(alpha, p + 1)
            res = self.verify_jet_rep(density, series, hbar_order=self.gmax,
                                      t_degree=min(self.check_window - 1, series.t_wm))
            if not res:
                raise RepresentationError(f"hamiltonian ({alpha},{p}): {res.detail}")
        return JetRepresentation(density, f"h[{alpha},{p}]", self.gmax, self.check_window - 1)

    def principal_equation(self, alpha, beta, q):
        """Right side of the principal hierarchy equation for dv_alpha/dt_{beta,q}."""
        return total_x_derivative(self.omega0_jet(alpha, 0, beta, q))

    def commute_check(self, h1, h2):
        """Bracket density of two Hamiltonians has vanishing variational
        derivatives (the zero-functional criterion), within the watermark."""
        A = self.bracket_w()
        density = JetFunction.zero()
        grad2 = [variational_derivative(h2.value, FAM_W, b) for b in range(1, self.dim + 1)]
        for a in range(1, self.dim + 1):
            da = variational_derivative(h1.value, FAM_W, a)
            for b in range(1, self.dim + 1):
                density = density + da * A[a, b].apply(grad2[b - 1])
        density = density.truncate(self.gmax)
        for xi in range(1, self.dim + 1):
            res = variational_derivative(density, FAM_W, xi).truncate(self.gmax)
            if not res.is_zero():
                return VerifyResult(False, f"delta/delta w_{xi} of bracket density != 0")
        return VerifyResult(True)


# ---------------------------------------------------------------------------
# named fixtures
# ---------------------------------------------------------------------------

from .potentials import CohFTSpec, PotentialStore  # noqa: E402

FIXTURE_SPECS = {
    "trivial-1d": CohFTSpec(1, "trivial-1d", 1, 12),
    "product-2d": CohFTSpec(2, "product-of-trivial", 1, 10),
}


def fixture_hierarchy(name, check_window=4):
    try:
        spec = FIXTURE_SPECS[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; have {sorted(FIXTURE_SPECS)}")
    return Hierarchy(PotentialStore(spec), check_window)


def quasi_miura_fixture(name, check_window=4):
    """Shipped quasi-Miura maps: trivial-1d-g1, product-g1."""
    base = {"trivial-1d-g1": "trivial-1d", "product-g1": "product-2d"}
    try:
        hier = fixture_hierarchy(base[name], check_window)
    except KeyError:
        raise KeyError(f"unknown quasi-Miura fixture {name!r}")
    return hier.quasi_miura()
