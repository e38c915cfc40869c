"""dzdeform: exact verification of deformation identities for
Dubrovin-Zhang-type hierarchies on formal jet spaces.

The public surface mirrors the layer structure: exact algebra (poly),
jet calculus (jets), differential operators (operators), the psi-class
oracle (wk), coupling series and potentials (series, potentials), jet
representations of the hierarchy (hierarchy), infinitesimal deformations
and identity checks (givental, universal), and the batch harness
(verify, cli).
"""

from .poly import PolyExpr, FractionExpr, HBAR, tvar, jetvar, symgen
from .series import TSeries, WatermarkError
from .jets import (JetFunction, FAM_V, FAM_W, FAM_U, define_symbol,
                   reset_symbols, total_x_derivative, jet_partial,
                   variational_derivative, differential_degree)
from .operators import (DiffOperator, OperatorMatrix, linearization,
                        tau_apply, variational_delta, op_equal, matrix_equal,
                        is_skew)
from .wk import correlator, dilaton_value, string_value
from .potentials import CohFTSpec, PotentialStore, build_potential
from .hierarchy import (Hierarchy, QuasiMiuraMap, JetRepresentation, UNIT,
                        fixture_hierarchy, quasi_miura_fixture)
from .givental import (GiventalGenerator, make_generator, DeformationContext,
                       IdentityReport)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
