"""magrep: irreducibility, reduction and k.p model construction for
projective co-representations of finite anti-unitary (magnetic) groups."""

from . import errors
from .groups import (
    FactorSystem,
    MagneticGroup,
    build_group,
    conjugacy_classes,
    conjugate_by_t0,
    restricted_group,
    validate_cocycle,
)
from .coreps import (
    Character,
    CoRep,
    character,
    conjugate_corep,
    corep_from_matrices,
    direct_sum,
    f_of_h,
    gauge_transform,
    product_rep_v,
    random_gauge,
    regular_corep,
    restrict_corep,
    unitary_restriction,
    validate_corep,
)
from .linalg import (
    EigenSystem,
    eigenspace_of_one,
    eigh,
    random_unitary,
    simultaneous_diag,
    symmetric_unitary_sqrt,
)
from .reduction import (
    CommutantHamiltonian,
    IrrepDecomposition,
    build_G_commutant,
    build_H_commutant,
    class_operator,
    combined_class_operator,
    hermitian_class_operators,
    irreducibility_index,
    reduce_corep,
    torsion_indicator,
    torsion_number,
)
from .kp import (
    KpModel,
    ProbeRepAction,
    build_W,
    build_gamma_matrices,
    covariant_tuple_basis,
    dispersion_order,
    dual_rep,
    linear_multiplicity,
    multiplicity_value,
    polynomial_channel,
    probe_stability,
    trivial_multiplicity,
    tuple_span_residual,
    validate_action,
)
from .catalog import CatalogEntry, catalog_get, catalog_list

__version__ = "0.1.0"
