"""Exact and analytic verification of Tamagawa-number identities for
algebraic tori attached to quadratic and biquadratic fields."""

from .cohomology import (
    CohomologyMap,
    cohomology,
    h0_torsion_dual,
    ono_constant,
    restriction,
    sha_bk_order,
    sha_order,
    stacked_kernel_order,
)
from .errors import (
    BudgetExceededError,
    ConfigError,
    NotStabilizedError,
    QRankError,
    TamagawaError,
    UnsupportedTorusError,
)
from .galois import (
    FAMILIES,
    INF,
    FiniteGroup,
    GaloisLattice,
    TorusSpec,
    build_torus,
    decomposition_subgroup,
    euler_factor_at_one,
    frobenius_element,
    is_good_prime,
    point_count_Fp,
    q_rank,
    trivial_lattice,
)
from .globalasm import (
    ArchVolume,
    CGammaResult,
    GlobalReport,
    LValue,
    TauValue,
    adaptive_simpson,
    analytic_class_number,
    archimedean_volume,
    assert_good_factors,
    c_gamma,
    l_value,
    ono_rhs,
    partial_l_value,
    tau_coh,
    tau_tam,
    torsion_unit_order,
    verify_tnc,
)
from .localmeasure import (
    LocalDensity,
    bad_prime_density,
    brute_force_density,
    cross_validate_density,
    local_density,
    local_density_good,
)
from .models import AffineModel, count_points_mod, norm_form_model, unit_group_model
from .quadfield import (
    BiquadField,
    ClassGroupData,
    QuadField,
    UnitData,
    class_group,
    fundamental_unit,
    is_fundamental_discriminant,
    norm_one_unit,
    reduced_forms,
    residue_ring_norm_count,
    splitting_type,
)
from .report import VerificationReport, render_report

__version__ = "0.1.0"

__all__ = [
    "AffineModel",
    "ArchVolume",
    "BiquadField",
    "BudgetExceededError",
    "CGammaResult",
    "ClassGroupData",
    "CohomologyMap",
    "ConfigError",
    "FAMILIES",
    "FiniteGroup",
    "GaloisLattice",
    "GlobalReport",
    "INF",
    "LValue",
    "LocalDensity",
    "NotStabilizedError",
    "QRankError",
    "QuadField",
    "TamagawaError",
    "TauValue",
    "TorusSpec",
    "UnitData",
    "UnsupportedTorusError",
    "VerificationReport",
    "adaptive_simpson",
    "analytic_class_number",
    "archimedean_volume",
    "assert_good_factors",
    "bad_prime_density",
    "brute_force_density",
    "build_torus",
    "c_gamma",
    "class_group",
    "cohomology",
    "count_points_mod",
    "cross_validate_density",
    "decomposition_subgroup",
    "euler_factor_at_one",
    "frobenius_element",
    "fundamental_unit",
    "h0_torsion_dual",
    "is_fundamental_discriminant",
    "is_good_prime",
    "l_value",
    "local_density",
    "local_density_good",
    "norm_form_model",
    "norm_one_unit",
    "ono_constant",
    "ono_rhs",
    "partial_l_value",
    "point_count_Fp",
    "q_rank",
    "reduced_forms",
    "render_report",
    "residue_ring_norm_count",
    "restriction",
    "sha_bk_order",
    "sha_order",
    "splitting_type",
    "stacked_kernel_order",
    "tau_coh",
    "tau_tam",
    "torsion_unit_order",
    "trivial_lattice",
    "unit_group_model",
    "verify_tnc",
]
