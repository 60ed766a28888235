"""Exact stationary radial solutions of the Schrodinger-Poisson system on
flat, hyperbolic and spherical spaces: an exact derivation engine, a
verified solution catalog, and a numerical checking layer."""

from .geometry import RadialDomain, Regime, Space, metric_C, metric_S, metric_T, sphere_area, volume_weight
from .symbolic import (
    Basis,
    Graded,
    Monomial,
    RadialExpr,
    collect,
    expr_add,
    expr_div_exact,
    expr_eval,
    expr_mul,
    laplacian,
    limit_at_infinity,
)
from .derivation import (
    AlphaSign,
    AnsatzFamily,
    DerivationHit,
    Family,
    OmegaValue,
    classify_alpha_sign,
    consistency_residual,
    omega_of,
    potential_term,
    solve_background,
    solve_homogeneous,
    solve_singular_flat,
)
from .catalog import (
    CATALOG,
    GradedMass,
    Solution,
    catalog_list,
    compactness_obstruction_check,
    get_solution,
    scale_flat_solution,
    solution_from_hit,
)
from .numeric import (
    Divergent,
    Grid,
    PohozaevFunctionals,
    VerificationReport,
    default_grid,
    fd_residual,
    integrate_radial,
    mass,
    pohozaev_check,
    pohozaev_functionals,
    poisson_invert,
    verify_solution,
)

__version__ = "0.1.0"
