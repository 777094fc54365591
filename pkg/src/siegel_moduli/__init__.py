"""Numerics on Siegel upper half spaces, their direct limit and Torelli images."""

from .degeneration import (
    DegenerationFamily,
    DegenerationReport,
    enumerate_boundary_strata,
    make_family,
    neck_limit_probe,
)
from .errors import SiegelError
from .jacobian import (
    HyperellipticCurve,
    QuadDifferential,
    bergman_density,
    bergman_qd_product,
    bergman_total_mass,
    gram_matrix,
    period_matrix,
    reduced_period,
    torelli_embed,
)
from .measure import (
    MCResult,
    StratifiedMeasureConfig,
    TorusMapSpec,
    dirichlet_energy_torus,
    integrate_stratified,
    partition_function,
    sample_fundamental_domain,
    stratum_volume,
)
from .reduction import (
    in_fundamental_domain,
    is_minkowski_reduced,
    minkowski_reduce,
    quotient_distance,
    siegel_reduce,
)
from .siegel import (
    SiegelPoint,
    SymplecticElement,
    base_point,
    cross_ratio_eigenvalues,
    make_siegel_point,
    make_symplectic,
    siegel_distance,
    sp_action,
    sp_embed,
)
from .universal import (
    BoundaryPoint,
    StratumDescriptor,
    UniversalPoint,
    boundary_project,
    classify_stratum,
    embed_point,
    stabilize,
    universal_distance,
)

__version__ = "0.1.0"
