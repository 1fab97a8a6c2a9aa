"""Resonant periodic points, separatrices and thresholds of the planar
circular restricted three-body problem near a p:q mean-motion resonance."""

from .errors import AssumptionAError, CollisionError, ConvergenceError, DomainError
from .kepler import (
    CartesianState,
    DelaunayState,
    cartesian_to_delaunay,
    delaunay_to_cartesian,
    hamiltonian_cartesian,
    hamiltonian_delaunay,
    solve_kepler,
    true_anomaly,
)
from .perturbation import omega, omega_partials, omega_prime
from .return_map import (
    FixedPoint,
    ResonanceContext,
    ResonanceFunctions,
    apply_scaled_map,
    eigen_data,
    find_fixed_points,
    phi,
    psi_chi,
    resonance_functions,
)
from .separatrix import (
    HomoclinicEstimate,
    SeparatrixExpansion,
    choose_section,
    homoclinic_point,
    manifold_in_Ll,
    separatrix_expansion,
    u_of_l,
    v_of_l,
)
from .fourier import (
    CStarReport,
    FourierTable,
    LaplaceSeries,
    c_star,
    fourier_c,
    fourier_c_mp,
    fourier_table,
    laplace_b,
    laplace_series,
    phi_fourier,
)
from .thresholds import (
    MU_JUPITER,
    AssumptionAReport,
    BoundaryThreshold,
    asymmetric_threshold,
    boundary_threshold,
    check_assumption_a,
)
from .dynamics import (
    ManifoldArc,
    NumericMap,
    SectionPoint,
    cartesian_return,
    first_order_map,
    grow_manifold,
    numeric_fixed_point,
    numeric_return_map,
    perturbative_error_scan,
)

__version__ = "0.1.0"
