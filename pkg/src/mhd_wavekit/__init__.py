"""Wave analysis toolkit for isentropic planar MHD in Lagrangian coordinates."""

from .charfields import (
    alpha_roots,
    degeneracy_check,
    eigenpair,
    eigenvalue,
    eigenvalues,
    eigenvector,
    gnl_derivative,
)
from .contraction import (
    R1_BACKWARD,
    R6_FORWARD,
    Certificate,
    WeightedFunctional,
    certify_noncontraction,
    coercivity_bound,
    default_a_grid,
    evaluate_F,
    f1_tail_scan,
    find_sigma_crossing,
    sweep_a,
)
from .errors import *  # noqa: F401,F403
from .thermo import (
    DEFAULT_TOL,
    ConservedState,
    DiscontinuityWave,
    FluidState,
    GasLaw,
    PiecewiseConstantProfile,
    Tolerance,
    entropy,
    entropy_flux,
    entropy_gradient,
    flux,
    pressure,
    pseudo_distance_integral,
    relative_entropy,
    sound_speed_sq,
)
from .wavecurves import (
    ContactSpec,
    ShockSolveRequest,
    condition_2B,
    condition_3B,
    condition_contact_AB,
    contact_construct,
    dissipation_direct,
    dissipation_factored,
    lax_check,
    rarefaction_integrate,
    rh_check,
    solve_shock,
)

__version__ = "0.1.0"
