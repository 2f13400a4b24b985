"""Measurement-dependent local deterministic models of the singlet state.

A one-parameter (gamma) family of hidden-variable densities whose
correlation equals the singlet prediction ``-cos phi``, together with the
L1 distance between densities for different settings and its maximum.
"""

__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, NoSignChangeError  # noqa: E402
from .numerics import (  # noqa: E402
    QuadratureSpec,
    SearchRegion,
    find_root,
    integrate,
    ln_gamma,
    maximize_region,
    theta_prefactor,
)
from .model import (  # noqa: E402
    Coefficients,
    HiddenVariable,
    RegionIntegrals,
    coefficients_gamma0_closed,
    outcome_A,
    outcome_B,
    reduced_density_g,
    region_integrals,
    solve_coefficients,
    verify_constraints,
    weight_f,
)
from .correlation import (  # noqa: E402
    BellCheckResult,
    CorrelationEstimate,
    bell_original_check,
    chsh_value,
    estimate_correlation_mc,
    expectation_quadrature,
    model_E,
    quantum_E,
    sample_phi_marginal,
)
from .distance import (  # noqa: E402
    DistancePair,
    DmaxResult,
    distance_d,
    distance_gamma0_antidiagonal,
    dmax_scan,
    find_dmax,
    solve_gamma0_maximum,
    stationarity_residual,
)
