"""Cost of counterdiabatic driving for a parametric oscillator.

Subpackages by concern: `protocol` (frequency schedules and the
counterdiabatic frequency), `modes` (mode functions and Bogoliubov
coefficients), `oscillatory` (the moment integrals and the shape curve
F[x, y]), `cost` (transition weights and excitation), `wigner` (action-space
eigenfunctions and the final-state decomposition), `oracle` (c-number Monte
Carlo cross-check), `cli` (batch commands).
"""

from .config import RunConfig, Tolerances, load_config, parse_config
from .cost import (
    CostReport,
    build_cost_report,
    delta_n,
    dissipation_kernel,
    extra_work,
    noise_kernel,
    nu_estimate,
    nu_mu,
    transition_probabilities,
)
from .driving import DrivingSpec
from .errors import (
    AccuracyError,
    ConfigurationError,
    DecompositionError,
    DomainError,
    IntegrationError,
    StaCostError,
    ValidityError,
)
from .modes import (
    ActionAngle,
    BogoliubovCoefficients,
    ModeFunction,
    action_angle,
    bogoliubov,
    particle_number,
    reconstruct_xp,
    solve_mode,
    wkb_mode,
)
from .oracle import OracleReport, SampleSpec, run_oracle, sample_fluctuation, suggested_variances
from .oscillatory import OscillatoryResult, f_curve, f_curve_result, integral_I0, integral_I1
from .protocol import FrequencyProtocol, SystemSpec
from .wigner import (
    WignerEigenstate,
    final_state_decomposition,
    laguerre,
    verify_recursions,
)

__version__ = "0.1.0"
