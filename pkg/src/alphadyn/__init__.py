"""Interval maps driven by countable partitions of (0, 1].

The package is organised around PartitionSpec: pick a partition family,
then feed it to the map evaluators (dynamics), the renewal-sequence and
limit-law tools (renewal), the pressure / free-energy / spectrum machinery
(thermo), the tent-map conjugacy (conjugacy), or the trajectory simulators
(simulate).
"""

from .partitions import (
    Classification,
    DomainError,
    Dyadic,
    Explicit,
    Geometric,
    Harmonic,
    LogPowerAtoms,
    PartitionSpec,
    PowerAtoms,
    PowerTail,
    RangeError,
    SpecParseError,
    parse_spec,
    spec_from_dict,
)
from .dynamics import (
    Cylinder,
    DigitWord,
    FareyCode,
    assemble,
    convergent,
    cylinder,
    expand,
    farey_code,
    farey_map,
    farey_shift,
    inverse_branch_farey,
    inverse_branch_luroth,
    jump_identity_check,
    jump_time,
    luroth_map,
)
from .conjugacy import (
    ThetaResult,
    conjugacy_check,
    holder_exponents,
    holder_ratio,
    max_entropy_mass,
    tent_map,
    theta,
    theta_series,
)
from .renewal import (
    RenewalSequence,
    composition_oracle,
    gamma,
    gl_liminf_target,
    gl_liminf_track,
    limit_prediction,
    renewal_sequence,
    strong_law_constant,
    strong_law_ratio,
    weak_law_constant,
    weak_law_ratio,
)
from .thermo import (
    CurveSample,
    CurveTable,
    PhaseReport,
    farey_phase_report,
    free_energy,
    free_energy_curve,
    legendre_check,
    luroth_phase_report,
    post_transition_tau,
    pressure,
    pressure_curve,
    pressure_derivative,
    r_plus,
    s_bounds,
    sigma_spectrum,
    t_minus,
    tau_spectrum,
    transition_threshold,
)
from .simulate import (
    RunningAverageRow,
    TrajectoryStats,
    decade_averages,
    demo_orbit,
    farey_lyapunov_estimate,
    invariant_density_check,
    luroth_lyapunov_estimate,
    sample_digits,
    sum_level_frequency,
)
from ._util import INF

__all__ = [
    "Classification",
    "CurveSample",
    "CurveTable",
    "Cylinder",
    "DigitWord",
    "DomainError",
    "Dyadic",
    "Explicit",
    "FareyCode",
    "Geometric",
    "Harmonic",
    "INF",
    "LogPowerAtoms",
    "PartitionSpec",
    "PhaseReport",
    "PowerAtoms",
    "PowerTail",
    "RangeError",
    "RenewalSequence",
    "RunningAverageRow",
    "SpecParseError",
    "ThetaResult",
    "TrajectoryStats",
    "assemble",
    "composition_oracle",
    "conjugacy_check",
    "convergent",
    "cylinder",
    "decade_averages",
    "demo_orbit",
    "expand",
    "farey_code",
    "farey_lyapunov_estimate",
    "farey_map",
    "farey_phase_report",
    "farey_shift",
    "free_energy",
    "free_energy_curve",
    "gamma",
    "gl_liminf_target",
    "gl_liminf_track",
    "holder_exponents",
    "holder_ratio",
    "invariant_density_check",
    "inverse_branch_farey",
    "inverse_branch_luroth",
    "jump_identity_check",
    "jump_time",
    "legendre_check",
    "limit_prediction",
    "luroth_lyapunov_estimate",
    "luroth_map",
    "luroth_phase_report",
    "max_entropy_mass",
    "parse_spec",
    "post_transition_tau",
    "pressure",
    "pressure_curve",
    "pressure_derivative",
    "r_plus",
    "renewal_sequence",
    "s_bounds",
    "sample_digits",
    "sigma_spectrum",
    "spec_from_dict",
    "strong_law_constant",
    "strong_law_ratio",
    "sum_level_frequency",
    "t_minus",
    "tau_spectrum",
    "tent_map",
    "theta",
    "theta_series",
    "transition_threshold",
    "weak_law_constant",
    "weak_law_ratio",
]

__version__ = "0.1.0"
