"""Exact stimulated emission of a waveguide-coupled two-level atom.

Evaluates the probability that a pulsed Fock-state drive stimulates an
extra photon into its own temporal mode, exactly (extended-precision
alternating series over time-ordered coefficients) and in its closed-form
limits, plus the coherent-drive factorization and the exact single-photon
scattered-state projections.
"""

__version__ = "0.1.0"

from .coherent import AmplitudePair, CoherentDrive, coherent_overlap_log, evolve_two_level
from .extended import DEFAULT_BITS, ExtendedReal
from .fock_series import (
    CoefficientTable,
    QuadratureError,
    SeriesOrderError,
    asymptotic_exponential_table,
    coefficient_tables,
    fp_exponential_limit,
    fp_general,
    fp_short_pulse_limit,
    fp_time_resolved_short,
    gp_time_resolved_short,
)
from .oracle import fp_bruteforce, projection_bruteforce
from .pulses import (
    ExponentialPulse,
    PulseError,
    PulseShape,
    SampledPulse,
    SquarePulse,
    normalize,
)
from .scatter import (
    TwoPhotonKernel,
    fock2_amplitude,
    projection,
    psi_scatter,
    residual_envelope,
)
from .stim_prob import (
    DriveSpec,
    PrecisionCeilingError,
    SquareRabiPoint,
    StimResult,
    p0_cos2,
    prefactor,
    pstim_exact,
    pstim_sin2,
    rabi_timeseries_short,
    square_rabi,
    sum_alternating,
)

__all__ = [
    "AmplitudePair",
    "CoefficientTable",
    "CoherentDrive",
    "DEFAULT_BITS",
    "DriveSpec",
    "ExponentialPulse",
    "ExtendedReal",
    "PrecisionCeilingError",
    "PulseError",
    "PulseShape",
    "QuadratureError",
    "SampledPulse",
    "SeriesOrderError",
    "SquarePulse",
    "SquareRabiPoint",
    "StimResult",
    "TwoPhotonKernel",
    "asymptotic_exponential_table",
    "coefficient_tables",
    "coherent_overlap_log",
    "evolve_two_level",
    "fock2_amplitude",
    "fp_bruteforce",
    "fp_exponential_limit",
    "fp_general",
    "fp_short_pulse_limit",
    "fp_time_resolved_short",
    "gp_time_resolved_short",
    "normalize",
    "p0_cos2",
    "prefactor",
    "projection",
    "projection_bruteforce",
    "pstim_exact",
    "pstim_sin2",
    "psi_scatter",
    "rabi_timeseries_short",
    "residual_envelope",
    "square_rabi",
    "sum_alternating",
]
