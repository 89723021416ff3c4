"""Temporal-width modelling and source optimisation for dispersive photon-pair links."""

from .analytic import (
    PumpRegime,
    classify_pump_regime,
    optimal_pump_fixed_crystal,
    symmetric_full_optimum,
    tau_a_low,
)
from .crystal import CrystalSpec, effective_sigma, phase_matching_angle
from .estimators import DispersedWidthTransformer, SourceOptimizer
from .exceptions import (
    BracketError,
    ConfigError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    GridError,
    SingularSigmaError,
    SpdcOptError,
    VerificationError,
)
from .numeric import full_optimum_2d, sweep
from .oracle import GridSpec, empirical_widths, joint_temporal_intensity
from .qkd import QkdScenario, ScenarioTemplate, key_rate, max_security_distance, optimize_windows
from .temporal import (
    BETA_SMF,
    ChannelParams,
    DetectorParams,
    SourceParams,
    tau_a,
    tau_a_jittered,
    tau_ah,
    tau_ah_jittered,
)

__all__ = [
    "BETA_SMF",
    "BracketError",
    "ChannelParams",
    "ConfigError",
    "ConsistencyError",
    "ConvergenceError",
    "CrystalSpec",
    "DetectorParams",
    "DispersedWidthTransformer",
    "DomainError",
    "GridError",
    "GridSpec",
    "PumpRegime",
    "QkdScenario",
    "ScenarioTemplate",
    "SingularSigmaError",
    "SourceOptimizer",
    "SourceParams",
    "SpdcOptError",
    "VerificationError",
    "classify_pump_regime",
    "effective_sigma",
    "empirical_widths",
    "full_optimum_2d",
    "joint_temporal_intensity",
    "key_rate",
    "max_security_distance",
    "optimal_pump_fixed_crystal",
    "optimize_windows",
    "phase_matching_angle",
    "sweep",
    "symmetric_full_optimum",
    "tau_a",
    "tau_a_jittered",
    "tau_ah",
    "tau_ah_jittered",
    "tau_a_low",
]
