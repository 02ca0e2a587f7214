"""GHZ-state magnetic-field sensing under independent dephasing.

Closed-form decoherence rates and estimation variances for GHZ and separable
probes, a Monte Carlo noise-trajectory oracle that verifies them, and
scaling-law analysis of the super-classical L^(-3/4) uncertainty exponent.
"""

__version__ = "0.1.0"

from .estimation import (
    ExperimentConfig,
    FringeNodeError,
    OperatingPointError,
    ProbeStrategy,
    VarianceBounds,
    signal_derivative,
    signal_probability,
    variance,
    variance_bounds,
    variance_ghz,
    variance_ideal,
    variance_separable,
)
from .montecarlo import (
    CovarianceFactorizationError,
    EstimationRun,
    EstimatorSaturationWarning,
    MseResult,
    TrajectoryConfig,
    TrajectoryEnsemble,
    empirical_mse,
    ensemble_coherence,
    invert_probability,
    sample_trajectories,
    simulate_measurements,
)
from .noise import (
    KERNEL_PEAK,
    BosonicBathParams,
    ClassicalNoiseParams,
    DephasingModel,
    coherence,
    correlation,
    gamma_bosonic,
    gamma_classical,
    gamma_limit_markov,
    gamma_limit_one_over_f,
)
from .scaling import (
    DIVERGENCE_WINDOW,
    DivergenceProbe,
    ExponentFit,
    GammaBoundCheck,
    OptimalExposure,
    ScalingSeries,
    SchedulePolicy,
    divergence_probe,
    exposure_time,
    fidelity_smalltime,
    fit_exponent,
    gamma_bound_check,
    optimal_exposure,
    uncertainty_curve,
)

__all__ = [
    "__version__",
    "KERNEL_PEAK",
    "ClassicalNoiseParams",
    "BosonicBathParams",
    "DephasingModel",
    "correlation",
    "gamma_classical",
    "gamma_limit_markov",
    "gamma_limit_one_over_f",
    "gamma_bosonic",
    "coherence",
    "ExperimentConfig",
    "ProbeStrategy",
    "VarianceBounds",
    "FringeNodeError",
    "OperatingPointError",
    "signal_probability",
    "signal_derivative",
    "variance",
    "variance_ghz",
    "variance_ideal",
    "variance_separable",
    "variance_bounds",
    "TrajectoryConfig",
    "TrajectoryEnsemble",
    "EstimationRun",
    "MseResult",
    "CovarianceFactorizationError",
    "EstimatorSaturationWarning",
    "sample_trajectories",
    "ensemble_coherence",
    "invert_probability",
    "simulate_measurements",
    "empirical_mse",
    "DIVERGENCE_WINDOW",
    "SchedulePolicy",
    "ScalingSeries",
    "ExponentFit",
    "GammaBoundCheck",
    "OptimalExposure",
    "DivergenceProbe",
    "exposure_time",
    "gamma_bound_check",
    "uncertainty_curve",
    "fit_exponent",
    "optimal_exposure",
    "divergence_probe",
    "fidelity_smalltime",
]
