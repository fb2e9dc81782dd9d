"""Covariance-matrix simulation of anomalous relaxation (hot states
overtaking cold ones) in two coupled oscillators, one parametrically
driven, under white and Lorentzian colored noise."""

from .exceptions import (
    ConfigError,
    DecompositionError,
    ParameterError,
    SimulationError,
    UnstableSystemError,
)
from .gaussian_states import (
    Covariance,
    EtaInitPolicy,
    PreparationMode,
    SqueezeParams,
    SqueezeScope,
    SqueezeTarget,
    embed_extended,
    frobenius_distance,
    prepare_state,
    squeeze_matrix,
    system_block,
    thermal_covariance,
)
from .lyapunov import (
    DistanceSeries,
    FixedStepRK4,
    MatrixExponential,
    PropagatorConfig,
    distance_series,
    propagate,
    steady_state,
)
from .model import (
    DualLorentzian,
    LorentzianChannel,
    NoiseModel,
    SingleLorentzian,
    SystemParams,
    White,
    diffusion_matrix,
    drift_matrix,
    routh_hurwitz_stable,
    spectral_stable,
)
from .montecarlo import (
    EnsembleConfig,
    integrate_ensemble,
    ou_autocorrelation,
    sample_initial,
)
from .mpemba import (
    CrossingResult,
    Scenario,
    ScenarioResult,
    StatePrep,
    compare_noise_models,
    crossing_time,
    run_scenario,
)
from .spectral import (
    SlowModeReport,
    SpectralDecomposition,
    decompose,
    generator,
    mpemba_strength,
    projections,
    slow_mode_amplitude,
)
from .sweep import (
    PhaseCell,
    SweepSpec,
    phase_diagram,
    strength_sweep,
    sweep_lambda,
    table1_presets,
)

__version__ = "0.1.0"
