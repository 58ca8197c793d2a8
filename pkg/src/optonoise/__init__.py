"""Quantum measurement-induced noise for squeezed-light optomechanical sensing."""

from .cavity import (
    CavityParams,
    Coupling,
    OutputCoefficients,
    SpectrumPoint,
    Susceptibilities,
    force_psd,
    force_psd_momentum,
    force_psd_position,
    momentum_from_position_coupling,
    output_quadratures,
    output_quadratures_momentum,
    output_quadratures_position,
    spectrum_from_outputs,
    susceptibilities,
)
from .exceptions import (
    DegenerateQuadrature,
    InvalidParameter,
    NotPositiveSemidefinite,
    OptonoiseError,
    SingularSusceptibility,
    ZeroSignal,
)
from .operators import AffineMap, OperatorBasis, OperatorVector, beamsplitter_loss, compose
from .optimal import (
    StrategyConfig,
    SweepCurve,
    SweepResult,
    ZetaOptimum,
    angle_vs_frequency,
    angle_vs_power,
    broadband_sweep,
    g_opt,
    g_opt_momentum,
    g_opt_position,
    log_grid,
    narrowband_sweep,
    optimal_zeta,
    optimal_zeta_single,
    optimal_zeta_two,
    run_strategy,
    theta_opt,
    theta_opt_momentum,
    theta_opt_position,
    theta_opt_toy_single,
    theta_opt_toy_two,
    zeta_sql,
)
from .oracle import OracleConfig, OracleEstimate, estimate_noise, estimate_output_coefficients
from .squeezing import (
    CorrelatorMatrix,
    SingleModeMoments,
    SqueezeParams,
    TwoModeMoments,
    single_mode_moments,
    two_mode_moments,
)
from .toy import (
    LinearizationCheck,
    ToySingleParams,
    ToyTwoParams,
    beta_from_physical,
    evolve_single,
    evolve_two,
    linearization_check,
    measured_quadrature_single,
    measured_quadrature_two,
    noise_metric_single,
    noise_metric_single_lossy,
    noise_metric_two,
    position_estimator_single,
    position_estimator_two,
    zeta_from_physical,
)

__version__ = "0.1.0"
