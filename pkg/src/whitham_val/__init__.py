"""Numerical validation of slow modulation dynamics for a coupled
Ginzburg-Landau system: spectral simulation, modulation equations in
shrinking Gevrey spaces, corrector hierarchy, and linear analysis."""

__version__ = "0.1.0"

from .errors import (
    BlowUp,
    ConfigError,
    GevreyOverflow,
    NoGap,
    NonPositiveAmplitude,
    NonzeroMean,
    NoWaveTrain,
    PeriodMismatch,
    PhaseSingularity,
    SmallnessViolated,
    StripExhausted,
    ValidationError,
)
from .spectral import (
    GevreyParams,
    Grid1D,
    MultiplierSpec,
    SpectralField,
    antiderivative,
    apply_multiplier,
    chi_bump,
    derivative_symbol,
    from_spectrum,
    gevrey_filter_step,
    gevrey_norm,
    nonlinear_spectra,
    pad_spectrum,
    spectral_derivative,
    to_spectrum,
)
from .wme import (
    Classification,
    ModulationState,
    WmeConfig,
    classify_matrix,
    classify_wme,
    estimate_eta,
    solve_r0,
    wme_flux,
    wme_solve,
    wme_step,
)
from .model import (
    AbState,
    EtdStepper,
    GglParams,
    PolarState,
    WaveTrain,
    extract_polar,
    rhs_ab,
    rhs_polar,
    simulate,
    step_etd,
    wavetrain_field,
    wavetrain_from_q,
)
from .correctors import (
    CorrectorFields,
    HierarchySolution,
    ResidualReport,
    assemble_ansatz,
    corrector1_r,
    corrector1_solve,
    corrector1_step,
    lift_to_ab,
    residuals_scaled,
    solve_hierarchy,
    time_derivative_r0,
)
from .linear_analysis import (
    DampingFit,
    LambdaSymbol,
    SemiderivativeReport,
    SpectralSplit,
    SpectrumCurves,
    assemble_lambda_hat,
    build_split,
    center_eigenvalue_derivatives,
    fit_damping_bounds,
    lambda2_prime0,
    spectrum_curves,
    verify_semiderivative,
    w_nonlinearity,
)

from .config import (
    EXPERIMENTS,
    ExperimentConfig,
    config_from_dict,
    initial_state,
    load_config,
)
from .report import (
    CurveRow,
    RunReport,
    SlopeFit,
    fit_loglog_slope,
    write_curves_csv,
    write_report_json,
)
from .experiments import (
    fine_mode_count,
    run_classify_sweep,
    run_error_scaling,
    run_experiment,
    run_residual_order,
    run_spectral_report,
    run_wavetrain_invariance,
)
