"""Simulation and spectral analysis of two-analyzer photon correlation
experiments: exact and Monte Carlo quantum statistics, deterministic
hidden-variable mixtures, Fourier/Schmidt spectra, and the moment-matrix
comparison that separates the two.
"""

from .core import (
    PERIOD,
    ConstraintReport,
    CorrelationFunction,
    RandomStream,
    check_constraints,
    derive_setting_seed,
    normalize_angle,
    normalize_angles,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .lhv import (
    LhvModel,
    ModelValidationError,
    SimpleFunctionSpec,
    aspect_correlation_closed,
    aspect_correlation_function,
    aspect_model,
    aspect_response,
    aspect_to_simple,
    eval_simple,
    fig2_spec,
    lhv_correlation_exact,
    lhv_estimate_correlation,
    load_model,
    save_model,
    shift_spec,
)
from .quantum import (
    MeasuredCorrelation,
    estimate_correlation,
    joint_probability,
    measured_correlation_function,
    sample_pair,
    singlet_correlation,
    singlet_correlation_function,
)
from .fourier import (
    FourierSpectrum,
    Spectrum2D,
    coefficients_2d,
    coefficients_quadrature,
    coefficients_simple,
    parseval_check,
    partial_sum,
)
from .theorem import (
    IncompatibilityReport,
    MomentMatrix,
    SchmidtSpectrum,
    chsh_score,
    forced_response,
    incompatibility_report,
    moment_matrix,
    quantum_target,
    schmidt_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "PERIOD",
    "KERNEL_BACKEND",
    "ConstraintReport",
    "CorrelationFunction",
    "RandomStream",
    "check_constraints",
    "derive_setting_seed",
    "normalize_angle",
    "normalize_angles",
    "LhvModel",
    "ModelValidationError",
    "SimpleFunctionSpec",
    "aspect_correlation_closed",
    "aspect_correlation_function",
    "aspect_model",
    "aspect_response",
    "aspect_to_simple",
    "eval_simple",
    "fig2_spec",
    "lhv_correlation_exact",
    "lhv_estimate_correlation",
    "load_model",
    "save_model",
    "shift_spec",
    "MeasuredCorrelation",
    "estimate_correlation",
    "joint_probability",
    "measured_correlation_function",
    "sample_pair",
    "singlet_correlation",
    "singlet_correlation_function",
    "FourierSpectrum",
    "Spectrum2D",
    "coefficients_2d",
    "coefficients_quadrature",
    "coefficients_simple",
    "parseval_check",
    "partial_sum",
    "IncompatibilityReport",
    "MomentMatrix",
    "SchmidtSpectrum",
    "chsh_score",
    "forced_response",
    "incompatibility_report",
    "moment_matrix",
    "quantum_target",
    "schmidt_spectrum",
    "__version__",
]
