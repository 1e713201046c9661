"""Debiased, thresholded ridge regression with bootstrap simultaneous
inference for fixed-design linear models.

The pipeline: thin-SVD ridge fit, additive debiasing, hard thresholding,
then a Gaussian wild bootstrap for simultaneous confidence regions and
tests of gamma = M beta, and a hybrid (residual-ECDF + wild) bootstrap for
simultaneous prediction regions.  A Monte-Carlo harness runs the built-in
six-case coverage and power study at desk or full scale.
"""

__version__ = "0.1.0"

from .bootstrap import (
    BootstrapConfig,
    BootstrapDraws,
    ConfidenceRegion,
    TestResult,
    confidence_region,
    h_oracle,
    hypothesis_test,
    sample_quantile,
    wild_replicate,
)
from .errors import DataError, NumericalError, RidgebootError
from .estimator import (
    ImprovedFit,
    debias,
    expansion_check,
    improved_fit,
    k_diagnostics,
    ridge_estimate,
    ridge_weights,
    tau_for_selection,
    threshold_select,
)
from .model import (
    Hyperparams,
    ModelFrame,
    ThinSvd,
    build_frame,
    complement_project,
    ridge_bias_sd_bound,
    row_space_params,
    thin_svd,
)
from .model_select import CvGrid, CvReport, cross_validate, default_grids, fold_assignment
from .prediction import (
    EmpiricalCdf,
    PredictionRegion,
    cdf_from_raw_residuals,
    ecdf,
    hybrid_replicate,
    loo_residuals,
    predict_point,
    prediction_region,
)
from .regressor import DebiasedThresholdRidge
from .rng import StreamSpec, laplace, laplace_inverse_cdf, normal, resample_indices
from .simulate import (
    SimCase,
    SimReport,
    gen_beta,
    gen_combination,
    gen_design,
    make_case,
    power_sweep,
    rho_error_curve,
    run_case,
)

__all__ = [
    "BootstrapConfig",
    "BootstrapDraws",
    "ConfidenceRegion",
    "CvGrid",
    "CvReport",
    "DataError",
    "DebiasedThresholdRidge",
    "EmpiricalCdf",
    "Hyperparams",
    "ImprovedFit",
    "ModelFrame",
    "NumericalError",
    "PredictionRegion",
    "RidgebootError",
    "SimCase",
    "SimReport",
    "StreamSpec",
    "TestResult",
    "ThinSvd",
    "build_frame",
    "cdf_from_raw_residuals",
    "complement_project",
    "confidence_region",
    "cross_validate",
    "debias",
    "default_grids",
    "ecdf",
    "expansion_check",
    "fold_assignment",
    "gen_beta",
    "gen_combination",
    "gen_design",
    "h_oracle",
    "hybrid_replicate",
    "hypothesis_test",
    "improved_fit",
    "k_diagnostics",
    "laplace",
    "laplace_inverse_cdf",
    "loo_residuals",
    "make_case",
    "normal",
    "power_sweep",
    "predict_point",
    "prediction_region",
    "resample_indices",
    "rho_error_curve",
    "ridge_bias_sd_bound",
    "ridge_estimate",
    "ridge_weights",
    "row_space_params",
    "run_case",
    "sample_quantile",
    "tau_for_selection",
    "thin_svd",
    "threshold_select",
    "wild_replicate",
]
