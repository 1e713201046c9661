"""scikit-learn style wrapper around the functional pipeline.

``DebiasedThresholdRidge`` is a drop-in regressor (``fit`` / ``predict`` /
``get_params``) whose fitted state exposes the full estimator bundle, with
methods for the bootstrap confidence region, hypothesis test, and
prediction region.  The model is intercept-free by design; center or
augment the inputs if an intercept is wanted.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .bootstrap import (
    BootstrapConfig,
    ConfidenceRegion,
    TestResult,
    confidence_region,
    hypothesis_test,
)
from .estimator import improved_fit
from .model import DEFAULT_RANK_TOLERANCE, Hyperparams, build_frame
from .prediction import PredictionRegion, prediction_region
from .rng import StreamSpec


class DebiasedThresholdRidge(BaseEstimator, RegressorMixin):
    """Debiased, hard-thresholded ridge regression with bootstrap inference.

    Parameters
    ----------
    rho : float
        Ridge penalty (>= 0; 0 only for full-rank designs).
    threshold : float
        Hard-threshold level applied to the debiased coefficients.
    combination : array-like of shape (p1, p), optional
        Matrix M defining the inferential targets gamma = M theta;
        defaults to the identity.
    alpha : float
        Miss level of the bootstrap regions (default 0.05).
    replicates : int
        Bootstrap replicates B (default 500).
    seed : int
        Master seed for the bootstrap streams.
    threads : int
        Worker threads; results are thread-count independent.
    rank_tolerance : float
        Relative singular-value cutoff for the numerical rank.
    """

    def __init__(
        self,
        rho: float = 1.0,
        threshold: float = 0.0,
        combination: np.ndarray | None = None,
        alpha: float = 0.05,
        replicates: int = 500,
        seed: int = 0,
        threads: int = 1,
        rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
    ):
        self.rho = rho
        self.threshold = threshold
        self.combination = combination
        self.alpha = alpha
        self.replicates = replicates
        self.seed = seed
        self.threads = threads
        self.rank_tolerance = rank_tolerance

    def fit(self, X: np.ndarray, y: np.ndarray) -> "DebiasedThresholdRidge":
        X, y = check_X_y(X, y, y_numeric=True)
        self.frame_ = build_frame(X, y, self.combination, self.rank_tolerance)
        self.fit_ = improved_fit(self.frame_, Hyperparams(self.rho, self.threshold))
        self.coef_ = self.fit_.theta_hat
        self.selected_ = self.fit_.selected
        self.sigma2_ = self.fit_.sigma2_hat
        self.gamma_ = self.fit_.gamma_hat
        self.tau_ = self.fit_.tau_hat
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return X @ self.coef_

    def _config(self) -> BootstrapConfig:
        return BootstrapConfig(self.replicates, self.alpha, StreamSpec(self.seed))

    def confidence_region(self) -> ConfidenceRegion:
        """Simultaneous 1-alpha region for gamma = M theta."""
        check_is_fitted(self, "fit_")
        region, _ = confidence_region(self.frame_, self.fit_, self._config(), self.threads)
        return region

    def hypothesis_test(self, gamma0: np.ndarray) -> TestResult:
        """Wild-bootstrap test of gamma = gamma0 at level alpha."""
        check_is_fitted(self, "fit_")
        return hypothesis_test(
            self.frame_, self.fit_, gamma0, self._config(), threads=self.threads
        )

    def prediction_region(self, X_future: np.ndarray) -> PredictionRegion:
        """Simultaneous 1-alpha prediction region for future responses."""
        check_is_fitted(self, "fit_")
        X_future = check_array(X_future)
        region, _ = prediction_region(
            self.frame_, self.fit_, X_future, self._config(), self.threads
        )
        return region
