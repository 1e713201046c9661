"""Wild bootstrap: simultaneous confidence regions for gamma = M beta and
the level-alpha test of gamma = gamma0.

Each replicate regenerates the response around the fitted mean with
synthetic Gaussian errors,

    y* = X theta_hat + eps*,   eps* ~ N(0, sigma2_hat)^n,

re-runs ridge + debias (adding back theta_perp_hat, the null-space part of
theta_hat) and re-thresholds, then records the normalized max statistic

    E*_b = max_i |gamma*_i - gamma_hat_i| / tau*_i.

The 1-alpha sample quantile C* of the B replicates is the region radius:
{gamma : max_i |gamma_hat_i - gamma_i| / tau_hat_i <= C*}.  The test of
gamma = gamma0 rejects iff the same statistic at gamma0 exceeds C*, so
rejection is equivalent to gamma0 falling outside the region.

Replicate b draws from the stream child (b,), so a run is bit-identical at
any thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import DataError
from .estimator import ImprovedFit, ridge_weights, tau_for_selection
from .model import ModelFrame, ThinSvd, _check_vector
from .parallel import map_indexed
from .rng import StreamSpec


@dataclass(frozen=True)
class BootstrapConfig:
    """Replicate count B, miss level alpha, and the stream the draws come from."""

    replicates: int
    alpha: float
    stream: StreamSpec

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise DataError(f"replicates must be >= 1, got {self.replicates}")
        if not 0 < self.alpha < 1:
            raise DataError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class BootstrapDraws:
    """The B replicate max statistics and their 1-alpha sample quantile."""

    stats: np.ndarray
    quantile: float


@dataclass(frozen=True)
class ConfidenceRegion:
    """Simultaneous region {gamma : max_i |center_i - gamma_i|/scale_i <= radius}."""

    center: np.ndarray
    scale: np.ndarray
    radius: float
    level: float

    def statistic(self, gamma: np.ndarray) -> float:
        gamma = _check_vector(gamma, self.center.shape[0], "gamma")
        return float(np.max(np.abs(self.center - gamma) / self.scale))

    def contains(self, gamma: np.ndarray) -> bool:
        return self.statistic(gamma) <= self.radius


@dataclass(frozen=True)
class TestResult:
    """Max statistic at gamma0 against the bootstrap critical value."""

    statistic: float
    critical: float
    reject: bool
    level: float


def sample_quantile(values: np.ndarray, level: float) -> float:
    """Smallest order statistic whose empirical CDF reaches ``level``.

    Returns X_(i*) with i* = min{i : (1/B) #{j : X_j <= X_(i)} >= level};
    with sorted values this is the first index where the ECDF step function
    crosses the level.
    """
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.size == 0:
        raise DataError("sample_quantile: empty input")
    if not 0 < level < 1:
        raise DataError(f"sample_quantile: level must lie in (0, 1), got {level}")
    ordered = np.sort(values)
    ecdf = np.searchsorted(ordered, ordered, side="right") / ordered.size
    return float(ordered[np.argmax(ecdf >= level)])


class _ReplicateEngine:
    """Shared read-only state for replicate generation, plus a tau* cache.

    The cache keys on the replicate's selection mask; recomputation is
    deterministic, so a hit returns the same bits a fresh computation would.
    Instances serve both the wild replicates here and the hybrid prediction
    replicates.
    """

    def __init__(self, frame: ModelFrame, fit: ImprovedFit):
        self.frame = frame
        self.fit = fit
        svd = frame.svd
        self.rho = fit.hyper.rho
        self.threshold = fit.hyper.threshold
        self.sigma_hat = float(np.sqrt(fit.sigma2_hat))
        self.weights = ridge_weights(svd.singular, self.rho)
        # P^T X theta_hat is replicate-invariant; only P^T eps* varies.
        self.left_t = svd.left.T
        self.right = svd.right
        self.base_coef = self.weights * (self.left_t @ (frame.design @ fit.theta_hat))
        self._tau_cache: dict[bytes, np.ndarray] = {}

    def replicate_theta(self, gen: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Draw eps*, rebuild the debiased-and-thresholded estimate.

        Returns (theta_deb, selected) where theta_deb is the debiased
        replicate estimate including theta_perp_hat; the thresholded
        replicate is theta_deb restricted to selected.
        """
        eps = rng.normal(gen, 0.0, self.sigma_hat, self.frame.n)
        coef = self.base_coef + self.weights * (self.left_t @ eps)
        theta_deb = self.right @ coef + self.fit.theta_perp_hat
        selected = np.flatnonzero(np.abs(theta_deb) > self.threshold)
        return theta_deb, selected

    def gamma_for(self, theta_deb: np.ndarray, selected: np.ndarray) -> np.ndarray:
        if selected.size == 0:
            return np.zeros(self.frame.p1)
        return self.frame.combination[:, selected] @ theta_deb[selected]

    def tau_for(self, selected: np.ndarray) -> np.ndarray:
        key = selected.tobytes()
        cached = self._tau_cache.get(key)
        if cached is None:
            cached = tau_for_selection(self.frame, selected, self.rho)
            self._tau_cache[key] = cached
        return cached

    def wild_stat(self, gen: np.random.Generator) -> float:
        theta_deb, selected = self.replicate_theta(gen)
        gamma_star = self.gamma_for(theta_deb, selected)
        tau_star = self.tau_for(selected)
        return float(np.max(np.abs(gamma_star - self.fit.gamma_hat) / tau_star))


def wild_replicate(frame: ModelFrame, fit: ImprovedFit, gen: np.random.Generator) -> float:
    """One wild-bootstrap max statistic E*_b (single-replicate form)."""
    return _ReplicateEngine(frame, fit).wild_stat(gen)


def bootstrap_draws(
    frame: ModelFrame,
    fit: ImprovedFit,
    cfg: BootstrapConfig,
    threads: int = 1,
) -> BootstrapDraws:
    """All B wild-bootstrap statistics plus their 1-alpha quantile."""
    engine = _ReplicateEngine(frame, fit)

    def one(b: int) -> float:
        return engine.wild_stat(cfg.stream.child(b).generator())

    stats = np.array(map_indexed(one, cfg.replicates, threads))
    return BootstrapDraws(stats=stats, quantile=sample_quantile(stats, 1.0 - cfg.alpha))


def confidence_region(
    frame: ModelFrame,
    fit: ImprovedFit,
    cfg: BootstrapConfig,
    threads: int = 1,
) -> tuple[ConfidenceRegion, BootstrapDraws]:
    """Simultaneous 1-alpha confidence region for gamma = M beta."""
    draws = bootstrap_draws(frame, fit, cfg, threads)
    region = ConfidenceRegion(
        center=fit.gamma_hat,
        scale=fit.tau_hat,
        radius=draws.quantile,
        level=1.0 - cfg.alpha,
    )
    return region, draws


def hypothesis_test(
    frame: ModelFrame,
    fit: ImprovedFit,
    gamma0: np.ndarray,
    cfg: BootstrapConfig,
    draws: BootstrapDraws | None = None,
    threads: int = 1,
) -> TestResult:
    """Test gamma = gamma0; pass ``draws`` to reuse an existing run."""
    gamma0 = _check_vector(gamma0, frame.p1, "gamma0")
    if draws is None:
        draws = bootstrap_draws(frame, fit, cfg, threads)
    statistic = float(np.max(np.abs(fit.gamma_hat - gamma0) / fit.tau_hat))
    return TestResult(
        statistic=statistic,
        critical=draws.quantile,
        reject=statistic > draws.quantile,
        level=cfg.alpha,
    )


def h_oracle(
    svd: ThinSvd,
    c: np.ndarray,
    tau: np.ndarray,
    rho: float,
    sigma: float,
    draws: int,
    gen: np.random.Generator,
) -> np.ndarray:
    """Monte-Carlo draws of the Gaussian max statistic the bootstrap mimics.

    Each draw is max_i (1/tau_i) |sum_k c_ik w_k xi_k| with xi ~ N(0, sigma^2)^r;
    the sorted sample is the empirical counterpart of the limit CDF H(x) and
    serves as the test oracle for the wild bootstrap.
    """
    if draws < 1:
        raise DataError(f"h_oracle: draws must be >= 1, got {draws}")
    if sigma <= 0:
        raise DataError(f"h_oracle: sigma must be > 0, got {sigma}")
    c = np.asarray(c, dtype=float)
    weighted = c * ridge_weights(svd.singular, rho)
    xi = rng.normal(gen, 0.0, sigma, draws * svd.rank).reshape(draws, svd.rank)
    stats = np.max(np.abs(xi @ weighted.T) / np.asarray(tau), axis=1)
    return np.sort(stats)
