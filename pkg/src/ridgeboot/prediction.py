"""Hybrid bootstrap prediction regions for future responses y_f = X_f beta + eps_f.

Future noise is resampled from the empirical CDF of the centered fitted
residuals (capturing the unknown error law, e.g. heavy tails), while
estimation error is regenerated with the same Gaussian wild scheme as the
confidence-region bootstrap.  One replicate:

    eps*   ~ N(0, sigma2_hat)^n      -> theta* rebuilt as in the wild bootstrap
    eps*_f ~ ECDF of centered residuals (p1 i.i.d. draws)
    E*_b   = max_i |X_f theta_hat + eps*_f - X_f theta*|_i

and the region is {y_f : max_i |y_{f,i} - (X_f theta_hat)_i| <= C*} with C*
the 1-alpha sample quantile of the E*_b.

Within a replicate the stream is consumed in a fixed order: the n wild
errors first, then the p1 resampling indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .bootstrap import BootstrapConfig, BootstrapDraws, _ReplicateEngine, sample_quantile
from .errors import DataError
from .estimator import ImprovedFit, Hyperparams, improved_fit
from .model import ModelFrame, _check_matrix, build_frame
from .parallel import map_indexed


@dataclass(frozen=True)
class EmpiricalCdf:
    """Centered residuals, sorted ascending; F(x) = (1/n) #{values <= x}."""

    values: np.ndarray

    def evaluate(self, x: float) -> float:
        return float(np.searchsorted(self.values, x, side="right")) / self.values.size

    def draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        return self.values[rng.resample_indices(gen, self.values.size, count)]


@dataclass(frozen=True)
class PredictionRegion:
    """Sup-norm band {y_f : max_i |y_{f,i} - center_i| <= radius}."""

    center: np.ndarray
    radius: float
    level: float

    def contains(self, y_f: np.ndarray) -> bool:
        y_f = np.asarray(y_f, dtype=float).reshape(-1)
        if y_f.shape[0] != self.center.shape[0]:
            raise DataError(
                f"y_f: expected length {self.center.shape[0]}, found {y_f.shape[0]}"
            )
        return bool(np.max(np.abs(y_f - self.center)) <= self.radius)


def ecdf(fit: ImprovedFit) -> EmpiricalCdf:
    """Empirical CDF of the centered residuals of a fit."""
    return EmpiricalCdf(values=np.sort(fit.residuals_centered))


def cdf_from_raw_residuals(raw: np.ndarray) -> EmpiricalCdf:
    """Center arbitrary raw residuals (e.g. leave-one-out) and sort them."""
    raw = np.asarray(raw, dtype=float).reshape(-1)
    return EmpiricalCdf(values=np.sort(raw - raw.mean()))


def loo_residuals(frame: ModelFrame, hyper: Hyperparams) -> np.ndarray:
    """Leave-one-out predictive residuals (n refits, each with its own SVD)."""
    n = frame.n
    out = np.empty(n)
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        mask[i] = False
        sub = build_frame(
            frame.design[mask],
            frame.response[mask],
            frame.combination,
            frame.svd.rank_tolerance,
        )
        sub_fit = improved_fit(sub, hyper)
        out[i] = frame.response[i] - frame.design[i] @ sub_fit.theta_hat
        mask[i] = True
    return out


def predict_point(fit: ImprovedFit, x_f: np.ndarray) -> np.ndarray:
    """Point prediction X_f theta_hat."""
    x_f = _check_matrix(x_f, "x_f")
    if x_f.shape[1] != fit.theta_hat.shape[0]:
        raise DataError(
            f"x_f: expected {fit.theta_hat.shape[0]} columns, found {x_f.shape[1]}"
        )
    return x_f @ fit.theta_hat


def hybrid_replicate(
    frame: ModelFrame,
    fit: ImprovedFit,
    x_f: np.ndarray,
    cdf: EmpiricalCdf,
    gen: np.random.Generator,
) -> float:
    """One hybrid-bootstrap max statistic (single-replicate form)."""
    return _hybrid_stat(_ReplicateEngine(frame, fit), _check_matrix(x_f, "x_f"), cdf, gen)


def _hybrid_stat(
    engine: _ReplicateEngine,
    x_f: np.ndarray,
    cdf: EmpiricalCdf,
    gen: np.random.Generator,
) -> float:
    theta_deb, selected = engine.replicate_theta(gen)
    theta_star = np.zeros(engine.frame.p)
    theta_star[selected] = theta_deb[selected]
    eps_f = cdf.draw(gen, x_f.shape[0])
    return float(np.max(np.abs(x_f @ (engine.fit.theta_hat - theta_star) + eps_f)))


def prediction_region(
    frame: ModelFrame,
    fit: ImprovedFit,
    x_f: np.ndarray,
    cfg: BootstrapConfig,
    threads: int = 1,
    residual_cdf: EmpiricalCdf | None = None,
) -> tuple[PredictionRegion, BootstrapDraws]:
    """Simultaneous 1-alpha prediction region for the future responses.

    ``residual_cdf`` overrides the fitted-residual ECDF, e.g. with
    leave-one-out residuals from :func:`loo_residuals`.
    """
    x_f = _check_matrix(x_f, "x_f")
    if x_f.shape[1] != frame.p:
        raise DataError(f"x_f: expected {frame.p} columns, found {x_f.shape[1]}")
    cdf = residual_cdf if residual_cdf is not None else ecdf(fit)
    engine = _ReplicateEngine(frame, fit)

    def one(b: int) -> float:
        return _hybrid_stat(engine, x_f, cdf, cfg.stream.child(b).generator())

    stats = np.array(map_indexed(one, cfg.replicates, threads))
    quantile = sample_quantile(stats, 1.0 - cfg.alpha)
    region = PredictionRegion(
        center=x_f @ fit.theta_hat,
        radius=quantile,
        level=1.0 - cfg.alpha,
    )
    return region, BootstrapDraws(stats=stats, quantile=quantile)
