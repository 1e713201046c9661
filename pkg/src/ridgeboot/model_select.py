"""k-fold cross-validation over a (rho, threshold) grid.

Folds are contiguous blocks of one seeded permutation, so the partition is
deterministic given the seed and every sample is held out exactly once.
Each grid pair refits the full debias+threshold pipeline on the training
folds and scores mean squared prediction error on the held-out fold; fold
means are averaged and the minimizer wins, ties broken by smaller rho then
smaller threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .estimator import debias, ridge_estimate, threshold_select
from .model import Hyperparams, ModelFrame, build_frame
from .parallel import map_indexed
from .rng import StreamSpec


@dataclass(frozen=True)
class CvGrid:
    """Candidate rho values (> 0), threshold values (>= 0), fold count, seed."""

    rhos: np.ndarray
    thresholds: np.ndarray
    folds: int = 5
    stream: StreamSpec = field(default_factory=lambda: StreamSpec(0))

    def __post_init__(self) -> None:
        rhos = np.asarray(self.rhos, dtype=float).reshape(-1)
        thresholds = np.asarray(self.thresholds, dtype=float).reshape(-1)
        object.__setattr__(self, "rhos", rhos)
        object.__setattr__(self, "thresholds", thresholds)
        if rhos.size == 0 or thresholds.size == 0:
            raise DataError("CvGrid: both grids must be nonempty")
        if np.any(rhos <= 0) or np.any(thresholds < 0):
            raise DataError("CvGrid: rho candidates must be > 0, thresholds >= 0")
        if self.folds < 2:
            raise DataError(f"CvGrid: folds must be >= 2, got {self.folds}")


@dataclass(frozen=True)
class CvReport:
    """Mean held-out squared error per grid pair, and the chosen pair.

    rows align: errors[i] belongs to (rho_grid[i], threshold_grid[i]).
    """

    rho_grid: np.ndarray
    threshold_grid: np.ndarray
    errors: np.ndarray
    chosen: Hyperparams
    seed: StreamSpec


def fold_assignment(n: int, folds: int, stream: StreamSpec) -> list[np.ndarray]:
    """Contiguous blocks of a seeded permutation; sizes differ by at most 1."""
    if folds > n:
        raise DataError(f"folds = {folds} exceeds the sample count n = {n}")
    perm = stream.generator().permutation(n)
    return np.array_split(perm, folds)


def cross_validate(frame: ModelFrame, grid: CvGrid, threads: int = 1) -> CvReport:
    """Pick (rho, threshold) minimizing mean held-out prediction MSE."""
    n = frame.n
    assignment = fold_assignment(n, grid.folds, grid.stream)
    if min(block.size for block in assignment) < 1:
        raise DataError("cross_validate: a fold would be empty")

    pairs = [(float(r), float(b)) for r in grid.rhos for b in grid.thresholds]
    fold_errors = np.zeros((len(assignment), len(pairs)))

    def score_fold(f: int) -> np.ndarray:
        test_idx = assignment[f]
        train_mask = np.ones(n, dtype=bool)
        train_mask[test_idx] = False
        # One SVD per fold, shared by every grid pair.
        train = build_frame(
            frame.design[train_mask],
            frame.response[train_mask],
            frame.combination,
            frame.svd.rank_tolerance,
        )
        x_test = frame.design[test_idx]
        y_test = frame.response[test_idx]
        out = np.empty(len(pairs))
        for idx, (rho, b) in enumerate(pairs):
            theta_tilde = debias(train, ridge_estimate(train, rho), rho)
            selected = threshold_select(theta_tilde, b)
            pred = x_test[:, selected] @ theta_tilde[selected] if selected.size else 0.0
            out[idx] = float(np.mean((y_test - pred) ** 2))
        return out

    for f, row in enumerate(map_indexed(score_fold, len(assignment), threads)):
        fold_errors[f] = row

    mean_errors = fold_errors.mean(axis=0)
    order = sorted(range(len(pairs)), key=lambda i: (mean_errors[i], pairs[i][0], pairs[i][1]))
    best = order[0]
    return CvReport(
        rho_grid=np.array([r for r, _ in pairs]),
        threshold_grid=np.array([b for _, b in pairs]),
        errors=mean_errors,
        chosen=Hyperparams(rho=pairs[best][0], threshold=pairs[best][1]),
        seed=grid.stream,
    )


def default_grids(frame: ModelFrame) -> tuple[np.ndarray, np.ndarray]:
    """Default search grids: log-spaced rho in [1e-3, n], linear thresholds.

    The threshold range is [0, 2 * median|theta_tilde|] with theta_tilde the
    debiased estimate at the geometric median of the rho grid.
    """
    rhos = np.geomspace(1e-3, frame.n, 20)
    pilot_rho = float(np.sqrt(rhos[0] * rhos[-1]))
    theta_tilde = debias(frame, ridge_estimate(frame, pilot_rho), pilot_rho)
    top = 2.0 * float(np.median(np.abs(theta_tilde)))
    thresholds = np.linspace(0.0, top, 20)
    return rhos, thresholds
