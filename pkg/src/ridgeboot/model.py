"""Fixed-design linear model data: thin SVD, rank, and derived projections.

The model is y = X beta + eps with X an n x p fixed design.  Everything
downstream consumes the thin SVD X = P diag(lambda) Q^T, computed once per
frame and cached.  beta splits into the row-space component
theta = Q Q^T beta (identifiable from X) and its null-space complement
theta_perp = beta - theta; X theta = X beta always.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError, NumericalError

DEFAULT_RANK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ThinSvd:
    """Thin SVD X = P diag(singular) Q^T keeping the r values above cutoff.

    left is n x r with orthonormal columns, right is p x r with orthonormal
    columns, singular is descending and strictly positive.
    """

    left: np.ndarray
    singular: np.ndarray
    right: np.ndarray
    rank: int
    rank_tolerance: float


@dataclass(frozen=True)
class Hyperparams:
    """Ridge penalty rho >= 0 and hard-threshold level b >= 0."""

    rho: float
    threshold: float

    def __post_init__(self) -> None:
        for name, value in (("rho", self.rho), ("threshold", self.threshold)):
            if not np.isfinite(value) or value < 0:
                raise DataError(f"Hyperparams: {name} must be finite and >= 0, got {value}")


@dataclass(frozen=True)
class ModelFrame:
    """Design, response, combination matrix M (p1 x p) and the cached SVD.

    Immutable; share freely across threads.  Use :meth:`with_response` to
    reuse the cached SVD with a new response vector.
    """

    design: np.ndarray
    response: np.ndarray
    combination: np.ndarray
    svd: ThinSvd

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def p(self) -> int:
        return self.design.shape[1]

    @property
    def p1(self) -> int:
        return self.combination.shape[0]

    def with_response(self, y: np.ndarray) -> "ModelFrame":
        y = _check_vector(y, self.n, "response")
        return replace(self, response=y)


def _check_matrix(x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise DataError(f"{name}: expected a 2-d matrix with n, p >= 1, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DataError(f"{name}: entries must all be finite")
    return x


def _check_vector(v: np.ndarray, length: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != length:
        raise DataError(f"{name}: expected length {length}, found {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise DataError(f"{name}: entries must all be finite")
    return v


def thin_svd(design: np.ndarray, rank_tolerance: float = DEFAULT_RANK_TOLERANCE) -> ThinSvd:
    """Thin SVD with numerical rank r = #{lambda_k > rank_tolerance * lambda_1}."""
    design = _check_matrix(design, "design")
    if not 0 < rank_tolerance < 1:
        raise DataError(f"rank_tolerance must lie in (0, 1), got {rank_tolerance}")
    try:
        left, singular, right_t = np.linalg.svd(design, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    if singular[0] <= 0:
        raise NumericalError("design has rank zero (all singular values are 0)")
    rank = int(np.count_nonzero(singular > rank_tolerance * singular[0]))
    if rank == 0:
        raise NumericalError("design has numerical rank zero at the given tolerance")
    return ThinSvd(
        left=left[:, :rank],
        singular=singular[:rank],
        right=right_t[:rank].T,
        rank=rank,
        rank_tolerance=rank_tolerance,
    )


def build_frame(
    x: np.ndarray,
    y: np.ndarray,
    m: np.ndarray | None = None,
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
) -> ModelFrame:
    """Validate dimensions, compute the SVD once, and assemble a frame.

    m defaults to the identity, i.e. gamma = theta itself.
    """
    x = _check_matrix(x, "design")
    y = _check_vector(y, x.shape[0], "response")
    if m is None:
        m = np.eye(x.shape[1])
    else:
        m = _check_matrix(m, "combination")
        if m.shape[1] != x.shape[1]:
            raise DataError(
                f"combination: expected {x.shape[1]} columns to match the design, "
                f"found {m.shape[1]}"
            )
    return ModelFrame(design=x, response=y, combination=m, svd=thin_svd(x, rank_tolerance))


def complement_project(svd: ThinSvd, v: np.ndarray) -> np.ndarray:
    """Null-space component (I - Q Q^T) v; exactly zero when r = p."""
    p = svd.right.shape[0]
    v = _check_vector(v, p, "vector")
    if svd.rank == p:
        return np.zeros(p)
    return v - svd.right @ (svd.right.T @ v)


def row_space_params(svd: ThinSvd, beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates zeta = Q^T beta and row-space component theta = Q zeta.

    When r = p the projection Q Q^T is the identity, so theta is returned as
    beta itself rather than through the (lossy) round trip.
    """
    beta = _check_vector(beta, svd.right.shape[0], "beta")
    zeta = svd.right.T @ beta
    if svd.rank == svd.right.shape[0]:
        return zeta, beta.copy()
    theta = svd.right @ zeta
    return zeta, theta


def ridge_bias_sd_bound(
    svd: ThinSvd,
    rho: float,
    a: np.ndarray,
    beta_norm: float,
    err_var: float,
) -> tuple[float, float]:
    """Worst-case bias and sd of the plain ridge functional a^T theta_star.

    bias <= rho * ||a|| * beta_norm / (lambda_r^2 + rho) and
    sd <= sqrt(err_var) * ||a|| / lambda_r, a quick diagnostic for how much
    shrinkage a given penalty can cost.
    """
    a = _check_vector(a, svd.right.shape[0], "a")
    if rho < 0:
        raise DataError(f"rho must be >= 0, got {rho}")
    if err_var < 0:
        raise DataError(f"err_var must be >= 0, got {err_var}")
    a_norm = float(np.linalg.norm(a))
    lam_r = float(svd.singular[-1])
    bias_bound = rho * a_norm * beta_norm / (lam_r**2 + rho)
    sd_bound = float(np.sqrt(err_var)) * a_norm / lam_r
    return bias_bound, sd_bound
