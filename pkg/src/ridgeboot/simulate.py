"""Monte-Carlo study harness: data generators, the six study cases, and
coverage / misspecification / power experiments.

Each case fixes one design X (rows i.i.d. N(0, Sigma) with Sigma = 1.5 I
+ 0.5 * 11^T, i.e. diagonal 2.0 and off-diagonal 0.5) and one combination
matrix M (block recipe below), then replicates fresh noise around the fixed
mean X beta.  Coverage and error metrics are recorded against both targets
gamma = M theta and gamma = M beta: the response draws are identical since
X beta = X theta, so one pass serves both, and the two targets only differ
when p > n.

M recipe (tau = tau_split): rows are unit-style Gaussian rows rescaled per
block.  Tall designs (p < n): upper-left block (rows <= m_count, first tau
columns) rescaled to row norm 2.0 from N(0.5, 1) entries; right block from
N(1, 4) entries, row norm 4.0 for rows <= m_count and 6.0 below; lower-left
block zero.  Wide designs (p > n): upper-left as above, right block row
norm 1.0 for every row.

Desk-scale cases shrink the full-scale study (case table below) while
preserving the p < n vs p > n regimes; full scale sits behind scale="full".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bootstrap import BootstrapConfig, confidence_region
from .errors import DataError
from .estimator import Hyperparams, debias, improved_fit, k_diagnostics, ridge_estimate, threshold_select
from .model import ModelFrame, build_frame, row_space_params
from .model_select import CvGrid, cross_validate, default_grids
from .parallel import map_indexed
from .prediction import prediction_region
from .rng import StreamSpec, laplace, normal

NORMAL_SD = 2.0
LAPLACE_SCALE = math.sqrt(2.0)  # variance 2 * scale^2 = 4, matching the normal law

# Stream path tags; replicate-level children append the replication index.
_TAG_DESIGN = 1
_TAG_COMBINATION = 2
_TAG_NOISE = 3
_TAG_WILD = 4
_TAG_HYBRID = 5
_TAG_FUTURE = 6
_TAG_CV = 7
_TAG_CURVE = 8


def gen_design(gen: np.random.Generator, n: int, p: int) -> np.ndarray:
    """n rows i.i.d. N(0, Sigma), Sigma = 1.5 I + 0.5 * 11^T.

    Uses the closed-form square root sqrt(Sigma) = sqrt(1.5) I + c 11^T with
    c = (sqrt(1.5 + 0.5 p) - sqrt(1.5)) / p, so no p x p factorization.
    """
    if n < 1 or p < 1:
        raise DataError(f"gen_design: n, p must be >= 1, got {n}, {p}")
    z = gen.standard_normal((n, p))
    c = (math.sqrt(1.5 + 0.5 * p) - math.sqrt(1.5)) / p
    return math.sqrt(1.5) * z + c * z.sum(axis=1, keepdims=True)


def gen_combination(
    gen: np.random.Generator,
    p: int,
    p1: int,
    m_count: int,
    tau_split: int,
    wide: bool,
) -> np.ndarray:
    """Block combination matrix M (p1 x p); see the module docstring.

    Draw order is fixed: the upper-left block first, then the full-height
    right block, so a given stream always yields the same matrix.
    """
    if not 1 <= m_count <= p1:
        raise DataError(f"gen_combination: need 1 <= m_count <= p1, got {m_count}, {p1}")
    if not 1 <= tau_split < p:
        raise DataError(f"gen_combination: need 1 <= tau_split < p, got {tau_split}, {p}")
    m = np.zeros((p1, p))
    head = gen.normal(0.5, 1.0, size=(m_count, tau_split))
    m[:m_count, :tau_split] = 2.0 * head / np.linalg.norm(head, axis=1, keepdims=True)
    tail = gen.normal(1.0, 2.0, size=(p1, p - tau_split))
    tail /= np.linalg.norm(tail, axis=1, keepdims=True)
    if wide:
        m[:, tau_split:] = tail
    else:
        m[:m_count, tau_split:] = 4.0 * tail[:m_count]
        m[m_count:, tau_split:] = 6.0 * tail[m_count:]
    return m


def gen_beta(pattern: str, p: int) -> np.ndarray:
    """Coefficient patterns of the study.

    "tall" (p < n study, needs p >= 16): three +2, three -2, three +1,
    three -1, four 0.01, zeros after.  "wide" (p > n study, needs p >= 6):
    three +1, three -1, zeros after.
    """
    beta = np.zeros(p)
    if pattern == "tall":
        if p < 16:
            raise DataError(f"gen_beta: tall pattern needs p >= 16, got {p}")
        beta[0:3] = 2.0
        beta[3:6] = -2.0
        beta[6:9] = 1.0
        beta[9:12] = -1.0
        beta[12:16] = 0.01
    elif pattern == "wide":
        if p < 6:
            raise DataError(f"gen_beta: wide pattern needs p >= 6, got {p}")
        beta[0:3] = 1.0
        beta[3:6] = -1.0
    else:
        raise DataError(f"gen_beta: unknown pattern {pattern!r}")
    return beta


@dataclass(frozen=True)
class SimCase:
    """Generator and protocol parameters for one study case."""

    case_id: int
    n: int
    p: int
    p1: int
    m_count: int
    tau_split: int
    errors: str  # "normal" (sd 2) or "laplace" (scale sqrt(2)); variance 4 both
    beta_pattern: str
    hyper: Hyperparams | None  # None selects by pilot-run cross-validation
    reps: int
    replicates: int
    seed: int
    alpha: float = 0.05
    xf_rows: int = 10
    noise_scale: float = 1.0  # 0 gives the degenerate noiseless variant

    def __post_init__(self) -> None:
        if self.errors not in ("normal", "laplace"):
            raise DataError(f"SimCase: unknown error law {self.errors!r}")
        if min(self.n, self.p, self.p1, self.m_count, self.reps, self.replicates) < 1:
            raise DataError("SimCase: dimensions and counts must be positive")
        if not 1 <= self.xf_rows <= self.p1:
            raise DataError(f"SimCase: xf_rows must lie in [1, p1], got {self.xf_rows}")


@dataclass(frozen=True)
class SimReport:
    """Aggregated study metrics; rates are Monte-Carlo proportions in [0, 1].

    The _theta/_beta suffix names the target the metric was computed
    against; the pair coincides when p <= n (then theta = beta).
    """

    case_id: int
    target: str
    hyper: Hyperparams
    reps: int
    replicates: int
    seed: int
    lambda_r: float
    k1: float
    k2_beta: float
    k2_theta: float
    k3: float
    k4: float
    misspec_rate: float
    gamma_err_theta: float
    gamma_err_beta: float
    sigma2_err: float
    coverage_theta: float
    coverage_beta: float
    pred_coverage_theta: float
    pred_coverage_beta: float

    def mc_se(self, rate: float) -> float:
        return float(np.sqrt(rate * (1.0 - rate) / self.reps))

    def headline(self) -> dict[str, float]:
        """Metrics against the requested target."""
        theta = self.target == "theta"
        return {
            "misspecification_rate": self.misspec_rate,
            "gamma_max_error_mean": self.gamma_err_theta if theta else self.gamma_err_beta,
            "sigma2_error_mean": self.sigma2_err,
            "confidence_coverage": self.coverage_theta if theta else self.coverage_beta,
            "prediction_coverage": self.pred_coverage_theta if theta else self.pred_coverage_beta,
        }


# Case table: full scale mirrors the study, desk scale shrinks it.  Desk
# hyperparameters are pinned from a one-time pilot calibration (signal-gap
# midpoint after cross-validation); full scale defaults to pilot CV.
_FULL_PARAMS = {
    1: dict(n=1000, p=500, p1=800, m_count=300, tau_split=50, errors="normal", beta_pattern="tall"),
    2: dict(n=1000, p=500, p1=800, m_count=300, tau_split=50, errors="laplace", beta_pattern="tall"),
    3: dict(n=1000, p=650, p1=800, m_count=300, tau_split=50, errors="laplace", beta_pattern="tall"),
    4: dict(n=1000, p=500, p1=800, m_count=700, tau_split=50, errors="laplace", beta_pattern="tall"),
    5: dict(n=1000, p=1500, p1=800, m_count=300, tau_split=6, errors="normal", beta_pattern="wide"),
    6: dict(n=1000, p=1500, p1=800, m_count=300, tau_split=6, errors="laplace", beta_pattern="wide"),
}

_DESK_PARAMS = {
    1: dict(n=300, p=100, p1=160, m_count=60, tau_split=50, errors="normal", beta_pattern="tall",
            hyper=Hyperparams(rho=10.0, threshold=0.55)),
    2: dict(n=300, p=100, p1=160, m_count=60, tau_split=50, errors="laplace", beta_pattern="tall",
            hyper=Hyperparams(rho=10.0, threshold=0.55)),
    3: dict(n=300, p=150, p1=160, m_count=60, tau_split=50, errors="laplace", beta_pattern="tall",
            hyper=Hyperparams(rho=10.0, threshold=0.55)),
    4: dict(n=300, p=100, p1=160, m_count=140, tau_split=50, errors="laplace", beta_pattern="tall",
            hyper=Hyperparams(rho=10.0, threshold=0.55)),
    # The p > n pair keeps the full-scale floor-row proportion (rows of M with
    # no weight on the active block) and scales the noise so the selection
    # regime matches the large-sample study; see the study notes in README.
    5: dict(n=200, p=300, p1=80, m_count=30, tau_split=6, errors="normal", beta_pattern="wide",
            noise_scale=0.38, hyper=Hyperparams(rho=2.0, threshold=0.30)),
    6: dict(n=200, p=300, p1=80, m_count=30, tau_split=6, errors="laplace", beta_pattern="wide",
            noise_scale=0.38, hyper=Hyperparams(rho=2.0, threshold=0.30)),
}

DEFAULT_SEED = 20260825


def make_case(
    case_id: int,
    scale: str = "desk",
    reps: int | None = None,
    replicates: int | None = None,
    seed: int = DEFAULT_SEED,
    hyper: Hyperparams | None = None,
    use_cv: bool = False,
) -> SimCase:
    """Assemble a study case; explicit hyper or use_cv override the pins."""
    if case_id not in _DESK_PARAMS:
        raise DataError(f"make_case: case must be 1..6, got {case_id}")
    if scale == "desk":
        params = dict(_DESK_PARAMS[case_id])
        defaults = dict(reps=300, replicates=200, xf_rows=10)
    elif scale == "full":
        params = dict(_FULL_PARAMS[case_id], hyper=None)
        defaults = dict(reps=1000, replicates=500, xf_rows=100)
    else:
        raise DataError(f"make_case: scale must be 'desk' or 'full', got {scale!r}")
    if use_cv:
        params["hyper"] = None
    if hyper is not None:
        params["hyper"] = hyper
    return SimCase(
        case_id=case_id,
        reps=reps if reps is not None else defaults["reps"],
        replicates=replicates if replicates is not None else defaults["replicates"],
        seed=seed,
        xf_rows=defaults["xf_rows"],
        **params,
    )


def _draw_noise(case: SimCase, gen: np.random.Generator, count: int) -> np.ndarray:
    sd = case.noise_scale
    if sd == 0:
        return np.zeros(count)
    if case.errors == "normal":
        return normal(gen, 0.0, NORMAL_SD * sd, count)
    return laplace(gen, LAPLACE_SCALE * sd, count)


@dataclass(frozen=True)
class _CaseData:
    """Fixed per-case objects shared by every replication."""

    frame: ModelFrame
    beta: np.ndarray
    theta: np.ndarray
    gamma_theta: np.ndarray
    gamma_beta: np.ndarray
    mean_response: np.ndarray
    hyper: Hyperparams
    true_selected: np.ndarray
    x_f: np.ndarray
    yf_mean_theta: np.ndarray
    yf_mean_beta: np.ndarray


def _prepare_case(case: SimCase) -> _CaseData:
    spec = StreamSpec(case.seed)
    x = gen_design(spec.child(_TAG_DESIGN).generator(), case.n, case.p)
    m = gen_combination(
        spec.child(_TAG_COMBINATION).generator(),
        case.p,
        case.p1,
        case.m_count,
        case.tau_split,
        wide=case.p > case.n,
    )
    beta = gen_beta(case.beta_pattern, case.p)
    frame = build_frame(x, np.zeros(case.n), m)
    _, theta = row_space_params(frame.svd, beta)
    hyper = case.hyper
    if hyper is None:
        pilot_y = x @ beta + _draw_noise(case, spec.child(_TAG_CV, 0).generator(), case.n)
        pilot = frame.with_response(pilot_y)
        rhos, thresholds = default_grids(pilot)
        grid = CvGrid(rhos=rhos, thresholds=thresholds, folds=5, stream=spec.child(_TAG_CV, 1))
        hyper = cross_validate(pilot, grid).chosen
    x_f = m[: case.xf_rows]
    return _CaseData(
        frame=frame,
        beta=beta,
        theta=theta,
        gamma_theta=m @ theta,
        gamma_beta=m @ beta,
        mean_response=x @ beta,
        hyper=hyper,
        true_selected=threshold_select(theta, hyper.threshold),
        x_f=x_f,
        yf_mean_theta=x_f @ theta,
        yf_mean_beta=x_f @ beta,
    )


def run_case(case: SimCase, target: str = "theta", threads: int = 1) -> SimReport:
    """Replicate the case and aggregate coverage / error metrics.

    Each replication draws fresh noise, refits, runs both bootstrap schemes
    (wild for the confidence region, hybrid for the prediction region), and
    checks region membership of the true targets plus a fresh future draw.
    """
    if target not in ("theta", "beta"):
        raise DataError(f"run_case: target must be 'theta' or 'beta', got {target!r}")
    data = _prepare_case(case)
    spec = StreamSpec(case.seed)
    sigma2_true = 4.0 * case.noise_scale**2

    def one(r: int) -> np.ndarray:
        eps = _draw_noise(case, spec.child(_TAG_NOISE, r).generator(), case.n)
        frame = data.frame.with_response(data.mean_response + eps)
        fit = improved_fit(frame, data.hyper)
        region, _ = confidence_region(
            frame, fit, BootstrapConfig(case.replicates, case.alpha, spec.child(_TAG_WILD, r))
        )
        pregion, _ = prediction_region(
            frame, fit, data.x_f,
            BootstrapConfig(case.replicates, case.alpha, spec.child(_TAG_HYBRID, r)),
        )
        eps_f = _draw_noise(case, spec.child(_TAG_FUTURE, r).generator(), case.xf_rows)
        return np.array([
            float(not np.array_equal(fit.selected, data.true_selected)),
            np.max(np.abs(fit.gamma_hat - data.gamma_theta)),
            np.max(np.abs(fit.gamma_hat - data.gamma_beta)),
            abs(fit.sigma2_hat - sigma2_true),
            float(region.contains(data.gamma_theta)),
            float(region.contains(data.gamma_beta)),
            float(pregion.contains(data.yf_mean_theta + eps_f)),
            float(pregion.contains(data.yf_mean_beta + eps_f)),
        ])

    rows = np.vstack(map_indexed(one, case.reps, threads))
    means = rows.mean(axis=0)
    k1, k2_beta, k3, k4 = k_diagnostics(data.frame, data.beta, data.hyper)
    # Under the y = X theta + eps reading the true parameter is theta itself,
    # whose null-space component vanishes; only K2 changes.
    _, k2_theta, _, _ = k_diagnostics(data.frame, data.theta, data.hyper)
    return SimReport(
        case_id=case.case_id,
        target=target,
        hyper=data.hyper,
        reps=case.reps,
        replicates=case.replicates,
        seed=case.seed,
        lambda_r=float(data.frame.svd.singular[-1]),
        k1=k1,
        k2_beta=k2_beta,
        k2_theta=k2_theta,
        k3=k3,
        k4=k4,
        misspec_rate=float(means[0]),
        gamma_err_theta=float(means[1]),
        gamma_err_beta=float(means[2]),
        sigma2_err=float(means[3]),
        coverage_theta=float(means[4]),
        coverage_beta=float(means[5]),
        pred_coverage_theta=float(means[6]),
        pred_coverage_beta=float(means[7]),
    )


def power_sweep(
    case: SimCase,
    deltas: np.ndarray,
    target: str = "theta",
    threads: int = 1,
) -> np.ndarray:
    """Rejection rate of the test of gamma0 = gamma + delta * 1 per delta.

    Returns a (len(deltas), 2) table [delta, rate].  Within a replication
    the bootstrap draws (and the critical value) are shared across deltas.
    """
    deltas = np.asarray(deltas, dtype=float).reshape(-1)
    if np.any(deltas < 0):
        raise DataError("power_sweep: deltas must be >= 0")
    data = _prepare_case(case)
    gamma = data.gamma_theta if target == "theta" else data.gamma_beta
    spec = StreamSpec(case.seed)

    def one(r: int) -> np.ndarray:
        eps = _draw_noise(case, spec.child(_TAG_NOISE, r).generator(), case.n)
        frame = data.frame.with_response(data.mean_response + eps)
        fit = improved_fit(frame, data.hyper)
        region, _ = confidence_region(
            frame, fit, BootstrapConfig(case.replicates, case.alpha, spec.child(_TAG_WILD, r))
        )
        rejects = np.empty(deltas.size)
        for d, delta in enumerate(deltas):
            stat = np.max(np.abs(fit.gamma_hat - (gamma + delta)) / fit.tau_hat)
            rejects[d] = float(stat > region.radius)
        return rejects

    rates = np.vstack(map_indexed(one, case.reps, threads)).mean(axis=0)
    return np.column_stack([deltas, rates])


def rho_error_curve(
    case: SimCase,
    rhos: np.ndarray,
    reps: int = 50,
    threads: int = 1,
) -> np.ndarray:
    """Estimation error against the ridge penalty, for the ridge variants.

    Per rho, the mean over replications of ||estimate - theta||_2 for the
    plain ridge, debiased, and debiased+thresholded estimators; returns a
    (len(rhos), 4) table [rho, ridge, debiased, improved].
    """
    rhos = np.asarray(rhos, dtype=float).reshape(-1)
    if np.any(rhos <= 0):
        raise DataError("rho_error_curve: rhos must be > 0")
    data = _prepare_case(case)
    spec = StreamSpec(case.seed)
    b = data.hyper.threshold

    def one(r: int) -> np.ndarray:
        eps = _draw_noise(case, spec.child(_TAG_CURVE, r).generator(), case.n)
        frame = data.frame.with_response(data.mean_response + eps)
        out = np.empty((rhos.size, 3))
        for i, rho in enumerate(rhos):
            star = ridge_estimate(frame, rho)
            tilde = debias(frame, star, rho)
            hat = np.where(np.abs(tilde) > b, tilde, 0.0)
            out[i] = [
                np.linalg.norm(star - data.theta),
                np.linalg.norm(tilde - data.theta),
                np.linalg.norm(hat - data.theta),
            ]
        return out

    errs = np.mean(map_indexed(one, reps, threads), axis=0)
    return np.column_stack([rhos, errs])
