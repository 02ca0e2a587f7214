"""Monte Carlo oracle for the classical dephasing model.

Samples zero-mean stationary Gaussian noise trajectories with the exact
autocorrelation kernel, accumulates the relative phase between the spin
eigenstates, and simulates the full measurement/estimation chain.  Everything
is a pure function of (parameters, config, seed): trajectories are drawn in
fixed blocks, each keyed by a spawn of the master seed, so results are
bit-identical regardless of thread count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .estimation import ExperimentConfig, signal_probability
from .noise import ClassicalNoiseParams, DephasingModel, correlation

__all__ = [
    "TrajectoryConfig",
    "TrajectoryEnsemble",
    "EstimationRun",
    "MseResult",
    "CovarianceFactorizationError",
    "EstimatorSaturationWarning",
    "sample_trajectories",
    "ensemble_coherence",
    "invert_probability",
    "simulate_measurements",
    "empirical_mse",
]

# grid must resolve the kernel: step no coarser than correlation_time / 20
MAX_STEP_FRACTION = 1.0 / 20.0

# trajectories are generated in fixed blocks; block j draws from
# Philox(SeedSequence(seed, spawn_key=(j,))), making the ensemble a pure
# function of (params, config) independent of scheduling
_BLOCK = 8192

# diagonal jitter ladder for the ill-conditioned Gaussian kernel
_JITTERS = (0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8)


class CovarianceFactorizationError(RuntimeError):
    """Covariance factorization failed even after jitter escalation."""


class EstimatorSaturationWarning(UserWarning):
    """More than 1% of repetitions hit the arccos clamp."""


@dataclass(frozen=True)
class TrajectoryConfig:
    """Discretization and ensemble size for trajectory sampling."""

    t_max: float
    grid_points: int
    num_trajectories: int
    seed: int

    def __post_init__(self) -> None:
        if self.t_max <= 0:
            raise ValueError("t_max must be > 0")
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")
        if self.num_trajectories < 1:
            raise ValueError("num_trajectories must be >= 1")

    @property
    def step(self) -> float:
        return self.t_max / (self.grid_points - 1)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.grid_points)


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Accumulated relative phases, one per trajectory, plus the config used."""

    phases: np.ndarray
    meta: TrajectoryConfig
    paths: np.ndarray | None = None  # (num_trajectories, grid_points) when kept


def _cholesky_with_jitter(cov: np.ndarray) -> np.ndarray:
    for jitter in _JITTERS:
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
        except np.linalg.LinAlgError:
            continue
    raise CovarianceFactorizationError(
        f"Cholesky failed for a {cov.shape[0]}-point grid with jitter up to "
        f"{_JITTERS[-1]:g}; the grid is too ill-conditioned"
    )


def sample_trajectories(
    params: ClassicalNoiseParams,
    config: TrajectoryConfig,
    *,
    keep_paths: bool = False,
    num_threads: int = 1,
) -> TrajectoryEnsemble:
    """Draw Gaussian noise trajectories and their accumulated phases.

    Each trajectory is a draw of the stationary Gaussian vector with
    covariance C_ij = correlation(t_i, t_j); the accumulated relative phase is
    2*lam * integral of f over [0, t_max] by the trapezoid rule (the factor 2
    is the eigenvalue gap of the dephasing operator).
    """
    if config.step > params.correlation_time * MAX_STEP_FRACTION * (1 + 1e-12):
        raise ValueError(
            f"grid step {config.step:g} exceeds correlation_time/20 = "
            f"{params.correlation_time * MAX_STEP_FRACTION:g}"
        )
    times = config.times
    cov = correlation(times[:, None], times[None, :], params)
    chol = _cholesky_with_jitter(cov)

    weights = np.full(config.grid_points, config.step)
    weights[0] = weights[-1] = config.step / 2.0
    scale = 2.0 * params.coupling

    n = config.num_trajectories
    starts = list(range(0, n, _BLOCK))

    def draw_block(block_index: int, start: int) -> tuple[int, np.ndarray, np.ndarray | None]:
        count = min(_BLOCK, n - start)
        seq = np.random.SeedSequence(config.seed, spawn_key=(block_index,))
        rng = np.random.Generator(np.random.Philox(seq))
        fields = chol @ rng.standard_normal((config.grid_points, count))
        phases = scale * (weights @ fields)
        return start, phases, fields.T.copy() if keep_paths else None

    phases = np.empty(n)
    paths = np.empty((n, config.grid_points)) if keep_paths else None
    if num_threads == 0:
        num_threads = None  # executor default: cpu count
    if num_threads == 1:
        results = [draw_block(j, s) for j, s in enumerate(starts)]
    else:
        with ThreadPoolExecutor(max_workers=num_threads) as pool:
            results = list(pool.map(draw_block, range(len(starts)), starts))
    for start, block_phases, block_paths in results:
        phases[start : start + len(block_phases)] = block_phases
        if keep_paths:
            paths[start : start + len(block_phases)] = block_paths
    return TrajectoryEnsemble(phases=phases, meta=config, paths=paths)


def ensemble_coherence(ensemble: TrajectoryEnsemble) -> tuple[float, float]:
    """Magnitude of the ensemble-averaged phase factor and its jackknife error.

    The expectation equals exp(-gamma(t_max) t_max); this is the brute-force
    counterpart of the closed-form rate.
    """
    n = len(ensemble.phases)
    if n < 100:
        raise ValueError("need at least 100 trajectories for a stable error bar")
    vectors = np.exp(1j * ensemble.phases)
    total = vectors.sum()
    magnitude = abs(total) / n
    # leave-one-out jackknife on the magnitude
    loo = np.abs((total - vectors) / (n - 1))
    std_error = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
    return float(magnitude), float(std_error)


@dataclass(frozen=True)
class EstimationRun:
    """Outcome of one simulated experiment: counts, shots, inverted estimate."""

    counts: int
    shots: int
    delta_hat: float
    clamped: bool


def invert_probability(p_hat: float, cfg: ExperimentConfig, model: DephasingModel) -> tuple[float, bool]:
    """Invert a measured return probability to a detuning estimate.

    delta_hat = arccos(clamp((2 p_hat - 1) e^{+L gamma t}, -1, 1)) / (L t);
    finite-sample p_hat can exceed the decayed fringe envelope, hence the
    clamp.  Exact on the principal branch: p_hat = P(delta) recovers delta for
    L t delta in (0, pi).
    """
    rate = model.decay_rate(cfg.exposure_time)
    lt = cfg.num_spins * cfg.exposure_time
    raw = (2.0 * p_hat - 1.0) * math.exp(rate * lt)
    clamped = abs(raw) > 1.0
    delta_hat = math.acos(min(1.0, max(-1.0, raw))) / lt
    return delta_hat, clamped


def _generator(seed) -> np.random.Generator:
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seq))


def simulate_measurements(cfg: ExperimentConfig, model: DephasingModel, seed) -> EstimationRun:
    """Draw counts ~ Binomial(N, P) and invert to a detuning estimate."""
    rng = _generator(seed)
    shots = cfg.shots
    counts = int(rng.binomial(shots, signal_probability(cfg, model)))
    delta_hat, clamped = invert_probability(counts / shots, cfg, model)
    return EstimationRun(counts=counts, shots=shots, delta_hat=delta_hat, clamped=clamped)


@dataclass(frozen=True)
class MseResult:
    """Empirical mean squared error of the detuning estimator."""

    mse: float
    std_error: float
    clamp_fraction: float
    saturated: bool


def empirical_mse(cfg: ExperimentConfig, model: DephasingModel, repetitions: int, seed) -> MseResult:
    """Mean of (delta_hat - delta)^2 over seeded repetitions, with its error.

    Flags saturation (and warns) when more than 1% of repetitions hit the
    arccos clamp, since the quadratic error propagation no longer applies.
    """
    if repetitions < 100:
        raise ValueError("repetitions must be >= 100")
    phase = cfg.fringe_phase
    if not 0.0 < phase < math.pi:
        raise ValueError("estimator inversion requires L t delta in (0, pi)")
    master = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = master.spawn(repetitions)
    errors = np.empty(repetitions)
    clamped = 0
    for i, child in enumerate(children):
        run = simulate_measurements(cfg, model, child)
        errors[i] = (run.delta_hat - cfg.detuning) ** 2
        clamped += run.clamped
    clamp_fraction = clamped / repetitions
    saturated = clamp_fraction > 0.01
    if saturated:
        warnings.warn(
            f"{100 * clamp_fraction:.1f}% of repetitions hit the arccos clamp; "
            "the estimator is saturating",
            EstimatorSaturationWarning,
            stacklevel=2,
        )
    mse = float(errors.mean())
    std_error = float(errors.std(ddof=1) / math.sqrt(repetitions))
    return MseResult(mse=mse, std_error=std_error, clamp_fraction=clamp_fraction, saturated=saturated)
