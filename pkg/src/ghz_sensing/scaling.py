"""Exposure-time schedules and scaling-law analysis.

Shrinking the exposure time as t = s L^{-z} keeps the probe inside the
quadratic-decay window as it grows; for z >= 1/2 the estimate variance scales
as L^{z-2}, so z = 1/2 yields an uncertainty exponent of -3/4, between the
standard quantum limit (-1/2) and the noiseless floor (-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noise import SQRT_PI, ClassicalNoiseParams, DephasingModel, gamma_classical

__all__ = [
    "DIVERGENCE_WINDOW",
    "SchedulePolicy",
    "ScalingSeries",
    "ExponentFit",
    "GammaBoundCheck",
    "OptimalExposure",
    "DivergenceProbe",
    "exposure_time",
    "gamma_bound_check",
    "uncertainty_curve",
    "fit_exponent",
    "optimal_exposure",
    "divergence_probe",
    "fidelity_smalltime",
]

#: a series is called eventually increasing/decreasing based on its last 5 points
DIVERGENCE_WINDOW = 5

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SchedulePolicy:
    """Exposure-time rule t = base_time * L^(-exponent)."""

    base_time: float
    exponent: float

    def __post_init__(self) -> None:
        if self.base_time <= 0:
            raise ValueError("base_time must be > 0")
        if self.exponent < 0:
            raise ValueError("exponent must be >= 0")


def exposure_time(num_spins, policy: SchedulePolicy):
    """Scheduled exposure time s * L^(-z)."""
    L = np.asarray(num_spins, dtype=float)
    if np.any(L < 1):
        raise ValueError("num_spins must be >= 1")
    out = policy.base_time * L ** (-policy.exponent)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GammaBoundCheck:
    """Residual of the scheduled rate against its leading term, and the
    analytic bound it must stay under."""

    residual: float
    bound: float
    holds: bool


def gamma_bound_check(
    num_spins: int, policy: SchedulePolicy, params: ClassicalNoiseParams
) -> GammaBoundCheck:
    """Check |gamma(s L^-z) - 4 s lam^2/(sqrt(pi) L^z)| against the bound
    12 s^2 lam^2 / (sqrt(pi) tau L^z (L^{2z} - s^2/tau^2)).

    Requires L^{2z} > s^2/tau^2 so the bound is positive (large-L regime).
    """
    s, z = policy.base_time, policy.exponent
    tau = params.correlation_time
    lz2 = float(num_spins) ** (2.0 * z)
    if lz2 <= (s / tau) ** 2:
        raise ValueError("bound requires L^(2z) > (base_time/correlation_time)^2")
    lz = float(num_spins) ** z
    t = s / lz
    leading = 4.0 * s * params.coupling**2 / (SQRT_PI * lz)
    residual = abs(gamma_classical(t, params) - leading)
    bound = 12.0 * s**2 * params.coupling**2 / (SQRT_PI * tau * lz * (lz2 - (s / tau) ** 2))
    return GammaBoundCheck(residual=residual, bound=bound, holds=residual <= bound)


@dataclass(frozen=True)
class ScalingSeries:
    """Variance/uncertainty versus probe size along a schedule, at the
    sin^2 = 1 operating point."""

    probe_sizes: np.ndarray
    exposure_times: np.ndarray
    operating_detunings: np.ndarray
    variances: np.ndarray
    uncertainties: np.ndarray
    policy: SchedulePolicy
    model_kind: str

    def __post_init__(self) -> None:
        if len(self.probe_sizes) == 0:
            raise ValueError("series must be nonempty")
        if np.any(np.diff(self.probe_sizes) <= 0):
            raise ValueError("probe sizes must be strictly increasing")
        if not np.all(np.isfinite(self.variances)) or np.any(self.variances <= 0):
            raise ValueError("variances must be finite and positive")

    def __len__(self) -> int:
        return len(self.probe_sizes)


def uncertainty_curve(
    num_spins_values, policy: SchedulePolicy, model: DephasingModel, total_time: float
) -> ScalingSeries:
    """Evaluate the scheduled variance e^{2 gamma L t}/(T L^2 t) over a grid
    of probe sizes, at the operating point L t delta = pi/2."""
    L = np.asarray(num_spins_values, dtype=float)
    if L.ndim != 1 or len(L) == 0:
        raise ValueError("num_spins_values must be a nonempty 1-d sequence")
    t = exposure_time(L, policy)
    delta = math.pi / 2.0 / (L * t)
    rate = np.asarray(model.decay_rate(t), dtype=float)
    with np.errstate(over="raise"):
        try:
            variance = np.exp(2.0 * rate * L * t) / (total_time * L**2 * t)
        except FloatingPointError as exc:
            raise ValueError("scheduled variance overflows on this grid") from exc
    return ScalingSeries(
        probe_sizes=L.astype(int),
        exposure_times=t,
        operating_detunings=delta,
        variances=variance,
        uncertainties=np.sqrt(variance),
        policy=policy,
        model_kind=model.kind,
    )


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares power-law exponent of uncertainty versus probe size."""

    slope: float
    intercept: float
    stderr: float
    r_squared: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r_squared <= 1.0:
            raise ValueError("r_squared must lie in [0, 1]")


def fit_exponent(series: ScalingSeries, tail_fraction: float = 0.5) -> ExponentFit:
    """OLS of log(uncertainty) on log(L) over the last tail_fraction of the
    series.  The head carries transient corrections, so power-law claims are
    read off the tail."""
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError("tail_fraction must lie in (0, 1]")
    count = math.ceil(len(series) * tail_fraction)
    if count < 4:
        raise ValueError("need at least 4 entries in the fitted tail")
    x = np.log(series.probe_sizes[-count:].astype(float))
    y = np.log(series.uncertainties[-count:])
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite uncertainties in the fitted tail")
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0.0:
        raise ValueError("degenerate series: constant probe size")
    design = np.column_stack([np.ones_like(x), x])
    (intercept, slope), *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - (intercept + slope * x)
    ss_res = float(residuals @ residuals)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    stderr = math.sqrt(ss_res / (count - 2) / sxx) if count > 2 else 0.0
    r_squared = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return ExponentFit(slope=float(slope), intercept=float(intercept), stderr=stderr, r_squared=r_squared)


@dataclass(frozen=True)
class OptimalExposure:
    """Minimizer of the scheduled variance over exposure time."""

    exposure_time: float
    variance: float
    interior: bool  # False when the objective was monotone over the bracket


def _default_bracket_top(num_spins: int, model: DephasingModel) -> float:
    if model.kind == "bosonic_bath":
        scales = [1.0 / model.bath.cutoff]
        if model.bath.temperature > 0:
            scales.append(1.0 / (math.pi * model.bath.temperature))
        return 10.0 * max(scales)
    p = model.classical
    if p.coupling == 0.0:
        return 10.0 * p.correlation_time
    return 10.0 * max(p.correlation_time, 1.0 / (p.coupling * math.sqrt(num_spins)))


def optimal_exposure(
    num_spins: int,
    model: DephasingModel,
    total_time: float,
    *,
    rel_tol: float = 1e-6,
) -> OptimalExposure:
    """Golden-section minimization of e^{2 gamma(t) L t}/(T L^2 t) over t.

    Works on the log of the objective (no overflow) and on a log time axis
    (uniform relative resolution).  When the objective is monotone over the
    bracket, e.g. without noise, the boundary point is returned with
    interior=False.
    """
    if num_spins < 1:
        raise ValueError("num_spins must be >= 1")
    L = float(num_spins)
    t_hi = _default_bracket_top(num_spins, model)
    t_lo = 1e-9 * t_hi

    def log_objective(t: float) -> float:
        return 2.0 * float(model.decay_rate(t)) * L * t - math.log(total_time * L * L * t)

    a, b = math.log(t_lo), math.log(t_hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = log_objective(math.exp(c)), log_objective(math.exp(d))
    while b - a > rel_tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = log_objective(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = log_objective(math.exp(d))
    u = 0.5 * (a + b)
    t_star = math.exp(u)
    interior = (math.log(t_hi) - u) > 50.0 * rel_tol and (u - math.log(t_lo)) > 50.0 * rel_tol
    return OptimalExposure(
        exposure_time=t_star,
        variance=math.exp(log_objective(t_star)),
        interior=interior,
    )


@dataclass(frozen=True)
class DivergenceProbe:
    """Whether the scheduled variance is eventually increasing in L."""

    diverging: bool
    series: ScalingSeries


def _tail_strictly_increasing(values: np.ndarray, window: int = DIVERGENCE_WINDOW) -> bool:
    return bool(np.all(np.diff(values[-window:]) > 0))


def divergence_probe(
    policy: SchedulePolicy,
    model: DephasingModel,
    total_time: float,
    num_spins_values,
) -> DivergenceProbe:
    """Probe whether variance grows with probe size under the schedule.

    For z < 1/2 the decay exponent gamma L t grows without bound and the
    variance eventually increases ("eventually" = strictly increasing over the
    last DIVERGENCE_WINDOW grid points); for z >= 1/2 it does not.
    """
    series = uncertainty_curve(num_spins_values, policy, model, total_time)
    if len(series) < DIVERGENCE_WINDOW:
        raise ValueError(f"need at least {DIVERGENCE_WINDOW} grid points")
    return DivergenceProbe(diverging=_tail_strictly_increasing(series.variances), series=series)


def fidelity_smalltime(t, num_spins: int, model: DephasingModel):
    """GHZ self-overlap at zero detuning and its short-time prediction.

    fidelity = (1 + e^{-L gamma(t) t})/2.  The prediction is the quadratic
    decay law 1 - C L t^2 with C = 2 lam^2/sqrt(pi) for the classical kinds
    and C = (wc^2 + pi^2 T^2/3)/2 for the bosonic bath; the markovian-limit
    kind decays linearly (1 - 2 lam^2 tau L t) instead, having no quadratic
    window.
    """
    if num_spins < 1:
        raise ValueError("num_spins must be >= 1")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    rate = np.asarray(model.decay_rate(t), dtype=float)
    fidelity = 0.5 * (1.0 + np.exp(-num_spins * rate * t))
    if model.kind == "markovian_limit":
        p = model.classical
        prediction = 1.0 - 2.0 * p.coupling**2 * p.correlation_time * num_spins * t
    elif model.kind == "bosonic_bath":
        bath = model.bath
        c = 0.5 * (bath.cutoff**2 + math.pi**2 * bath.temperature**2 / 3.0)
        prediction = 1.0 - c * num_spins * t**2
    else:
        c = 2.0 * model.classical.coupling**2 / SQRT_PI
        prediction = 1.0 - c * num_spins * t**2
    prediction = np.asarray(prediction, dtype=float)
    if fidelity.ndim == 0:
        return float(fidelity), float(prediction)
    return fidelity, prediction
