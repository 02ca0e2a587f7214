"""Signal probability and estimation variance for GHZ and separable probes.

The probe accumulates phase for an exposure time t per shot and the experiment
is repeated N = total_time/t times; error propagation through the measured
fringe gives the variance of the detuning estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .noise import DephasingModel

__all__ = [
    "ExperimentConfig",
    "ProbeStrategy",
    "VarianceBounds",
    "FringeNodeError",
    "OperatingPointError",
    "signal_probability",
    "signal_derivative",
    "variance",
    "variance_ghz",
    "variance_ideal",
    "variance_separable",
    "variance_bounds",
]


class ProbeStrategy(str, Enum):
    """How the L spins are used: one entangled probe, L independent probes
    measured in parallel, or the noiseless entangled reference."""

    GHZ = "ghz"
    SEPARABLE = "separable"
    IDEAL_GHZ = "ideal_ghz"


class FringeNodeError(ValueError):
    """Operating point sits on a fringe node (sin(L t delta) = 0): the
    estimator variance is infinite there."""


class OperatingPointError(ValueError):
    """Operating point outside the range where the sandwich bounds apply."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One sensing run: probe size, exposure time, time budget, true detuning."""

    num_spins: int
    exposure_time: float
    total_time: float
    detuning: float

    def __post_init__(self) -> None:
        if self.num_spins < 1:
            raise ValueError("num_spins must be >= 1")
        if self.exposure_time <= 0:
            raise ValueError("exposure_time must be > 0")
        if self.total_time < self.exposure_time:
            raise ValueError("total_time must allow at least one shot")

    @property
    def shots(self) -> int:
        """Number of repetitions N = floor(total_time / exposure_time)."""
        return int(self.total_time // self.exposure_time)

    @property
    def fringe_phase(self) -> float:
        """Accumulated phase L*t*delta of the GHZ fringe."""
        return self.num_spins * self.exposure_time * self.detuning


def signal_probability(cfg: ExperimentConfig, model: DephasingModel) -> float:
    """Probability of recovering the initial GHZ state after one shot:
    1/2 + 1/2 exp(-L gamma(t) t) cos(L t delta)."""
    rate = model.decay_rate(cfg.exposure_time)
    envelope = math.exp(-cfg.num_spins * rate * cfg.exposure_time)
    return 0.5 + 0.5 * envelope * math.cos(cfg.fringe_phase)


def signal_derivative(cfg: ExperimentConfig, model: DephasingModel) -> float:
    """Analytic dP/d(delta) = -1/2 exp(-L gamma t) L t sin(L t delta)."""
    rate = model.decay_rate(cfg.exposure_time)
    envelope = math.exp(-cfg.num_spins * rate * cfg.exposure_time)
    lt = cfg.num_spins * cfg.exposure_time
    return -0.5 * envelope * lt * math.sin(cfg.fringe_phase)


def variance_ghz(cfg: ExperimentConfig, model: DephasingModel) -> float:
    """Variance of the detuning estimate for the GHZ probe:

    (e^{2 gamma L t} - 1)/(T L^2 t sin^2(L t delta)) + 1/(T L^2 t)

    Reduces to the noiseless floor 1/(T L^2 t) when the coupling vanishes
    (expm1 keeps that limit exact).
    """
    s = math.sin(cfg.fringe_phase)
    if s == 0.0:
        raise FringeNodeError("sin(L t delta) = 0: infinite variance at a fringe node")
    L, t, total = cfg.num_spins, cfg.exposure_time, cfg.total_time
    rate = model.decay_rate(t)
    # grouped so the noiseless limit hits 1/(T L^2 t) exactly and the L = 1
    # case is bit-identical to the separable formula
    value = (math.expm1(2.0 * rate * L * t) / (s * s) + 1.0) / (total * L**2 * t)
    if not math.isfinite(value):
        raise FringeNodeError("variance overflow at a near-node operating point")
    return value


def variance_ideal(cfg: ExperimentConfig) -> float:
    """Noiseless entangled-probe floor 1/(T L^2 t) (Heisenberg scaling)."""
    return 1.0 / (cfg.total_time * cfg.num_spins**2 * cfg.exposure_time)


def variance_separable(cfg: ExperimentConfig, model: DephasingModel) -> float:
    """Variance for L independent single-spin probes measured in parallel
    (N*L total shots): [(e^{2 gamma t} - 1)/sin^2(t delta) + 1]/(T L t)."""
    s = math.sin(cfg.exposure_time * cfg.detuning)
    if s == 0.0:
        raise FringeNodeError("sin(t delta) = 0: infinite variance at a fringe node")
    L, t, total = cfg.num_spins, cfg.exposure_time, cfg.total_time
    rate = model.decay_rate(t)
    value = (math.expm1(2.0 * rate * t) / (s * s) + 1.0) / (total * L * t)
    if not math.isfinite(value):
        raise FringeNodeError("variance overflow at a near-node operating point")
    return value


@dataclass(frozen=True)
class VarianceBounds:
    """Two-sided bounds on the excess variance variance_ghz - variance_ideal."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError("bounds must satisfy 0 <= lower <= upper")


def variance(cfg: ExperimentConfig, model: DephasingModel, strategy: ProbeStrategy) -> float:
    """Estimate variance for the chosen probe strategy."""
    if strategy is ProbeStrategy.GHZ:
        return variance_ghz(cfg, model)
    if strategy is ProbeStrategy.SEPARABLE:
        return variance_separable(cfg, model)
    return variance_ideal(cfg)


# the sandwich rests on x >= sin x >= (2/pi) x, valid on (0, pi/2]
_BOUND_RATIO = math.pi**2 / 4.0


def variance_bounds(cfg: ExperimentConfig, model: DephasingModel) -> VarianceBounds:
    """Sandwich the excess variance for 0 < L t delta <= pi/2:

    lower = (e^{2 gamma L t} - 1)/(T L^4 t^3 delta^2),  upper = (pi^2/4) lower
    """
    phase = cfg.fringe_phase
    if not 0.0 < phase <= math.pi / 2.0:
        raise OperatingPointError("bounds require 0 < L t delta <= pi/2")
    L, t, total = cfg.num_spins, cfg.exposure_time, cfg.total_time
    rate = model.decay_rate(t)
    lower = math.expm1(2.0 * rate * L * t) / (total * L**4 * t**3 * cfg.detuning**2)
    return VarianceBounds(lower=lower, upper=_BOUND_RATIO * lower)
