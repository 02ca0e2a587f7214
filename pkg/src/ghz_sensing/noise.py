"""Closed-form dephasing kernels and single-spin decoherence rates.

Two noise families are covered: a classical zero-mean Gaussian field with a
Gaussian autocorrelation kernel, and a bosonic bath characterised by a cutoff
frequency and a temperature.  Both interpolate between quadratic short-time
(1/f-like) decay and exponential Markovian decay.

Units: hbar = k_B = 1, so rates, frequencies and temperatures all share the
same inverse-time unit as 1/correlation_time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

__all__ = [
    "KERNEL_PEAK",
    "ClassicalNoiseParams",
    "BosonicBathParams",
    "DephasingModel",
    "correlation",
    "gamma_classical",
    "gamma_limit_markov",
    "gamma_limit_one_over_f",
    "gamma_bosonic",
    "coherence",
]

SQRT_PI = math.sqrt(math.pi)

#: peak (equal-time) value of the autocorrelation kernel, 2/sqrt(pi)
KERNEL_PEAK = 2.0 / SQRT_PI

# Below this fraction of the correlation time the exact rate expression is a
# 0/0 form dominated by cancellation; a short-time series exact to double
# precision takes over.
_SERIES_CUTOFF = 1e-4

# sinh overflows near an argument of 710; switch to the log-stable form well
# before that.
_LOG_SINH_SWITCH = 30.0


@dataclass(frozen=True)
class ClassicalNoiseParams:
    """Coupling strength and correlation time of the classical Gaussian field."""

    coupling: float
    correlation_time: float

    def __post_init__(self) -> None:
        if self.coupling < 0:
            raise ValueError("coupling must be >= 0")
        if self.correlation_time <= 0:
            raise ValueError("correlation_time must be > 0")


@dataclass(frozen=True)
class BosonicBathParams:
    """Temperature (frequency units) and cutoff frequency of the bosonic bath."""

    temperature: float
    cutoff: float

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.cutoff <= 0:
            raise ValueError("cutoff must be > 0")


def correlation(t1, t2, params: ClassicalNoiseParams):
    """Autocorrelation of the classical field: (2/sqrt(pi)) exp(-|t1-t2|^2/tau^2).

    Symmetric in its time arguments and maximal (2/sqrt(pi)) on the diagonal.
    """
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    out = KERNEL_PEAK * np.exp(-((t1 - t2) / params.correlation_time) ** 2)
    return float(out) if out.ndim == 0 else out


def _rate_series(t, lam2: float, tau: float):
    # short-time expansion (4/sqrt(pi)) lam^2 t (1 - x^2/6 + x^4/30 - ...)
    x = t / tau
    return (4.0 / SQRT_PI) * lam2 * t * (1.0 - x**2 / 6.0 + x**4 / 30.0)


def _rate_exact(t, lam2: float, tau: float):
    x = t / tau
    # expm1 keeps relative accuracy in the cancelling (-1 + e^{-x^2}) factor
    return 4.0 * lam2 * tau**2 * np.expm1(-(x**2)) / (SQRT_PI * t) + 4.0 * lam2 * tau * erf(x)


def gamma_classical(t, params: ClassicalNoiseParams):
    """Single-spin dephasing rate of the classical Gaussian field.

    gamma(t) = 4 lam^2 tau^2 (e^{-t^2/tau^2} - 1)/(sqrt(pi) t)
             + 4 lam^2 tau erf(t/tau)

    The t = 0 singularity is removable; for t < 1e-4 tau a short-time series
    (agreeing with the exact branch to better than 1e-10) is used.  The result
    is continuous and nonnegative for all t >= 0, interpolating between the
    linear 1/f form (4/sqrt(pi)) lam^2 t and the plateau 4 lam^2 tau.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    lam2 = params.coupling**2
    tau = params.correlation_time
    small = t < _SERIES_CUTOFF * tau
    safe_t = np.where(small, tau, t)
    out = np.where(small, _rate_series(t, lam2, tau), _rate_exact(safe_t, lam2, tau))
    return float(out) if out.ndim == 0 else out


def gamma_limit_markov(params: ClassicalNoiseParams) -> float:
    """Long-time (memoryless) limit of the classical rate: 4 lam^2 tau."""
    return 4.0 * params.coupling**2 * params.correlation_time


def gamma_limit_one_over_f(t, params: ClassicalNoiseParams):
    """Short-time (infinite-correlation-time) limit: (4/sqrt(pi)) lam^2 t."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    out = (4.0 / SQRT_PI) * params.coupling**2 * t
    return float(out) if out.ndim == 0 else out


def gamma_bosonic(t, params: BosonicBathParams):
    """Dephasing rate of the bosonic bath.

    Gamma(t) = (1/t) log(1 + wc^2 t^2) + (2/t) log(sinh(pi T t)/(pi T t))

    Returns the limit 0 at t = 0; the thermal factor vanishes at zero
    temperature.  For pi*T*t beyond the sinh overflow range the log of the
    ratio is evaluated as x - log(2x) + log1p(-e^{-2x}).
    """
    t_in = np.asarray(t, dtype=float)
    if np.any(t_in < 0):
        raise ValueError("t must be >= 0")
    tt = np.atleast_1d(t_in)
    out = np.zeros_like(tt)
    pos = tt > 0
    tp = tt[pos]
    vacuum = np.log1p((params.cutoff * tp) ** 2) / tp
    if params.temperature > 0:
        x = math.pi * params.temperature * tp
        log_ratio = np.empty_like(x)
        small = x <= _LOG_SINH_SWITCH
        log_ratio[small] = np.log(np.sinh(x[small]) / x[small])
        xl = x[~small]
        log_ratio[~small] = xl - np.log(2.0 * xl) + np.log1p(-np.exp(-2.0 * xl))
        vacuum = vacuum + 2.0 * log_ratio / tp
    out[pos] = vacuum
    return float(out[0]) if t_in.ndim == 0 else out


_CLASSICAL_KINDS = ("classical_gaussian", "markovian_limit", "one_over_f_limit")
_ALL_KINDS = _CLASSICAL_KINDS + ("bosonic_bath",)


@dataclass(frozen=True)
class DephasingModel:
    """Tagged union over the supported dephasing variants.

    Exactly one parameter set is active: the classical kinds
    (classical_gaussian, markovian_limit, one_over_f_limit) carry
    ClassicalNoiseParams, the bosonic_bath kind carries BosonicBathParams.
    """

    kind: str
    classical: ClassicalNoiseParams | None = None
    bath: BosonicBathParams | None = None

    def __post_init__(self) -> None:
        if self.kind not in _ALL_KINDS:
            raise ValueError(f"unknown dephasing kind {self.kind!r}")
        if self.kind in _CLASSICAL_KINDS:
            if self.classical is None or self.bath is not None:
                raise ValueError(f"{self.kind} requires classical params only")
        elif self.bath is None or self.classical is not None:
            raise ValueError("bosonic_bath requires bath params only")

    @classmethod
    def classical_gaussian(cls, params: ClassicalNoiseParams) -> "DephasingModel":
        return cls(kind="classical_gaussian", classical=params)

    @classmethod
    def markovian_limit(cls, params: ClassicalNoiseParams) -> "DephasingModel":
        return cls(kind="markovian_limit", classical=params)

    @classmethod
    def one_over_f_limit(cls, params: ClassicalNoiseParams) -> "DephasingModel":
        return cls(kind="one_over_f_limit", classical=params)

    @classmethod
    def bosonic_bath(cls, params: BosonicBathParams) -> "DephasingModel":
        return cls(kind="bosonic_bath", bath=params)

    def decay_rate(self, t):
        """Single-spin decoherence rate of the active variant at time t."""
        if self.kind == "classical_gaussian":
            return gamma_classical(t, self.classical)
        if self.kind == "one_over_f_limit":
            return gamma_limit_one_over_f(t, self.classical)
        if self.kind == "markovian_limit":
            rate = gamma_limit_markov(self.classical)
            t = np.asarray(t, dtype=float)
            return rate if t.ndim == 0 else np.full(t.shape, rate)
        return gamma_bosonic(t, self.bath)


def coherence(t, num_spins: int, model: DephasingModel):
    """Magnitude of the normalized GHZ off-diagonal element, exp(-L gamma(t) t).

    The L-spin exponent is L times the single-spin one, so
    coherence(t, L) == coherence(t, 1)**L up to floating round-off.
    """
    if num_spins < 1:
        raise ValueError("num_spins must be >= 1")
    t = np.asarray(t, dtype=float)
    out = np.exp(-num_spins * np.asarray(model.decay_rate(t)) * t)
    return float(out) if out.ndim == 0 else out
