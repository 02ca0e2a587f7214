"""Kernel and rate checks against independently computed references.

Frozen numbers come from a 40-digit evaluation of the definitions; the
double-integral oracle re-derives the decay exponent from the raw kernel
without touching the closed form.
"""

import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from ghz_sensing.noise import (
    KERNEL_PEAK,
    SQRT_PI,
    BosonicBathParams,
    ClassicalNoiseParams,
    DephasingModel,
    _SERIES_CUTOFF,
    _rate_exact,
    _rate_series,
    coherence,
    correlation,
    gamma_bosonic,
    gamma_classical,
    gamma_limit_markov,
    gamma_limit_one_over_f,
)

PARAMS = ClassicalNoiseParams(coupling=0.25, correlation_time=1.0)
MODEL = DephasingModel.classical_gaussian(PARAMS)

# gamma(t) at lam = 0.25, tau = 1, evaluated to 40 digits
GAMMA_REF = {
    0.01: 0.0014104504514402258,
    0.05: 0.0070494327755206921,
    0.2: 0.028022909808463706,
    0.5: 0.067725822413244689,
    1.0: 0.12151623952806398,
    5.0: 0.22179052082261959,
    20.0: 0.24294763020565305,
    50.0: 0.24717905208226122,
}


def test_correlation_diagonal_is_kernel_peak():
    assert correlation(0.7, 0.7, PARAMS) == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-15)
    assert KERNEL_PEAK == pytest.approx(1.1283791670955126, rel=1e-15)


def test_correlation_symmetry_and_decay():
    rng = np.random.default_rng(4)
    for _ in range(50):
        t1, t2 = rng.uniform(-5, 5, size=2)
        assert correlation(t1, t2, PARAMS) == correlation(t2, t1, PARAMS)
        assert correlation(t1, t2, PARAMS) <= KERNEL_PEAK
    assert correlation(0.0, 1e3, PARAMS) == 0.0  # Gaussian tail underflows
    assert correlation(0.0, 1.0, PARAMS) == pytest.approx(0.4151074974205947, rel=1e-14)


def test_gamma_classical_frozen_values():
    for t, ref in GAMMA_REF.items():
        assert gamma_classical(t, PARAMS) == pytest.approx(ref, rel=1e-13)


def test_gamma_classical_zero_time_and_sign():
    assert gamma_classical(0.0, PARAMS) == 0.0
    grid = np.linspace(0.0, 50.0, 4001)
    assert np.all(gamma_classical(grid, PARAMS) >= 0.0)
    with pytest.raises(ValueError):
        gamma_classical(-0.1, PARAMS)


def test_decay_exponent_matches_kernel_double_integral():
    # brute-force oracle: gamma(t) t = 2 lam^2 * integral of the kernel over [0,t]^2
    for t in (0.3, 1.0, 2.7):
        integral, _ = dblquad(
            lambda u, v: correlation(u, v, PARAMS), 0.0, t, 0.0, t, epsabs=1e-12, epsrel=1e-12
        )
        oracle = 2.0 * PARAMS.coupling**2 * integral
        assert gamma_classical(t, PARAMS) * t == pytest.approx(oracle, rel=1e-9)


def test_series_and_exact_branches_agree_at_switch():
    lam2 = PARAMS.coupling**2
    tau = PARAMS.correlation_time
    t_switch = _SERIES_CUTOFF * tau
    for t in (t_switch, 0.5 * t_switch, 2.0 * t_switch):
        series = _rate_series(t, lam2, tau)
        exact = _rate_exact(t, lam2, tau)
        assert abs(series - exact) <= 1e-10 * abs(exact)


def test_one_over_f_limit_small_times():
    ts = np.geomspace(1e-6, 1e-2, 30)
    line = gamma_limit_one_over_f(ts, PARAMS)
    assert np.all(np.abs(gamma_classical(ts, PARAMS) - line) <= 1e-3 * line)
    assert gamma_limit_one_over_f(0.0, PARAMS) == 0.0
    assert gamma_limit_one_over_f(0.01, PARAMS) == pytest.approx(0.0014104739588693908, rel=1e-14)
    assert gamma_limit_one_over_f(1.0, PARAMS) == pytest.approx(0.14104739588693907, rel=1e-14)
    # at t = tau/100 the full rate sits within 1e-4 of the line
    assert gamma_classical(0.01, PARAMS) == pytest.approx(gamma_limit_one_over_f(0.01, PARAMS), rel=1e-4)


def test_markov_limit_values():
    assert gamma_limit_markov(PARAMS) == 0.25
    assert gamma_limit_markov(ClassicalNoiseParams(0.0, 1.0)) == 0.0
    assert gamma_limit_markov(ClassicalNoiseParams(1.0, 2.0)) == 8.0


def test_markov_plateau_approach_law():
    # the plateau is approached as 1/(sqrt(pi) x), x = t/tau: slow, O(1/t).
    plateau = gamma_limit_markov(PARAMS)
    ts = np.array([20.0, 50.0, 200.0, 1000.0])
    rel_dev = np.abs(gamma_classical(ts, PARAMS) - plateau) / plateau
    assert np.all(rel_dev <= 1.0 / (SQRT_PI * ts) * (1 + 1e-12))
    assert np.all(np.diff(rel_dev) < 0)
    # consequence: 1e-3 agreement is only reached near t = 564 tau
    assert rel_dev[0] == pytest.approx(0.028209479177387813, rel=1e-10)
    assert abs(gamma_classical(564.19, PARAMS) - plateau) / plateau == pytest.approx(1e-3, rel=1e-3)


def test_exponent_nondecreasing():
    grid = np.linspace(0.0, 50.0, 20001)
    exponent = gamma_classical(grid, PARAMS) * grid
    assert np.all(np.diff(exponent) >= 0.0)


def test_coherence_values_and_power_property():
    assert coherence(0.0, 5, MODEL) == 1.0
    assert coherence(1.0, 1, MODEL) == pytest.approx(0.88557667188487771, rel=1e-13)
    assert coherence(1.0, 10, MODEL) == pytest.approx(0.29666183390024553, rel=1e-13)
    ts = np.geomspace(0.01, 20.0, 40)
    for num_spins in (2, 7, 31):
        np.testing.assert_allclose(
            coherence(ts, num_spins, MODEL), coherence(ts, 1, MODEL) ** num_spins, rtol=1e-12
        )
    with pytest.raises(ValueError):
        coherence(1.0, 0, MODEL)


def test_coherence_nonincreasing_for_every_kind():
    ts = np.linspace(0.0, 30.0, 3001)
    bath = BosonicBathParams(temperature=0.3, cutoff=1.5)
    models = [
        MODEL,
        DephasingModel.markovian_limit(PARAMS),
        DephasingModel.one_over_f_limit(PARAMS),
        DephasingModel.bosonic_bath(bath),
    ]
    for model in models:
        values = coherence(ts, 3, model)
        assert np.all(np.diff(values) <= 1e-15)
        assert np.all((0.0 <= values) & (values <= 1.0))


def test_gamma_bosonic_zero_temperature():
    bath = BosonicBathParams(temperature=0.0, cutoff=1.0)
    assert gamma_bosonic(1.0, bath) == pytest.approx(math.log(2.0), rel=1e-14)
    assert gamma_bosonic(0.0, bath) == 0.0
    ts = np.geomspace(0.01, 100.0, 20)
    np.testing.assert_allclose(gamma_bosonic(ts, bath), np.log1p(ts**2) / ts, rtol=1e-14)


def test_gamma_bosonic_short_time_limit_grid():
    # vacuum-dominated regime: Gamma ~ wc^2 t for t << 1/wc (thermal part
    # subdominant when T << wc)
    for cutoff in (0.5, 1.0, 2.0):
        for temperature in (0.0, 0.02 * cutoff, 0.05 * cutoff):
            bath = BosonicBathParams(temperature=temperature, cutoff=cutoff)
            t = 1e-3 / cutoff
            assert gamma_bosonic(t, bath) == pytest.approx(cutoff**2 * t, rel=1e-2)


def test_gamma_bosonic_long_time_limit_grid():
    for temperature in (0.5, 1.0, 2.0):
        for cutoff in (0.5, 1.0, 2.0):
            bath = BosonicBathParams(temperature=temperature, cutoff=cutoff)
            t = 100.0 / temperature
            assert gamma_bosonic(t, bath) == pytest.approx(2.0 * math.pi * temperature, rel=2e-2)


def test_gamma_bosonic_overflow_guard():
    # pi*T*t = 1000*pi would overflow a naive sinh
    bath = BosonicBathParams(temperature=10.0, cutoff=1.0)
    assert gamma_bosonic(100.0, bath) == pytest.approx(62.7490448285578, rel=1e-12)
    vec = gamma_bosonic(np.array([0.0, 1.0, 100.0]), bath)
    assert np.all(np.isfinite(vec))
    assert vec[2] == pytest.approx(62.7490448285578, rel=1e-12)


def test_param_validation():
    with pytest.raises(ValueError):
        ClassicalNoiseParams(coupling=-0.1, correlation_time=1.0)
    with pytest.raises(ValueError):
        ClassicalNoiseParams(coupling=0.1, correlation_time=0.0)
    with pytest.raises(ValueError):
        BosonicBathParams(temperature=-1.0, cutoff=1.0)
    with pytest.raises(ValueError):
        BosonicBathParams(temperature=1.0, cutoff=0.0)


def test_model_variant_validation():
    bath = BosonicBathParams(temperature=0.1, cutoff=1.0)
    with pytest.raises(ValueError):
        DephasingModel(kind="nonsense", classical=PARAMS)
    with pytest.raises(ValueError):
        DephasingModel(kind="classical_gaussian", bath=bath)
    with pytest.raises(ValueError):
        DephasingModel(kind="bosonic_bath", classical=PARAMS)
    with pytest.raises(ValueError):
        DephasingModel(kind="bosonic_bath", classical=PARAMS, bath=bath)
    # dispatch sanity
    assert DephasingModel.markovian_limit(PARAMS).decay_rate(123.0) == 0.25
    assert DephasingModel.one_over_f_limit(PARAMS).decay_rate(1.0) == pytest.approx(
        0.14104739588693907, rel=1e-14
    )
