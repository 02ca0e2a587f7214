"""Trajectory-sampling statistics, determinism, and the estimator chain.

All Monte Carlo assertions run with frozen seeds; error bars are quoted in
standard errors of the corresponding estimator.
"""

import math

import numpy as np
import pytest

from ghz_sensing.estimation import ExperimentConfig, variance_ideal
from ghz_sensing.montecarlo import (
    EstimatorSaturationWarning,
    TrajectoryConfig,
    empirical_mse,
    ensemble_coherence,
    invert_probability,
    sample_trajectories,
    simulate_measurements,
)
from ghz_sensing.noise import (
    KERNEL_PEAK,
    ClassicalNoiseParams,
    DephasingModel,
    coherence,
    correlation,
)

PARAMS = ClassicalNoiseParams(coupling=0.25, correlation_time=1.0)
MODEL = DephasingModel.classical_gaussian(PARAMS)
NOISELESS_PARAMS = ClassicalNoiseParams(coupling=0.0, correlation_time=1.0)
NOISELESS = DephasingModel.classical_gaussian(NOISELESS_PARAMS)


def test_field_statistics_match_kernel():
    config = TrajectoryConfig(t_max=1.0, grid_points=21, num_trajectories=100_000, seed=101)
    ensemble = sample_trajectories(PARAMS, config, keep_paths=True)
    fields = ensemble.paths
    n = config.num_trajectories

    # zero mean at a fixed grid point, within 4 standard errors
    point = fields[:, 10]
    se_mean = math.sqrt(KERNEL_PEAK / n)
    assert abs(point.mean()) <= 4 * se_mean

    # variance equals the kernel peak 2/sqrt(pi)
    se_var = KERNEL_PEAK * math.sqrt(2.0 / (n - 1))
    assert abs(point.var(ddof=1) - KERNEL_PEAK) <= 4 * se_var

    # covariance at lag 1.0 equals the kernel value there
    lagged = np.cov(fields[:, 0], fields[:, 20], ddof=1)[0, 1]
    expected = correlation(0.0, 1.0, PARAMS)
    se_cov = math.sqrt((KERNEL_PEAK**2 + expected**2) / n)
    assert abs(lagged - expected) <= 4 * se_cov


def test_field_is_gaussian_fourth_moment():
    config = TrajectoryConfig(t_max=1.0, grid_points=21, num_trajectories=100_000, seed=202)
    ensemble = sample_trajectories(PARAMS, config, keep_paths=True)
    point = ensemble.paths[:, 7]
    standardized = (point - point.mean()) / point.std(ddof=1)
    kurtosis = np.mean(standardized**4)
    se = math.sqrt(24.0 / config.num_trajectories)
    assert abs(kurtosis - 3.0) <= 5 * se


def test_determinism_and_thread_invariance():
    config = TrajectoryConfig(t_max=1.0, grid_points=41, num_trajectories=20_000, seed=7)
    first = sample_trajectories(PARAMS, config)
    second = sample_trajectories(PARAMS, config)
    threaded = sample_trajectories(PARAMS, config, num_threads=4)
    auto = sample_trajectories(PARAMS, config, num_threads=0)
    np.testing.assert_array_equal(first.phases, second.phases)
    np.testing.assert_array_equal(first.phases, threaded.phases)
    np.testing.assert_array_equal(first.phases, auto.phases)
    other = sample_trajectories(PARAMS, TrajectoryConfig(1.0, 41, 20_000, seed=8))
    assert not np.array_equal(first.phases, other.phases)


def test_step_enforcement():
    too_coarse = TrajectoryConfig(t_max=10.0, grid_points=21, num_trajectories=100, seed=1)
    with pytest.raises(ValueError, match="correlation_time/20"):
        sample_trajectories(PARAMS, too_coarse)


def test_zero_coupling_is_exact():
    config = TrajectoryConfig(t_max=1.0, grid_points=41, num_trajectories=500, seed=3)
    ensemble = sample_trajectories(NOISELESS_PARAMS, config)
    assert np.all(ensemble.phases == 0.0)
    magnitude, std_error = ensemble_coherence(ensemble)
    assert magnitude == 1.0
    assert std_error <= 1e-12  # pure round-off on identical unit vectors


def test_coherence_matches_closed_form_rate():
    for t_max, grid_points in ((0.2, 41), (1.0, 41)):
        config = TrajectoryConfig(t_max=t_max, grid_points=grid_points,
                                  num_trajectories=30_000, seed=404)
        magnitude, std_error = ensemble_coherence(sample_trajectories(PARAMS, config))
        analytic = coherence(t_max, 1, MODEL)
        assert abs(magnitude - analytic) <= 3 * std_error


def test_multi_spin_exponent_consistency():
    # summing independent per-spin phases reproduces the L-fold decay exponent
    num_spins, t_max = 3, 1.0
    total_phases = np.zeros(30_000)
    for spin in range(num_spins):
        config = TrajectoryConfig(t_max=t_max, grid_points=41,
                                  num_trajectories=30_000, seed=500 + spin)
        total_phases += sample_trajectories(PARAMS, config).phases
    combined = sample_trajectories(PARAMS, TrajectoryConfig(t_max, 41, 30_000, seed=500))
    summed = type(combined)(phases=total_phases, meta=combined.meta)
    magnitude, std_error = ensemble_coherence(summed)
    analytic = coherence(t_max, num_spins, MODEL)
    assert abs(magnitude - analytic) <= 3 * std_error


def test_grid_refinement_stability():
    coarse_cfg = TrajectoryConfig(t_max=1.0, grid_points=21, num_trajectories=50_000, seed=606)
    fine_cfg = TrajectoryConfig(t_max=1.0, grid_points=41, num_trajectories=50_000, seed=607)
    coarse, se_coarse = ensemble_coherence(sample_trajectories(PARAMS, coarse_cfg))
    fine, se_fine = ensemble_coherence(sample_trajectories(PARAMS, fine_cfg))
    assert abs(coarse - fine) <= math.sqrt(se_coarse**2 + se_fine**2)


def test_ensemble_coherence_requires_enough_trajectories():
    config = TrajectoryConfig(t_max=0.5, grid_points=11, num_trajectories=50, seed=1)
    with pytest.raises(ValueError):
        ensemble_coherence(sample_trajectories(PARAMS, config))


def test_invert_probability_identity_on_principal_branch():
    from ghz_sensing.estimation import signal_probability

    for phase in np.linspace(0.1, math.pi - 0.1, 9):
        cfg = ExperimentConfig(num_spins=4, exposure_time=0.5, total_time=10.0,
                               detuning=phase / 2.0)
        estimate, clamped = invert_probability(signal_probability(cfg, MODEL), cfg, MODEL)
        assert not clamped
        assert estimate == pytest.approx(cfg.detuning, rel=1e-12)


def test_invert_probability_clamps_out_of_envelope():
    cfg = ExperimentConfig(num_spins=4, exposure_time=0.5, total_time=10.0, detuning=0.3)
    estimate, clamped = invert_probability(1.0, cfg, MODEL)
    assert clamped
    assert estimate == 0.0


def test_simulate_measurements_certain_outcome():
    cfg = ExperimentConfig(num_spins=3, exposure_time=0.5, total_time=100.0, detuning=0.0)
    run = simulate_measurements(cfg, NOISELESS, seed=9)
    assert run.shots == 200
    assert run.counts == 200
    assert run.delta_hat == 0.0
    again = simulate_measurements(cfg, NOISELESS, seed=9)
    assert run == again


def test_empirical_mse_noiseless_matches_binomial_propagation():
    cfg = ExperimentConfig(num_spins=4, exposure_time=0.5, total_time=2000.0,
                           detuning=math.pi / 4.0)
    result = empirical_mse(cfg, NOISELESS, repetitions=300, seed=77)
    assert not result.saturated
    assert abs(result.mse - variance_ideal(cfg)) <= 3 * result.std_error


def test_empirical_mse_halves_with_doubled_budget():
    base = ExperimentConfig(num_spins=4, exposure_time=0.5, total_time=1000.0,
                            detuning=math.pi / 4.0)
    doubled = ExperimentConfig(num_spins=4, exposure_time=0.5, total_time=2000.0,
                               detuning=math.pi / 4.0)
    short = empirical_mse(base, MODEL, repetitions=400, seed=88)
    long = empirical_mse(doubled, MODEL, repetitions=400, seed=89)
    assert abs(long.mse / short.mse - 0.5) <= 0.1


def test_empirical_mse_saturation_flag():
    # deep decay: the fringe envelope collapses and the clamp dominates
    heavy = DephasingModel.classical_gaussian(ClassicalNoiseParams(0.6, 1.0))
    cfg = ExperimentConfig(num_spins=8, exposure_time=2.0, total_time=100.0,
                           detuning=math.pi / 32.0)
    with pytest.warns(EstimatorSaturationWarning):
        result = empirical_mse(cfg, heavy, repetitions=100, seed=99)
    assert result.saturated
    assert result.clamp_fraction > 0.01


def test_empirical_mse_preconditions():
    cfg = ExperimentConfig(num_spins=4, exposure_time=0.5, total_time=100.0,
                           detuning=math.pi / 4.0)
    with pytest.raises(ValueError):
        empirical_mse(cfg, MODEL, repetitions=50, seed=1)
    node = ExperimentConfig(num_spins=4, exposure_time=0.5, total_time=100.0, detuning=0.0)
    with pytest.raises(ValueError):
        empirical_mse(node, MODEL, repetitions=100, seed=1)


def test_trajectory_config_validation():
    with pytest.raises(ValueError):
        TrajectoryConfig(t_max=0.0, grid_points=10, num_trajectories=10, seed=0)
    with pytest.raises(ValueError):
        TrajectoryConfig(t_max=1.0, grid_points=1, num_trajectories=10, seed=0)
    with pytest.raises(ValueError):
        TrajectoryConfig(t_max=1.0, grid_points=10, num_trajectories=0, seed=0)
