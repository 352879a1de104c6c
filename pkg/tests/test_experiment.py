import numpy as np
import pytest

from steersim.errors import DomainError, EstimationError
from steersim.experiment import (
    CountTable,
    Estimate,
    bootstrap_steering_error,
    chsh_settings,
    estimate_chsh,
    estimate_steering,
    exact_counts,
    full_pipeline,
    outcome_probabilities,
    sample_counts,
    steering_settings,
    substream_seed,
)
from steersim.geometry import scheme_axes
from steersim.protocol import chsh_max
from steersim.states import werner

Z = np.array([0.0, 0.0, 1.0])
X = np.array([1.0, 0.0, 0.0])


def test_substream_seeds_are_deterministic_and_distinct():
    seeds = [substream_seed(12345, k) for k in range(64)]
    assert seeds == [substream_seed(12345, k) for k in range(64)]
    assert len(set(seeds)) == 64
    assert substream_seed(0, 0) != substream_seed(1, 0)
    for master, index in [(-1, 0), (0, -1)]:
        with pytest.raises(DomainError):
            substream_seed(master, index)


def test_outcome_probabilities_for_werner_states():
    # perfect anticorrelation: equal outcomes are impossible for the singlet
    probs = outcome_probabilities(werner(1.0), Z, Z)
    assert np.allclose(probs, [0.0, 0.5, 0.5, 0.0], atol=1e-12)
    assert probs.min() >= 0.0
    # p(A, B) = (1 - A*B*mu*(a.b))/4 with flat marginals
    for mu in (0.0, 0.3, 0.8):
        for a, b in [(Z, Z), (Z, X), (-Z, Z)]:
            probs = outcome_probabilities(werner(mu), a, b)
            signs = np.array([1.0, -1.0, -1.0, 1.0])
            expected = (1.0 - signs * mu * float(a @ b)) / 4.0
            assert np.abs(probs - expected).max() < 1e-12
            assert abs(probs.sum() - 1.0) < 1e-12


def test_outcome_probabilities_reject_single_qubit_states():
    with pytest.raises(DomainError):
        outcome_probabilities(0.5 * np.eye(2), Z, Z)


def test_count_table_validation():
    settings = steering_settings(scheme_axes(2))
    good = np.full((2, 4), 5.0)
    table = CountTable(settings=settings, counts=good, shots_target=20)
    assert not table.counts.flags.writeable
    with pytest.raises(DomainError):
        CountTable(settings=settings, counts=np.full((3, 4), 5.0), shots_target=20)
    with pytest.raises(DomainError):
        CountTable(settings=settings, counts=-good, shots_target=20)
    with pytest.raises(DomainError):
        CountTable(settings=np.empty((0, 2, 3)), counts=np.empty((0, 4)),
                   shots_target=20)


def test_estimate_validation():
    Estimate(value=0.5, std_error=0.01, method="analytic_propagation")
    Estimate(value=0.5, std_error=0.01, method="monte_carlo", resamples=100)
    with pytest.raises(DomainError):
        Estimate(value=0.5, std_error=-0.01, method="analytic_propagation")
    with pytest.raises(DomainError):
        Estimate(value=0.5, std_error=float("nan"), method="analytic_propagation")
    with pytest.raises(DomainError):
        Estimate(value=0.5, std_error=0.01, method="exact")
    with pytest.raises(DomainError):
        Estimate(value=0.5, std_error=0.01, method="monte_carlo")


def test_sampling_is_reproducible_per_seed():
    settings = steering_settings(scheme_axes(3))
    one = sample_counts(werner(0.7), settings, 1000, seed=42)
    two = sample_counts(werner(0.7), settings, 1000, seed=42)
    other = sample_counts(werner(0.7), settings, 1000, seed=43)
    assert np.array_equal(one.counts, two.counts)
    assert not np.array_equal(one.counts, other.counts)
    assert one.counts.dtype == float
    assert np.array_equal(one.counts, np.round(one.counts))


def test_singlet_never_produces_equal_outcomes():
    table = sample_counts(werner(1.0), [(Z, Z)], 10**6, seed=0)
    assert table.counts[0, 0] == 0.0
    assert table.counts[0, 3] == 0.0
    assert table.counts[0, 1] + table.counts[0, 2] > 0


def test_maximally_mixed_counts_are_flat_within_5_sigma():
    shots = 10**6
    table = sample_counts(0.25 * np.eye(4), [(Z, X)], shots, seed=7)
    sigma = np.sqrt(shots / 4.0)
    assert np.abs(table.counts[0] - shots / 4.0).max() < 5.0 * sigma


def test_sampled_correlations_track_the_state():
    shots = 10**4
    scheme = scheme_axes(3)
    table = sample_counts(werner(0.6), steering_settings(scheme), shots, seed=11)
    signs = np.array([1.0, -1.0, -1.0, 1.0])
    correlations = (table.counts @ signs) / table.counts.sum(axis=1)
    assert np.abs(correlations - 0.6).max() < 5.0 / np.sqrt(shots)


def test_efficiency_thins_totals_without_touching_correlations():
    shots = 10**5
    settings = steering_settings(scheme_axes(2))
    full = sample_counts(werner(0.5), settings, shots, seed=3)
    half = sample_counts(werner(0.5), settings, shots, seed=3, efficiency=0.5)
    ratio = half.counts.sum() / full.counts.sum()
    assert abs(ratio - 0.5) < 0.02
    signs = np.array([1.0, -1.0, -1.0, 1.0])
    est_full = (full.counts @ signs) / full.counts.sum(axis=1)
    est_half = (half.counts @ signs) / half.counts.sum(axis=1)
    assert np.abs(est_full - est_half).max() < 0.05
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            sample_counts(werner(0.5), settings, shots, seed=3, efficiency=bad)


def test_shots_must_be_positive():
    settings = steering_settings(scheme_axes(2))
    for builder in (lambda: sample_counts(werner(0.5), settings, 0, seed=1),
                    lambda: exact_counts(werner(0.5), settings, 0)):
        with pytest.raises(DomainError):
            builder()


@pytest.mark.parametrize("mu", [0.0, 0.45, 0.67, 1.0])
def test_exact_injection_recovers_the_steering_parameter(mu):
    scheme = scheme_axes(3)
    table = exact_counts(werner(mu), steering_settings(scheme), 10**4)
    report, estimate = estimate_steering(table, scheme)
    assert abs(report.s_value - mu) < 1e-12
    assert estimate.value == report.s_value
    assert estimate.method == "analytic_propagation"
    assert report.violated == (mu > report.bound)


def test_exact_injection_recovers_the_chsh_combination():
    mu = 0.8
    bell = chsh_max(werner(mu))
    table = exact_counts(werner(mu), chsh_settings(*bell.settings), 10**4)
    estimate, violated = estimate_chsh(table)
    assert abs(estimate.value - 2.0 * np.sqrt(2.0) * mu) < 1e-12
    assert violated == (estimate.value > 2.0)


def test_estimators_reject_zero_and_mismatched_tables():
    scheme = scheme_axes(2)
    settings = steering_settings(scheme)
    zero = CountTable(settings=settings, counts=np.zeros((2, 4)), shots_target=10)
    with pytest.raises(EstimationError):
        estimate_steering(zero, scheme)
    swapped = CountTable(settings=settings[:, ::-1, :],
                         counts=np.full((2, 4), 5.0), shots_target=10)
    with pytest.raises(DomainError):
        estimate_steering(swapped, scheme)
    with pytest.raises(DomainError):
        estimate_steering(zero, scheme_axes(3))
    with pytest.raises(DomainError):
        bootstrap_steering_error(swapped, scheme)
    three = CountTable(settings=settings[:1].repeat(3, axis=0),
                       counts=np.full((3, 4), 5.0), shots_target=10)
    with pytest.raises(DomainError):
        estimate_chsh(three)


@pytest.mark.parametrize("shots", [10**3, 10**4])
def test_delta_method_matches_bootstrap(shots):
    scheme = scheme_axes(3)
    table = sample_counts(werner(0.67), steering_settings(scheme), shots, seed=19)
    _, delta = estimate_steering(table, scheme)
    boot = bootstrap_steering_error(table, scheme, resamples=2000, seed=5)
    assert boot.method == "monte_carlo"
    assert boot.resamples == 2000
    assert boot.value == pytest.approx(delta.value)
    assert abs(boot.std_error - delta.std_error) / delta.std_error < 0.10
    with pytest.raises(DomainError):
        bootstrap_steering_error(table, scheme, resamples=1)


def test_estimator_error_shrinks_like_root_shots():
    scheme = scheme_axes(3)
    settings = steering_settings(scheme)
    rho = werner(0.6)
    scaled = []
    for shots in (10**2, 10**3, 10**4, 10**5):
        errors = []
        for seed in range(40):
            table = sample_counts(rho, settings, shots, seed=seed)
            report, _ = estimate_steering(table, scheme)
            errors.append(report.s_value - 0.6)
        rms = float(np.sqrt(np.mean(np.square(errors))))
        scaled.append(rms * np.sqrt(shots))
    assert max(scaled) / min(scaled) < 3.0


def test_samples_do_not_signal():
    # Bob's marginal must not depend on Alice's axis choice.
    rho = werner(0.8)
    shots = 1000
    bob_plus = np.zeros(2)
    totals = np.zeros(2)
    for seed in range(100):
        for i, alice_axis in enumerate((Z, X)):
            table = sample_counts(rho, [(alice_axis, Z)], shots, seed=seed + 1000 * i)
            counts = table.counts[0]
            bob_plus[i] += counts[0] + counts[2]
            totals[i] += counts.sum()
    fractions = bob_plus / totals
    pooled = bob_plus.sum() / totals.sum()
    z = abs(fractions[0] - fractions[1]) / np.sqrt(
        pooled * (1.0 - pooled) * (1.0 / totals[0] + 1.0 / totals[1])
    )
    assert z < 5.0


def test_full_pipeline_flags_chsh_and_steering_for_strong_states():
    bundle = full_pipeline(0.84, 2, 10**4, seed=1, correction_restarts=4)
    assert bundle["exact"]["violated"]
    assert bundle["exact"]["chsh_violated"]
    assert bundle["sampled"]["s_violated"]
    assert bundle["sampled"]["b_violated"]
    assert bundle["exact"]["b_max"] == pytest.approx(2.0 * np.sqrt(2.0) * 0.84)
    assert bundle["exact"]["regime"] == "chsh_violating"


def test_full_pipeline_separates_n6_from_n4():
    bundle = full_pipeline(0.57, 6, 10**4, seed=2, correction_restarts=4)
    assert bundle["exact"]["violated"]
    assert bundle["sampled"]["s_violated"]
    assert bundle["exact"]["violations_by_n"]["6"]
    assert bundle["exact"]["violations_by_n"]["10"]
    assert not bundle["exact"]["violations_by_n"]["4"]
    assert not bundle["exact"]["chsh_violated"]


def test_full_pipeline_reports_unsteerable_entanglement():
    bundle = full_pipeline(0.45, 3, 10**4, seed=3, correction_restarts=4)
    assert not bundle["exact"]["violated"]
    assert not bundle["sampled"]["s_violated"]
    assert bundle["exact"]["regime"] == "entangled_unsteerable"
    assert bundle["tomography"]["regime_estimated"] == "entangled_unsteerable"
    assert abs(bundle["tomography"]["mu_hat"] - 0.45) < 0.05
    assert bundle["tomography"]["fidelity_to_exact"] > 0.99


def test_full_pipeline_is_deterministic_for_a_seed():
    kwargs = dict(mu=0.67, n=3, shots=2000, seed=9, correction_restarts=2)
    assert full_pipeline(**kwargs) == full_pipeline(**kwargs)
