import numpy as np
import pytest

from helpers import random_density, random_unit_vector
from steersim.bounds import steering_bound
from steersim.errors import DomainError
from steersim.geometry import SUPPORTED_SETTINGS, scheme_axes
from steersim.linalg import IDENTITY_2, kron
from steersim.protocol import (
    LhsEnsemble,
    OPTIMAL_ENSEMBLE_KIND,
    TSIRELSON,
    cheat_steering,
    chsh_max,
    chsh_value,
    correlation,
    correlation_matrix,
    honest_steering,
    make_ensemble,
)
from steersim.states import werner

Z = np.array([0.0, 0.0, 1.0])
X = np.array([1.0, 0.0, 0.0])
# canonical CHSH settings: Bob halfway between Alice's axes
B1 = -(Z + X) / np.sqrt(2)
B2 = (X - Z) / np.sqrt(2)

# cheating values of the non-optimal ensemble kind, frozen from a direct
# mean-|dot| enumeration of the figures
SUBOPTIMAL_VALUES = {
    2: ("vertex", 0.5),
    3: ("vertex", 1 / 3),
    4: ("vertex", 0.5),
    6: ("dual", 0.5143111781920757),
    10: ("dual", 0.5143111781920757),
}


def test_correlation_is_minus_mu_times_overlap():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = random_unit_vector(rng)
        b = random_unit_vector(rng)
        for mu in (0.0, 0.5, 1.0):
            value = correlation(werner(mu), a, b)
            assert abs(value + mu * np.dot(a, b)) < 1e-12


@pytest.mark.parametrize("n", SUPPORTED_SETTINGS)
def test_honest_werner_sweep_equals_mu(n):
    scheme = scheme_axes(n)
    for mu in np.linspace(0.0, 1.0, 11):
        report = honest_steering(werner(mu), scheme)
        assert abs(report.s_value - mu) < 1e-12
        assert np.abs(np.asarray(report.per_setting) - mu).max() < 1e-12
        assert report.violated == (mu > report.bound)
        assert abs(report.s_value - np.mean(report.per_setting)) < 1e-12


def test_honest_uncorrelated_states():
    assert honest_steering(werner(0.0), scheme_axes(3)).s_value == 0.0
    product = kron(0.5 * IDENTITY_2, 0.5 * IDENTITY_2)
    assert honest_steering(product, scheme_axes(4)).s_value == 0.0


def test_make_ensemble_examples():
    dual3 = make_ensemble(3, "dual")
    assert len(dual3.states) == 8
    assert np.allclose(dual3.weights, 1 / 8)
    corner = np.array([1.0, 1.0, 1.0]) / np.sqrt(3)
    assert np.min(np.linalg.norm(dual3.states - corner, axis=1)) < 1e-12

    vertex6 = make_ensemble(6, "vertex")
    assert len(vertex6.states) == 12
    assert np.allclose(vertex6.weights, 1 / 12)

    dual2 = make_ensemble(2, "dual")
    assert len(dual2.states) == 4
    assert np.abs(np.abs(dual2.states[:, :2]) - 2**-0.5).max() < 1e-12

    with pytest.raises(DomainError):
        make_ensemble(3, "faces")
    with pytest.raises(DomainError):
        make_ensemble(5, "dual")


def test_ensemble_validation():
    ok = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    with pytest.raises(DomainError):
        LhsEnsemble(states=ok, weights=np.array([0.6, 0.6]))
    with pytest.raises(DomainError):
        LhsEnsemble(states=ok, weights=np.array([1.5, -0.5]))
    with pytest.raises(DomainError):
        LhsEnsemble(states=ok * 2.0, weights=np.array([0.5, 0.5]))
    with pytest.raises(DomainError):
        LhsEnsemble(states=ok, weights=np.array([1.0]))


@pytest.mark.parametrize("n", SUPPORTED_SETTINGS)
def test_optimal_ensembles_saturate_the_bound(n):
    scheme = scheme_axes(n)
    kind = OPTIMAL_ENSEMBLE_KIND[n]
    report = cheat_steering(make_ensemble(n, kind), scheme)
    # Exact saturation can land one ulp either side of the bound, so only
    # the magnitude of the gap is pinned here, not the strict violated flag.
    assert abs(report.s_value - report.bound) < 1e-12


@pytest.mark.parametrize("n", SUPPORTED_SETTINGS)
def test_per_state_uniformity_of_optimal_ensembles(n):
    scheme = scheme_axes(n)
    ensemble = make_ensemble(n, OPTIMAL_ENSEMBLE_KIND[n])
    per_state = np.abs(ensemble.states @ scheme.axes.T).mean(axis=1)
    bound = steering_bound(scheme).value
    assert np.abs(per_state - bound).max() < 1e-12


@pytest.mark.parametrize("n", SUPPORTED_SETTINGS)
def test_suboptimal_ensembles_fall_short(n):
    kind, expected = SUBOPTIMAL_VALUES[n]
    report = cheat_steering(make_ensemble(n, kind), scheme_axes(n))
    assert abs(report.s_value - expected) < 1e-12
    if n != 10:
        assert report.bound - report.s_value > 1e-3


def test_custom_response_rule():
    states = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    ensemble = LhsEnsemble(
        states=states, weights=np.array([0.5, 0.5]),
        response_rule=lambda j, axis: 1,
    )
    report = cheat_steering(ensemble, scheme_axes(3))
    assert abs(report.s_value) < 1e-12

    broken = LhsEnsemble(
        states=states, weights=np.array([0.5, 0.5]),
        response_rule=lambda j, axis: 0,
    )
    with pytest.raises(DomainError):
        cheat_steering(broken, scheme_axes(3))


def test_random_ensembles_never_beat_the_bound():
    rng = np.random.default_rng(77)
    for n in SUPPORTED_SETTINGS:
        scheme = scheme_axes(n)
        bound = steering_bound(scheme).value
        for _ in range(40):
            m = int(rng.integers(1, 65))
            states = rng.normal(size=(m, 3))
            states /= np.linalg.norm(states, axis=1, keepdims=True)
            weights = rng.uniform(size=m)
            weights /= weights.sum()
            report = cheat_steering(
                LhsEnsemble(states=states, weights=weights), scheme
            )
            assert report.s_value <= bound + 1e-9


def test_chsh_value_canonical_settings():
    report = chsh_value(werner(1.0), Z, X, B1, B2)
    assert abs(report.b_value - TSIRELSON) < 1e-12
    assert report.violated
    for mu in np.linspace(0.0, 1.0, 11):
        value = chsh_value(werner(mu), Z, X, B1, B2).b_value
        assert abs(value - TSIRELSON * mu) < 1e-12
    product = kron(0.5 * IDENTITY_2, 0.5 * IDENTITY_2)
    assert chsh_value(product, Z, X, B1, B2).b_value == 0.0
    with pytest.raises(DomainError):
        chsh_value(werner(1.0), 2 * Z, X, B1, B2)


def test_chsh_value_never_exceeds_tsirelson():
    rng = np.random.default_rng(13)
    for _ in range(50):
        rho = random_density(rng)
        axes = [random_unit_vector(rng) for _ in range(4)]
        report = chsh_value(rho, *axes)
        assert report.b_value <= TSIRELSON + 1e-9
        assert report.violated == (report.b_value > 2.0)


def test_chsh_max_on_werner_states():
    for mu in np.linspace(0.0, 1.0, 21):
        report = chsh_max(werner(mu))
        assert abs(report.b_value - TSIRELSON * mu) < 1e-9
    boundary = chsh_max(werner(2**-0.5))
    assert abs(boundary.b_value - 2.0) < 1e-9
    assert not boundary.violated
    below = chsh_max(werner(0.6))
    assert abs(below.b_value - 1.6970562748477140) < 1e-9
    assert not below.violated
    assert honest_steering(werner(0.6), scheme_axes(3)).violated


def test_chsh_max_settings_attain_the_value():
    rng = np.random.default_rng(29)
    for _ in range(10):
        rho = random_density(rng)
        report = chsh_max(rho)
        redone = chsh_value(rho, *report.settings)
        assert abs(redone.b_value - report.b_value) < 1e-9


def _alternating_chsh(t_matrix, rng, starts=20, sweeps=60):
    """Seeded alternating maximization over CHSH settings."""
    best = 0.0
    for _ in range(starts):
        b1 = random_unit_vector(rng)
        b2 = random_unit_vector(rng)
        for _ in range(sweeps):
            a1 = t_matrix @ (b1 + b2)
            a2 = t_matrix @ (b1 - b2)
            for v in (a1, a2):
                norm = np.linalg.norm(v)
                if norm > 1e-12:
                    v /= norm
            b1 = t_matrix.T @ (a1 + a2)
            b2 = t_matrix.T @ (a1 - a2)
            for v in (b1, b2):
                norm = np.linalg.norm(v)
                if norm > 1e-12:
                    v /= norm
        value = abs(
            a1 @ t_matrix @ b1 + a1 @ t_matrix @ b2
            + a2 @ t_matrix @ b1 - a2 @ t_matrix @ b2
        )
        best = max(best, value)
    return best


def test_chsh_max_matches_direct_optimization():
    rng = np.random.default_rng(41)
    for _ in range(8):
        rho = random_density(rng)
        closed_form = chsh_max(rho).b_value
        direct = _alternating_chsh(correlation_matrix(rho), rng)
        assert abs(closed_form - direct) < 1e-6
