"""Counting-statistics simulation of the steering experiment.

Counts are Poisson per outcome (free-running coincidence accumulation, so
``shots`` is a target mean, not an exact total), with one RNG substream
per setting so sampling parallelizes without changing results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bounds import steering_bound
from .errors import DomainError, EstimationError, InternalError
from .geometry import SUPPORTED_SETTINGS, MeasurementScheme, scheme_axes
from .linalg import IDENTITY_2, as_density_matrix, fidelity, kron, pauli_along
from .protocol import chsh_max, honest_steering, SteeringReport
from .states import classify, find_local_correction, state_character, werner

# Outcome column order for every CountTable: Alice sign, Bob sign.
OUTCOME_SIGNS = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
OUTCOME_SIGNS.setflags(write=False)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class CountTable:
    """Per-setting coincidence counts in the OUTCOME_SIGNS column order.

    Counts are held as non-negative reals rather than integers so exact
    expected counts can be injected through the same estimator path;
    sampled tables always hold whole numbers.
    """

    settings: np.ndarray
    counts: np.ndarray
    shots_target: int

    def __post_init__(self):
        settings = np.asarray(self.settings, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        if settings.ndim != 3 or settings.shape[1:] != (2, 3) or len(settings) == 0:
            raise DomainError(
                "settings must be a non-empty (m, 2, 3) array of axis pairs"
            )
        if counts.shape != (len(settings), 4):
            raise DomainError(
                f"counts must have shape ({len(settings)}, 4), got {counts.shape}"
            )
        if counts.min() < 0.0:
            raise DomainError("counts must be non-negative")
        settings.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "counts", counts)


@dataclass(frozen=True)
class Estimate:
    """Point estimate with a one-standard-deviation error."""

    value: float
    std_error: float
    method: str
    resamples: Optional[int] = None

    def __post_init__(self):
        if not np.isfinite(self.std_error) or self.std_error < 0.0:
            raise DomainError(f"std_error must be finite and >= 0, got {self.std_error!r}")
        if self.method not in ("analytic_propagation", "monte_carlo"):
            raise DomainError(f"unknown estimate method {self.method!r}")
        if self.method == "monte_carlo" and self.resamples is None:
            raise DomainError("monte_carlo estimates must record the resample count")


def _splitmix64(value: int) -> int:
    value = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = value
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def substream_seed(master: int, index: int) -> int:
    """Derived seed for substream ``index``: master XOR hashed index."""
    if master < 0 or index < 0:
        raise DomainError("seeds and stream indices must be non-negative")
    return (master & _MASK64) ^ _splitmix64(index)


def outcome_probabilities(rho, alice_axis, bob_axis) -> np.ndarray:
    """The four joint outcome probabilities for one setting pair."""
    rho = as_density_matrix(rho)
    if rho.shape != (4, 4):
        raise DomainError("outcome probabilities need a two-qubit state")
    sa = pauli_along(alice_axis)
    sb = pauli_along(bob_axis)
    probs = np.empty(4)
    for i, (sign_a, sign_b) in enumerate(OUTCOME_SIGNS):
        projector = kron(
            0.5 * (IDENTITY_2 + sign_a * sa), 0.5 * (IDENTITY_2 + sign_b * sb)
        )
        probs[i] = float(np.trace(projector @ rho).real)
    if abs(probs.sum() - 1.0) > 1e-9:
        raise InternalError(
            f"outcome probabilities sum to {probs.sum()!r}, expected 1"
        )
    # Exact (anti)correlations can land at -1e-17; that is a zero.
    return np.clip(probs, 0.0, None)


def _as_settings(settings) -> np.ndarray:
    arr = np.asarray(settings, dtype=float)
    if arr.ndim != 3 or arr.shape[1:] != (2, 3):
        raise DomainError("settings must be a sequence of (alice, bob) axis pairs")
    return arr


def sample_counts(rho, settings, shots: int, seed: int,
                  efficiency: float = 1.0) -> CountTable:
    """Poisson-sampled coincidence counts, one RNG substream per setting.

    ``efficiency`` uniformly scales every Poisson mean; it thins totals
    without touching correlations.
    """
    settings = _as_settings(settings)
    shots = int(shots)
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    if not 0.0 < efficiency <= 1.0:
        raise DomainError(f"efficiency must lie in (0, 1], got {efficiency!r}")
    counts = np.empty((len(settings), 4))
    for k, (alice_axis, bob_axis) in enumerate(settings):
        rng = np.random.default_rng(substream_seed(seed, k))
        means = shots * efficiency * outcome_probabilities(rho, alice_axis, bob_axis)
        counts[k] = rng.poisson(means)
    return CountTable(settings=settings, counts=counts, shots_target=shots)


def exact_counts(rho, settings, shots: int) -> CountTable:
    """Expected (noise-free) counts: shots times each outcome probability."""
    settings = _as_settings(settings)
    shots = int(shots)
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    counts = np.array(
        [shots * outcome_probabilities(rho, a, b) for a, b in settings]
    )
    return CountTable(settings=settings, counts=counts, shots_target=shots)


def steering_settings(scheme: MeasurementScheme) -> np.ndarray:
    """Axis pairs for the steering run: Alice along -u_k, Bob along u_k."""
    return np.stack([np.stack([-axis, axis]) for axis in scheme.axes])


def chsh_settings(a1, a2, b1, b2) -> np.ndarray:
    """The four CHSH axis pairs in combination order (+, +, +, -)."""
    return _as_settings([(a1, b1), (a1, b2), (a2, b1), (a2, b2)])


def _correlation_estimates(counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-setting correlation estimates and delta-method variances.

    E_hat = S/T with S the sign-weighted sum and T the total; independent
    Poisson outcome variances propagate to
    var = [(T-S)^2 (N++ + N--) + (T+S)^2 (N+- + N-+)] / T^4.
    """
    totals = counts.sum(axis=1)
    if np.any(totals <= 0.0):
        bad = int(np.argmin(totals))
        raise EstimationError(f"setting {bad} has zero total counts")
    outcome_signs = OUTCOME_SIGNS[:, 0] * OUTCOME_SIGNS[:, 1]
    signed = counts @ outcome_signs
    est = signed / totals
    agree = counts[:, 0] + counts[:, 3]
    disagree = counts[:, 1] + counts[:, 2]
    var = (
        (totals - signed) ** 2 * agree + (totals + signed) ** 2 * disagree
    ) / totals**4
    return est, var


def _require_steering_table(table: CountTable, scheme: MeasurementScheme):
    expected = steering_settings(scheme)
    if table.settings.shape != expected.shape or \
            np.abs(table.settings - expected).max() > 1e-9:
        raise DomainError("count table settings do not match the steering scheme")


def estimate_steering(table: CountTable,
                      scheme: MeasurementScheme) -> tuple[SteeringReport, Estimate]:
    """Steering parameter estimate with analytic error propagation."""
    _require_steering_table(table, scheme)
    est, var = _correlation_estimates(table.counts)
    s_value = float(est.mean())
    std_error = float(np.sqrt(var.sum()) / scheme.n)
    bound = steering_bound(scheme).value
    report = SteeringReport(
        n=scheme.n, s_value=s_value, bound=bound,
        violated=s_value > bound, per_setting=est,
    )
    return report, Estimate(value=s_value, std_error=std_error,
                            method="analytic_propagation")


def bootstrap_steering_error(table: CountTable, scheme: MeasurementScheme,
                             resamples: int = 1000, seed: int = 0) -> Estimate:
    """Parametric bootstrap of the steering estimate's standard error.

    Redraws every count Poisson around its observed value and re-runs the
    estimator; the spread of resampled values is the error.
    """
    _require_steering_table(table, scheme)
    resamples = int(resamples)
    if resamples < 2:
        raise DomainError(f"need at least 2 resamples, got {resamples}")
    est, _ = _correlation_estimates(table.counts)
    rng = np.random.default_rng(seed)
    redrawn = rng.poisson(table.counts, size=(resamples,) + table.counts.shape)
    totals = redrawn.sum(axis=2)
    outcome_signs = OUTCOME_SIGNS[:, 0] * OUTCOME_SIGNS[:, 1]
    signed = redrawn @ outcome_signs
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = np.where(totals > 0, signed / totals, 0.0)
    values = ratios.mean(axis=1)
    return Estimate(
        value=float(est.mean()),
        std_error=float(values.std(ddof=1)),
        method="monte_carlo",
        resamples=resamples,
    )


def estimate_chsh(table: CountTable) -> tuple[Estimate, bool]:
    """CHSH estimate from a four-setting table in chsh_settings order."""
    if len(table.settings) != 4:
        raise DomainError(f"CHSH needs exactly 4 settings, got {len(table.settings)}")
    est, var = _correlation_estimates(table.counts)
    combo = est[0] + est[1] + est[2] - est[3]
    b_hat = abs(float(combo))
    estimate = Estimate(
        value=b_hat, std_error=float(np.sqrt(var.sum())),
        method="analytic_propagation",
    )
    return estimate, b_hat > 2.0


def _estimate_payload(estimate: Estimate) -> dict:
    payload = {
        "value": estimate.value,
        "std_error": estimate.std_error,
        "method": estimate.method,
    }
    if estimate.resamples is not None:
        payload["resamples"] = estimate.resamples
    return payload


def full_pipeline(mu: float, n: int, shots: int, seed: int,
                  correction_restarts: int = 20) -> dict:
    """Preparation, sampling, estimation, tomography, classification.

    Returns a JSON-ready bundle with exact values next to their sampled
    estimates so honest runs can be audited against theory.
    """
    from .tomography import tomography, tomography_settings

    rho = werner(mu)
    scheme = scheme_axes(n)
    honest = honest_steering(rho, scheme)
    bell = chsh_max(rho)
    violations = {
        str(k): bool(honest_steering(rho, scheme_axes(k)).violated)
        for k in SUPPORTED_SETTINGS
    }

    steer_table = sample_counts(
        rho, steering_settings(scheme), shots, substream_seed(seed, 1)
    )
    steer_report, steer_est = estimate_steering(steer_table, scheme)
    steer_boot = bootstrap_steering_error(
        steer_table, scheme, seed=substream_seed(seed, 2)
    )
    bell_table = sample_counts(
        rho, chsh_settings(*bell.settings), shots, substream_seed(seed, 3)
    )
    bell_est, bell_violated = estimate_chsh(bell_table)

    tomo_table = sample_counts(
        rho, tomography_settings(), shots, substream_seed(seed, 4)
    )
    rho_hat = tomography(tomo_table)
    correction = find_local_correction(
        rho_hat, restarts=correction_restarts, seed=substream_seed(seed, 5)
    )
    character = state_character(rho_hat, correction.mu_hat)

    return {
        "mu": float(mu),
        "n": int(n),
        "shots": int(shots),
        "seed": int(seed),
        "exact": {
            "s_value": honest.s_value,
            "bound": honest.bound,
            "violated": bool(honest.violated),
            "b_max": bell.b_value,
            "chsh_violated": bool(bell.violated),
            "regime": classify(mu),
            "violations_by_n": violations,
        },
        "sampled": {
            "s_hat": _estimate_payload(steer_est),
            "s_bootstrap": _estimate_payload(steer_boot),
            "s_violated": bool(steer_report.violated),
            "b_hat": _estimate_payload(bell_est),
            "b_violated": bool(bell_violated),
        },
        "tomography": {
            "mu_hat": correction.mu_hat,
            "residual_cost": correction.residual_cost,
            "fidelity_to_exact": fidelity(rho_hat, rho),
            "tangle": character.tangle,
            "linear_entropy": character.linear_entropy,
            "regime_estimated": character.regime,
        },
    }
