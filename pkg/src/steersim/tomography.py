"""Two-qubit state reconstruction from coincidence count tables.

Linear inversion seeds an iterative maximum-likelihood fixed point
(R rho R) on the multinomial likelihood; the result is eigen-clipped and
renormalized so it satisfies the density-matrix invariants exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, EstimationError
from .experiment import OUTCOME_SIGNS, CountTable
from .linalg import IDENTITY_2, hermitian_part, kron, pauli_along

_PROB_FLOOR = 1e-12
_START_FLOOR = 1e-10


def tomography_settings() -> np.ndarray:
    """The nine Pauli-pair settings (x, y, z on each side).

    With four outcomes per setting this is the standard 36-projection
    tomography set; its design matrix has full rank 16.
    """
    axes = np.eye(3)
    return np.stack(
        [np.stack([a, b]) for a in axes for b in axes]
    )


def _flat_projectors(settings: np.ndarray) -> np.ndarray:
    """All outcome projectors, flattened over (setting, outcome)."""
    out = np.empty((len(settings) * 4, 4, 4), dtype=complex)
    for k, (alice_axis, bob_axis) in enumerate(settings):
        sa = pauli_along(alice_axis)
        sb = pauli_along(bob_axis)
        for i, (sign_a, sign_b) in enumerate(OUTCOME_SIGNS):
            out[4 * k + i] = kron(
                0.5 * (IDENTITY_2 + sign_a * sa),
                0.5 * (IDENTITY_2 + sign_b * sb),
            )
    return out


def _linear_inversion(projectors: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    # Tr(P rho) = <vec(P), vec(rho)> for Hermitian P, so least squares on
    # the conjugated vectorized projectors recovers rho.
    design = projectors.conj().reshape(len(projectors), 16)
    solution, *_ = np.linalg.lstsq(design, freqs.astype(complex), rcond=None)
    rho = hermitian_part(solution.reshape(4, 4))
    return rho / rho.trace().real


def _clip_spectrum(rho: np.ndarray, floor: float) -> np.ndarray:
    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, floor, None)
    vals = vals / vals.sum()
    return (vecs * vals) @ vecs.conj().T


def tomography(table: CountTable, max_iterations: int = 5000,
               loglike_tol: float = 1e-10) -> np.ndarray:
    """Maximum-likelihood density matrix for the observed counts.

    Raises :class:`DomainError` if the settings are informationally
    incomplete and :class:`EstimationError` if a setting has no counts.
    """
    settings = table.settings
    projectors = _flat_projectors(settings)
    if np.linalg.matrix_rank(projectors.reshape(len(projectors), 16)) < 16:
        raise DomainError(
            "count table settings are informationally incomplete "
            "(design rank < 16)"
        )
    totals = table.counts.sum(axis=1)
    if np.any(totals <= 0.0):
        bad = int(np.argmin(totals))
        raise EstimationError(f"setting {bad} has zero total counts")
    counts = table.counts.reshape(-1)
    freqs = (table.counts / totals[:, None]).reshape(-1)

    rho = _clip_spectrum(_linear_inversion(projectors, freqs), _START_FLOOR)

    def log_likelihood(probs: np.ndarray) -> float:
        mask = counts > 0.0
        return float(counts[mask] @ np.log(probs[mask]))

    probs = np.clip(
        np.einsum("aij,ji->a", projectors, rho).real, _PROB_FLOOR, None
    )
    current = log_likelihood(probs)
    for _ in range(max_iterations):
        r_op = np.einsum("a,aij->ij", counts / probs, projectors)
        updated = r_op @ rho @ r_op
        updated = hermitian_part(updated / updated.trace().real)
        drift = float(np.abs(updated - rho).max())
        rho = updated
        probs = np.clip(
            np.einsum("aij,ji->a", projectors, rho).real, _PROB_FLOOR, None
        )
        previous, current = current, log_likelihood(probs)
        if abs(current - previous) < loglike_tol or drift < 1e-15:
            break

    return _clip_spectrum(rho, 0.0)
