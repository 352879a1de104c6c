"""Two-qubit state models and measures.

Covers the Werner family, the gate-based preparation it idealizes, a
one-sided depolarizing channel that maps the singlet onto that family,
tangle / linear entropy, the regime classification by Werner parameter,
and a numerical search for the local unitary that best aligns a given
state with the family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .bounds import analytic_bound
from .errors import DomainError
from .linalg import (
    IDENTITY_2,
    IDENTITY_4,
    PAULI_Y,
    as_density_matrix,
    kron,
    partial_trace,
)

# Singlet projector |psi-><psi-| with exact dyadic entries, so Werner
# matrices (and their traces/purities) stay exact in float arithmetic.
SINGLET_PROJECTOR = np.array(
    [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.5, -0.5, 0.0],
        [0.0, -0.5, 0.5, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ],
    dtype=complex,
)
SINGLET_PROJECTOR.setflags(write=False)

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
HADAMARD.setflags(write=False)

# Werner states with mu below this value violate no Bell inequality at
# all.  Reported as an annotation; it is not one of the regime edges.
BELL_LOCAL_LIMIT = 0.6595

REGIMES = (
    "separable",
    "entangled_unsteerable",
    "steerable_many",
    "steerable_n6",
    "steerable_n3",
    "chsh_violating",
)

_SEPARABLE_MAX = 1.0 / 3.0
_UNSTEERABLE_MAX = 0.5
_C6 = analytic_bound(6)
_C3 = analytic_bound(3)
_CHSH_MAX = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class StateCharacter:
    """Entanglement/mixedness coordinates plus the fitted-regime label."""

    tangle: float
    linear_entropy: float
    mu_fit: float
    regime: str


@dataclass(frozen=True)
class LocalCorrection:
    """Best local unitary aligning a state with the Werner family."""

    unitary: np.ndarray
    residual_cost: float
    mu_hat: float


def werner(mu: float) -> np.ndarray:
    """Werner state: mu times the singlet plus (1 - mu) times I/4."""
    mu = float(mu)
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"Werner parameter must lie in [0, 1], got {mu!r}")
    return mu * SINGLET_PROJECTOR + (1.0 - mu) * 0.25 * IDENTITY_4


def _singlet_ket() -> np.ndarray:
    return np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)


def prepare_via_gate() -> np.ndarray:
    """Pure state (H on qubit 1) applied to the singlet, as a density matrix."""
    ket = kron(HADAMARD, IDENTITY_2) @ _singlet_ket()
    return np.outer(ket, ket.conj())


def depolarize_one_sided(rho, q: float) -> np.ndarray:
    """Depolarize qubit 1: (1 - q) rho + q (I/2 tensor Tr_1 rho)."""
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"depolarization strength must lie in [0, 1], got {q!r}")
    rho = as_density_matrix(rho)
    if rho.shape != (4, 4):
        raise DomainError("one-sided depolarization needs a two-qubit state")
    marginal = partial_trace(rho, keep=2)
    return (1.0 - q) * rho + q * kron(0.5 * IDENTITY_2, marginal)


_SPIN_FLIP = np.kron(PAULI_Y, PAULI_Y)
_SPIN_FLIP.setflags(write=False)


def tangle(rho) -> float:
    """Squared concurrence from the spin-flipped spectrum.

    Sorts the square roots of eig(rho rho~) descending, where
    rho~ = (Y tensor Y) conj(rho) (Y tensor Y), and squares the Wootters
    combination max(0, l1 - l2 - l3 - l4).
    """
    rho = as_density_matrix(rho)
    if rho.shape != (4, 4):
        raise DomainError("tangle is defined here for two-qubit states only")
    flipped = _SPIN_FLIP @ rho.conj() @ _SPIN_FLIP
    vals = np.linalg.eigvals(rho @ flipped)
    roots = np.sqrt(np.clip(vals.real, 0.0, None))
    roots[::-1].sort()
    concurrence = max(0.0, roots[0] - roots[1] - roots[2] - roots[3])
    return min(concurrence * concurrence, 1.0)


def linear_entropy(rho) -> float:
    """Mixedness (4/3)(1 - Tr rho^2), 0 for pure states and 1 for I/4."""
    rho = as_density_matrix(rho)
    if rho.shape != (4, 4):
        raise DomainError("linear entropy is normalized for two-qubit states")
    purity = float(np.trace(rho @ rho).real)
    return min(max((4.0 / 3.0) * (1.0 - purity), 0.0), 1.0)


def classify(mu: float) -> str:
    """Regime of werner(mu).  Thresholds are exclusive lower bounds."""
    mu = float(mu)
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"Werner parameter must lie in [0, 1], got {mu!r}")
    if mu <= _SEPARABLE_MAX:
        return "separable"
    if mu <= _UNSTEERABLE_MAX:
        return "entangled_unsteerable"
    if mu <= _C6:
        return "steerable_many"
    if mu <= _C3:
        return "steerable_n6"
    if mu <= _CHSH_MAX:
        return "steerable_n3"
    return "chsh_violating"


def state_character(rho, mu_fit: float) -> StateCharacter:
    """Bundle tangle, linear entropy, and the regime of a fitted mu."""
    clipped = min(max(float(mu_fit), 0.0), 1.0)
    return StateCharacter(
        tangle=tangle(rho),
        linear_entropy=linear_entropy(rho),
        mu_fit=float(mu_fit),
        regime=classify(clipped),
    )


def _rotation_zyz(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """SU(2) element exp(-i alpha Z/2) exp(-i beta Y/2) exp(-i gamma Z/2)."""
    cos_b = np.cos(beta / 2.0)
    sin_b = np.sin(beta / 2.0)
    phase_sum = np.exp(-0.5j * (alpha + gamma))
    phase_diff = np.exp(-0.5j * (alpha - gamma))
    return np.array(
        [
            [phase_sum * cos_b, -phase_diff * sin_b],
            [np.conj(phase_diff) * sin_b, np.conj(phase_sum) * cos_b],
        ]
    )


def _euler_from_unitary(u: np.ndarray) -> tuple[float, float, float]:
    """ZYZ angles reproducing ``u`` up to a global phase."""
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    su = u / np.sqrt(det)
    beta = 2.0 * np.arctan2(abs(su[1, 0]), abs(su[0, 0]))
    if abs(su[0, 0]) < 1e-9:
        return 2.0 * float(np.angle(su[1, 0])), beta, 0.0
    if abs(su[1, 0]) < 1e-9:
        return -2.0 * float(np.angle(su[0, 0])), beta, 0.0
    half_sum = -float(np.angle(su[0, 0]))
    half_diff = float(np.angle(su[1, 0]))
    return half_sum + half_diff, beta, half_sum - half_diff


_SQRT_REL_CUTOFF = 1e-13
_GRID_POINTS = 21


def _best_werner_fidelity(rho: np.ndarray, levels: int) -> tuple[float, float]:
    """(mu, fidelity) maximizing fidelity(rho, werner(mu)) over mu in [0, 1].

    Exploits that sqrt(W_mu) = sqrt(a) P + sqrt(b) (I - P) for the fixed
    singlet projector P, so each grid level needs a single batched 4x4
    eigendecomposition.  Six levels shrink the grid spacing below 1e-6.
    """
    p = SINGLET_PROJECTOR
    q = IDENTITY_4 - p
    prp = p @ rho @ p
    cross = p @ rho @ q + q @ rho @ p
    qrq = q @ rho @ q

    def fid_grid(mus: np.ndarray) -> np.ndarray:
        a = (1.0 + 3.0 * mus)[:, None, None] / 4.0
        b = (1.0 - mus)[:, None, None] / 4.0
        inner = a * prp + np.sqrt(a * b) * cross + b * qrq
        inner = 0.5 * (inner + inner.conj().swapaxes(1, 2))
        vals = np.linalg.eigvalsh(inner)
        cutoff = _SQRT_REL_CUTOFF * np.clip(vals[:, -1:], 0.0, None)
        vals = np.where(vals > cutoff, vals, 0.0)
        overlap = np.sqrt(vals).sum(axis=1)
        return np.minimum(overlap * overlap, 1.0)

    lo, hi = 0.0, 1.0
    mu, fid = 0.0, 0.0
    for _ in range(max(levels, 1)):
        grid = np.linspace(lo, hi, _GRID_POINTS)
        fids = fid_grid(grid)
        at = int(fids.argmax())
        mu, fid = float(grid[at]), float(fids[at])
        spacing = (hi - lo) / (_GRID_POINTS - 1)
        lo, hi = max(0.0, mu - spacing), min(1.0, mu + spacing)
    return mu, fid


def find_local_correction(rho, restarts: int = 20, seed: int = 0) -> LocalCorrection:
    """Search for the local unitary pulling ``rho`` onto the Werner family.

    Minimizes 1 - fidelity((U tensor I) rho (U tensor I)^dagger, W_mu)
    over ZYZ Euler angles with a derivative-free simplex, seeding one
    start from a polar-decomposition guess plus ``restarts`` random
    starts; mu is refitted per candidate, to 1e-6 at the end.
    """
    rho = as_density_matrix(rho)
    if rho.shape != (4, 4):
        raise DomainError("local correction needs a two-qubit state")
    if restarts < 0:
        raise DomainError("restarts must be non-negative")

    def corrected(angles) -> np.ndarray:
        u = kron(_rotation_zyz(*angles), IDENTITY_2)
        return u @ rho @ u.conj().T

    def cost(angles, levels: int) -> float:
        return 1.0 - _best_werner_fidelity(corrected(angles), levels)[1]

    starts = [np.array(_polar_start(rho))]
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        starts.append(rng.uniform(0.0, 2.0 * np.pi, size=3))

    # Coarse inner mu fit while hunting for the right basin; the winner
    # gets a full refinement pass below.
    best_angles = None
    best_cost = np.inf
    for x0 in starts:
        res = minimize(
            cost, x0, args=(1,), method="Nelder-Mead",
            options={"xatol": 1e-5, "fatol": 1e-13, "maxfev": 250},
        )
        if res.fun < best_cost:
            best_cost = float(res.fun)
            best_angles = np.asarray(res.x, dtype=float)

    res = minimize(
        cost, best_angles, args=(6,), method="Nelder-Mead",
        options={"xatol": 1e-9, "fatol": 1e-15, "maxfev": 600},
    )
    best_angles = np.asarray(res.x, dtype=float)
    unitary = _rotation_zyz(*best_angles)
    mu_hat, fid = _best_werner_fidelity(corrected(best_angles), 6)
    gap = np.abs(unitary.conj().T @ unitary - IDENTITY_2).max()
    assert gap < 1e-9, "constructed correction is not unitary"
    return LocalCorrection(
        unitary=unitary, residual_cost=max(1.0 - fid, 0.0), mu_hat=mu_hat
    )


def _polar_start(rho: np.ndarray) -> tuple[float, float, float]:
    """Euler start point from the top eigenvector's polar decomposition.

    If the dominant eigenvector is (U tensor I)|singlet>, its 2x2
    coefficient matrix M satisfies U = M0 M^-1 up to scale, with M0 the
    singlet's coefficient matrix; project that back to a unitary.
    """
    vals, vecs = np.linalg.eigh(rho)
    m = vecs[:, -1].reshape(2, 2)
    if abs(np.linalg.det(m)) < 1e-9:
        return 0.0, 0.0, 0.0
    m0 = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex) / np.sqrt(2.0)
    guess = m0 @ np.linalg.inv(m)
    left, _, right = np.linalg.svd(guess)
    return _euler_from_unitary(left @ right)
