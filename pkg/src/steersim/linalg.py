"""Small complex linear algebra layer for one- and two-qubit operators.

Everything downstream funnels matrix work through here so the numerical
conventions (tolerances, eigenvalue ordering, fidelity definition) live in
one place.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

# Entrywise tolerance for Hermiticity and trace checks on candidate
# density matrices.
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
# Eigenvalues above this floor count as non-negative; anything lower is a
# genuinely indefinite matrix, not round-off.
EIGENVALUE_FLOOR = -1e-9
# Bloch vectors must be unit length to this tolerance.
UNIT_TOL = 1e-12

# fidelity() returns the *squared* Uhlmann overlap (Tr sqrt(sqrt(rho) sigma
# sqrt(rho)))^2, so pure states give |<psi|phi>|^2.
FIDELITY_CONVENTION = "squared_uhlmann"

# Relative cutoff below which eigenvalues of a PSD product are treated as
# exact zeros before taking square roots.  Without it the sqrt amplifies
# 1e-16 eigenvalue noise to 1e-8 in the fidelity.
_SQRT_REL_CUTOFF = 1e-13

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
IDENTITY_4 = np.eye(4, dtype=complex)
PAULI_VECTOR = np.stack([PAULI_X, PAULI_Y, PAULI_Z])

for _m in (PAULI_X, PAULI_Y, PAULI_Z, IDENTITY_2, IDENTITY_4, PAULI_VECTOR):
    _m.setflags(write=False)
del _m


def require_unit(u, name: str = "direction") -> np.ndarray:
    """Return ``u`` as a float array after checking it is a unit 3-vector."""
    u = np.asarray(u, dtype=float)
    if u.shape != (3,):
        raise DomainError(f"{name} must be a 3-vector, got shape {u.shape}")
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > UNIT_TOL:
        raise DomainError(f"{name} must be unit length, |{name}| = {norm!r}")
    return u


def pauli_along(u) -> np.ndarray:
    """Spin observable u_x X + u_y Y + u_z Z for a unit vector ``u``."""
    u = require_unit(u)
    return np.tensordot(u, PAULI_VECTOR, axes=1)


def hermitian_part(m) -> np.ndarray:
    """Project onto the Hermitian part, (M + M^dagger)/2."""
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + m.conj().T)


def eig_hermitian(m) -> np.ndarray:
    """Real eigenvalues of a Hermitian 2x2 or 4x4 matrix, ascending.

    The 2x2 case uses the closed-form quadratic so axis-aligned spin
    observables come out exact; 4x4 goes through LAPACK.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape not in ((2, 2), (4, 4)):
        raise DomainError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
    if np.abs(m - m.conj().T).max() > HERMITIAN_TOL:
        raise DomainError("matrix is not Hermitian within tolerance")
    if m.shape == (2, 2):
        a = m[0, 0].real
        d = m[1, 1].real
        mean = 0.5 * (a + d)
        radius = np.hypot(0.5 * (a - d), abs(m[0, 1]))
        return np.array([mean - radius, mean + radius])
    return np.linalg.eigvalsh(hermitian_part(m))


def kron(a, b) -> np.ndarray:
    """Tensor product of two single-qubit (2x2) operators."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise DomainError(
            f"kron expects two 2x2 factors, got {a.shape} and {b.shape}"
        )
    return np.kron(a, b)


def as_density_matrix(m) -> np.ndarray:
    """Validate ``m`` as a density matrix and return its Hermitian part.

    Checks Hermiticity and unit trace entrywise to 1e-10 and positivity up
    to an eigenvalue floor of -1e-9, raising :class:`DomainError` otherwise.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4):
        raise DomainError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
    if np.abs(m - m.conj().T).max() > HERMITIAN_TOL:
        raise DomainError("density matrix is not Hermitian within 1e-10")
    trace = m.trace()
    if abs(trace - 1.0) > TRACE_TOL:
        raise DomainError(f"density matrix trace is {trace!r}, expected 1")
    rho = hermitian_part(m)
    lowest = float(np.linalg.eigvalsh(rho)[0])
    if lowest < EIGENVALUE_FLOOR:
        raise DomainError(f"density matrix has eigenvalue {lowest!r} < -1e-9")
    return rho


def partial_trace(rho, keep: int) -> np.ndarray:
    """Trace out one qubit of a two-qubit state.

    Parameters
    ----------
    rho : (4, 4) array_like
        Two-qubit density matrix (validated).
    keep : int
        1 to keep the first qubit, 2 to keep the second.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DomainError(f"partial trace expects a 4x4 matrix, got {rho.shape}")
    rho = as_density_matrix(rho)
    if keep not in (1, 2):
        raise DomainError(f"keep must be 1 or 2, got {keep!r}")
    blocks = rho.reshape(2, 2, 2, 2)
    if keep == 1:
        return np.einsum("ikjk->ij", blocks)
    return np.einsum("kikj->ij", blocks)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Square root of a PSD Hermitian matrix with small eigenvalues zeroed."""
    vals, vecs = np.linalg.eigh(m)
    cutoff = _SQRT_REL_CUTOFF * max(float(vals[-1]), 0.0)
    vals = np.where(vals > cutoff, vals, 0.0)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(rho, sigma) -> float:
    """Squared Uhlmann fidelity of two density matrices of equal dimension.

    Returns (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clipped to [0, 1].
    Symmetric in its arguments to ~1e-13 and exact at 1 for identical
    states and 0 for orthogonal pure states.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise DomainError(
            f"fidelity needs equal shapes, got {rho.shape} and {sigma.shape}"
        )
    rho = as_density_matrix(rho)
    sigma = as_density_matrix(sigma)
    root = _psd_sqrt(rho)
    inner = hermitian_part(root @ sigma @ root)
    vals = np.linalg.eigvalsh(inner)
    cutoff = _SQRT_REL_CUTOFF * max(float(vals[-1]), 0.0)
    vals = np.where(vals > cutoff, vals, 0.0)
    overlap = float(np.sqrt(vals).sum())
    return min(max(overlap * overlap, 0.0), 1.0)
