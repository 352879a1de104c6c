"""Shared random-object builders for the test suite."""

import numpy as np


def random_unitary(rng, dim: int = 2) -> np.ndarray:
    """Haar-ish random unitary via QR with phase fixing."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_density(rng, dim: int = 4, rank: int | None = None) -> np.ndarray:
    """Random mixed state from a Ginibre factor of the given rank."""
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unit_vector(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_axes(rng, n: int) -> np.ndarray:
    """n unit axes with no parallel or antiparallel pair."""
    axes = []
    while len(axes) < n:
        v = random_unit_vector(rng)
        if all(abs(np.dot(v, u)) < 0.999 for u in axes):
            axes.append(v)
    return np.array(axes)
