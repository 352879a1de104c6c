"""Steering bounds C_n for finite measurement schemes.

The bound is the largest steering parameter any local-hidden-state model
can fake: max over sign assignments s of lambda_max((1/n) sum_k s_k
sigma(u_k)), which for Pauli observables reduces to the resultant length
max_s |sum_k s_k u_k| / n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InternalError
from .geometry import MeasurementScheme, SUPPORTED_SETTINGS
from .linalg import UNIT_TOL

# Refuse enumeration beyond 2^23 sign patterns.
MAX_ENUMERATION_SETTINGS = 24
# Sign patterns within this relative distance of the maximum count as ties.
_TIE_REL_TOL = 1e-12
_CHUNK = 1 << 16


@dataclass(frozen=True)
class SteeringBound:
    """Bound value with the sign patterns that attain it."""

    n: int
    value: float
    maximizers: np.ndarray
    method: str


def _sign_chunk(start: int, stop: int, n: int) -> np.ndarray:
    """Sign matrices for pattern indices [start, stop), first sign fixed +1."""
    idx = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(n - 1, dtype=np.int64)[None, :]) & 1
    signs = np.empty((stop - start, n), dtype=np.int8)
    signs[:, 0] = 1
    signs[:, 1:] = (2 * bits - 1).astype(np.int8)
    return signs


def steering_bound(scheme: MeasurementScheme) -> SteeringBound:
    """Exact bound by enumerating all 2^(n-1) inequivalent sign patterns.

    Global sign flips leave the resultant length unchanged, so the first
    sign is pinned to +1 and each maximizer is mirrored afterwards.
    """
    axes = np.asarray(scheme.axes, dtype=float)
    n = scheme.n
    if n != len(axes):
        raise DomainError(f"scheme has {len(axes)} axes but claims n = {n}")
    if n > MAX_ENUMERATION_SETTINGS:
        raise DomainError(
            f"n = {n} exceeds the enumeration limit "
            f"of {MAX_ENUMERATION_SETTINGS} settings"
        )
    if np.abs(np.linalg.norm(axes, axis=1) - 1.0).max() > UNIT_TOL:
        raise DomainError("scheme axes must be unit vectors")
    gram = np.abs(axes @ axes.T)
    np.fill_diagonal(gram, 0.0)
    if gram.max() > 1.0 - 1e-9:
        raise DomainError("scheme axes contain a parallel or antiparallel pair")

    total = 1 << (n - 1)
    best = 0.0
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        norms = np.linalg.norm(_sign_chunk(start, stop, n) @ axes, axis=1)
        best = max(best, float(norms.max()))

    ties = []
    threshold = best * (1.0 - _TIE_REL_TOL)
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        signs = _sign_chunk(start, stop, n)
        norms = np.linalg.norm(signs @ axes, axis=1)
        ties.append(signs[norms >= threshold])
    winners = np.concatenate(ties)
    maximizers = np.concatenate([winners, -winners])
    maximizers.setflags(write=False)

    value = best / n
    if value < 1.0 / n - 1e-12:
        raise InternalError(
            f"bound {value!r} fell below the 1/n floor for n = {n}"
        )
    return SteeringBound(n=n, value=value, maximizers=maximizers,
                         method="brute_force")


def analytic_bound(n: int) -> float:
    """Closed-form bound for the five regular schemes."""
    if n == 2:
        return 1.0 / np.sqrt(2.0)
    if n in (3, 4):
        return 1.0 / np.sqrt(3.0)
    theta = np.pi / 5.0
    if n == 6:
        edge = 4.0 / np.sqrt(10.0 + 2.0 * np.sqrt(5.0))
        sec = 1.0 / np.cos(1.5 * theta)
        return 1.0 - (5.0 * edge / 12.0) * np.sqrt(4.0 - sec * sec)
    if n == 10:
        edge = 4.0 / (np.sqrt(15.0) + np.sqrt(3.0))
        factor = 1.0 + np.tan(2.0 * theta) / np.sin(theta)
        return 1.0 - 0.1 * factor * np.sqrt(9.0 * edge * edge - 4.0)
    raise DomainError(
        f"no closed form for n = {n!r}; "
        f"supported values are {list(SUPPORTED_SETTINGS)}"
    )


def verify_tightness(scheme: MeasurementScheme, ensemble) -> float:
    """Cheating value of ``ensemble`` minus the scheme bound.

    Zero (to round-off) means the ensemble saturates the bound; any
    positive excess beyond ~1e-12 would signal an inconsistency.
    """
    from .protocol import cheat_steering  # local import, avoids a cycle

    report = cheat_steering(ensemble, scheme)
    return report.s_value - steering_bound(scheme).value
