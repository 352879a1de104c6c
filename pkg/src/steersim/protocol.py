"""Steering protocol evaluation for honest and dishonest Alices, plus CHSH.

The honest path measures a shared two-qubit state; the dishonest path
replaces Alice with a local-hidden-state ensemble and a deterministic
announcement rule, which can reach at most the scheme's bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bounds import steering_bound
from .errors import DomainError
from .geometry import (
    MeasurementScheme,
    dual_directions,
    scheme_axes,
    vertex_directions,
)
from .linalg import UNIT_TOL, as_density_matrix, kron, pauli_along, require_unit

TSIRELSON = 2.0 * np.sqrt(2.0)

# Which ensemble kind saturates the bound for each scheme.
OPTIMAL_ENSEMBLE_KIND = {2: "dual", 3: "dual", 4: "dual", 6: "vertex", 10: "vertex"}

ResponseRule = Callable[[int, np.ndarray], int]


@dataclass(frozen=True)
class LhsEnsemble:
    """Dishonest Alice: pure-state Bloch directions, weights, response rule.

    ``response_rule`` maps (state index, measurement axis) to a declared
    result in {-1, +1}; None selects the built-in most-likely-outcome rule
    sign(v . u) with +1 on exact ties.
    """

    states: np.ndarray
    weights: np.ndarray
    response_rule: Optional[ResponseRule] = None
    label: str = "custom"

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if states.ndim != 2 or states.shape[1] != 3 or len(states) == 0:
            raise DomainError("ensemble states must form a non-empty (m, 3) array")
        if np.abs(np.linalg.norm(states, axis=1) - 1.0).max() > UNIT_TOL:
            raise DomainError("ensemble states must be unit Bloch vectors")
        if weights.shape != (len(states),):
            raise DomainError("need exactly one weight per ensemble state")
        if weights.min() < 0.0:
            raise DomainError("ensemble weights must be non-negative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise DomainError(f"ensemble weights sum to {weights.sum()!r}, not 1")
        states.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "weights", weights)


@dataclass(frozen=True)
class SteeringReport:
    """Steering parameter against its bound for one scheme."""

    n: int
    s_value: float
    bound: float
    violated: bool
    per_setting: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ChshReport:
    """CHSH combination, the settings that produced it, and the verdict."""

    b_value: float
    settings: tuple
    violated: bool


def correlation(rho, a, b) -> float:
    """Joint Pauli expectation Tr[(sigma_a tensor sigma_b) rho]."""
    rho = as_density_matrix(rho)
    if rho.shape != (4, 4):
        raise DomainError("correlation needs a two-qubit state")
    observable = kron(pauli_along(a), pauli_along(b))
    return float(np.trace(observable @ rho).real)


def _report(per_setting: np.ndarray, scheme: MeasurementScheme) -> SteeringReport:
    s_value = float(per_setting.mean())
    bound = steering_bound(scheme).value
    return SteeringReport(
        n=scheme.n,
        s_value=s_value,
        bound=bound,
        violated=s_value > bound,
        per_setting=per_setting,
    )


def honest_steering(rho, scheme: MeasurementScheme) -> SteeringReport:
    """Steering parameter when Alice really measures along -u_k.

    Her declared result is her own outcome, so the k-th correlation is
    Tr[(sigma(-u_k) tensor sigma(u_k)) rho].
    """
    per_setting = np.array(
        [correlation(rho, -axis, axis) for axis in scheme.axes]
    )
    return _report(per_setting, scheme)


def make_ensemble(n: int, kind: str) -> LhsEnsemble:
    """Vertex or dual ensemble of the n-setting figure, uniform weights."""
    if kind not in ("vertex", "dual"):
        raise DomainError(f"ensemble kind must be 'vertex' or 'dual', got {kind!r}")
    directions = (
        vertex_directions(n) if kind == "vertex" else dual_directions(n)
    )
    states = directions.directions
    weights = np.full(len(states), 1.0 / len(states))
    if OPTIMAL_ENSEMBLE_KIND[n] == kind:
        # The most-likely-outcome rule must never face an exact tie on the
        # bound-saturating ensembles, or determinism would be doing physics.
        dots = states @ scheme_axes(n).axes.T
        assert np.abs(dots).min() > 1e-9, "tie in optimal ensemble response"
    return LhsEnsemble(
        states=states, weights=weights, response_rule=None,
        label=f"{kind}:{directions.label}",
    )


def cheat_steering(ensemble: LhsEnsemble, scheme: MeasurementScheme) -> SteeringReport:
    """Best the ensemble can do: declared results times Bob's expectations."""
    dots = ensemble.states @ np.asarray(scheme.axes, dtype=float).T
    if ensemble.response_rule is None:
        responses = np.where(dots >= 0.0, 1.0, -1.0)
    else:
        responses = np.empty_like(dots)
        for j in range(dots.shape[0]):
            for k, axis in enumerate(scheme.axes):
                answer = int(ensemble.response_rule(j, axis))
                if answer not in (-1, 1):
                    raise DomainError(
                        f"response rule returned {answer!r}, expected -1 or +1"
                    )
                responses[j, k] = answer
    per_setting = ensemble.weights @ (responses * dots)
    return _report(per_setting, scheme)


def chsh_value(rho, a1, a2, b1, b2) -> ChshReport:
    """CHSH combination |E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)|."""
    settings = tuple(require_unit(v, name) for v, name in
                     ((a1, "a1"), (a2, "a2"), (b1, "b1"), (b2, "b2")))
    a1, a2, b1, b2 = settings
    b = abs(
        correlation(rho, a1, b1)
        + correlation(rho, a1, b2)
        + correlation(rho, a2, b1)
        - correlation(rho, a2, b2)
    )
    assert b <= TSIRELSON + 1e-9, "CHSH value exceeded the quantum maximum"
    return ChshReport(b_value=b, settings=settings, violated=b > 2.0)


def correlation_matrix(rho) -> np.ndarray:
    """3x3 matrix T with T_ij = Tr[(sigma_i tensor sigma_j) rho]."""
    rho = as_density_matrix(rho)
    if rho.shape != (4, 4):
        raise DomainError("correlation matrix needs a two-qubit state")
    basis = np.eye(3)
    return np.array(
        [[correlation(rho, basis[i], basis[j]) for j in range(3)]
         for i in range(3)]
    )


def chsh_max(rho) -> ChshReport:
    """Largest CHSH value over all settings, with settings that attain it.

    Uses the correlation-matrix criterion: B_max = 2 sqrt(s1^2 + s2^2)
    for the two largest singular values of T, achieved by Alice along the
    left singular directions and Bob along mixtures of the right ones.
    """
    t = correlation_matrix(rho)
    left, sing, right_t = np.linalg.svd(t)
    s1, s2 = float(sing[0]), float(sing[1])
    theta = np.arctan2(s2, s1)
    a1 = left[:, 0]
    a2 = left[:, 1]
    b1 = np.cos(theta) * right_t[0] + np.sin(theta) * right_t[1]
    b2 = np.cos(theta) * right_t[0] - np.sin(theta) * right_t[1]
    report = chsh_value(rho, a1, a2, b1, b2)
    expected = 2.0 * np.hypot(s1, s2)
    assert abs(report.b_value - expected) < 1e-9, "settings missed the optimum"
    return report
