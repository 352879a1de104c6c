"""Measurement-axis geometry: regular direction sets on the Bloch sphere.

Each supported number of settings n corresponds to the antipodal vertex
pairs of a regular figure; the dual direction set (face centres, or edge
midpoints for the square) doubles as the cheating ensemble geometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import UNIT_TOL

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0

FIGURES = {
    2: "square",
    3: "octahedron",
    4: "cube",
    6: "icosahedron",
    10: "dodecahedron",
}
SUPPORTED_SETTINGS = tuple(sorted(FIGURES))

# Two axes closer than this in |dot| are treated as the same line.
_PARALLEL_TOL = 1e-9


@dataclass(frozen=True)
class MeasurementScheme:
    """A set of n measurement axes, one representative per antipodal pair."""

    n: int
    axes: np.ndarray
    figure: str


@dataclass(frozen=True)
class DirectionSet:
    """A full (antipodally closed) set of unit directions with a label."""

    directions: np.ndarray
    label: str


def _normalize_rows(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    return arr / np.linalg.norm(arr, axis=1, keepdims=True)


def _cyclic(triples) -> list:
    out = []
    for t in triples:
        t = list(t)
        for shift in range(3):
            out.append(t[shift:] + t[:shift])
    return out


def _square_vertices() -> np.ndarray:
    return _normalize_rows(
        [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]
    )


def _square_midpoints() -> np.ndarray:
    return _normalize_rows(
        [(1, 1, 0), (1, -1, 0), (-1, 1, 0), (-1, -1, 0)]
    )


def _octahedron_vertices() -> np.ndarray:
    rows = []
    for axis in range(3):
        for sign in (1, -1):
            v = [0.0, 0.0, 0.0]
            v[axis] = sign
            rows.append(v)
    return _normalize_rows(rows)


def _cube_vertices() -> np.ndarray:
    rows = [
        (sx, sy, sz)
        for sx in (1, -1)
        for sy in (1, -1)
        for sz in (1, -1)
    ]
    return _normalize_rows(rows)


def _icosahedron_vertices() -> np.ndarray:
    rows = _cyclic(
        [(0, s1, s2 * GOLDEN) for s1 in (1, -1) for s2 in (1, -1)]
    )
    return _normalize_rows(rows)


def _dodecahedron_vertices() -> np.ndarray:
    rows = [tuple(v) for v in _cube_vertices()]
    rows += _cyclic(
        [
            (0, s1 / GOLDEN, s2 * GOLDEN)
            for s1 in (1, -1)
            for s2 in (1, -1)
        ]
    )
    return _normalize_rows(rows)


_VERTEX_BUILDERS = {
    "square": _square_vertices,
    "octahedron": _octahedron_vertices,
    "cube": _cube_vertices,
    "icosahedron": _icosahedron_vertices,
    "dodecahedron": _dodecahedron_vertices,
}

# Dual direction set for each figure: face centres for the solids, edge
# midpoints for the square.  Dual pairs (octahedron, cube) and
# (icosahedron, dodecahedron) swap vertex sets.
_DUAL_BUILDERS = {
    "square": _square_midpoints,
    "octahedron": _cube_vertices,
    "cube": _octahedron_vertices,
    "icosahedron": _dodecahedron_vertices,
    "dodecahedron": _icosahedron_vertices,
}


def _require_supported(n: int) -> str:
    if n not in FIGURES:
        raise DomainError(
            f"unsupported number of settings {n!r}; "
            f"supported values are {list(SUPPORTED_SETTINGS)}"
        )
    return FIGURES[n]


def _pair_representatives(vertices: np.ndarray) -> np.ndarray:
    """One axis per antipodal pair, lexicographically largest, sorted."""
    reps: list[tuple] = []
    for v in vertices:
        if any(abs(np.dot(r, v)) > 1.0 - _PARALLEL_TOL for r in reps):
            continue
        rep = v if tuple(v) >= tuple(-v) else -v
        reps.append(rep + 0.0)  # + 0.0 clears negative zeros
    reps.sort(key=tuple, reverse=True)
    axes = np.array(reps)
    axes.setflags(write=False)
    return axes


def scheme_axes(n: int) -> MeasurementScheme:
    """Canonical measurement scheme for n in {2, 3, 4, 6, 10}."""
    figure = _require_supported(n)
    axes = _pair_representatives(_VERTEX_BUILDERS[figure]())
    if len(axes) != n:
        raise DomainError(
            f"figure {figure} yields {len(axes)} axes, expected {n}"
        )
    return MeasurementScheme(n=n, axes=axes, figure=figure)


def vertex_directions(n: int) -> DirectionSet:
    """Full vertex set (both members of every antipodal pair)."""
    figure = _require_supported(n)
    directions = _VERTEX_BUILDERS[figure]()
    directions.setflags(write=False)
    return DirectionSet(directions=directions, label=f"{figure} vertices")


def dual_directions(n: int) -> DirectionSet:
    """Dual direction set: face centres (edge midpoints for the square)."""
    figure = _require_supported(n)
    directions = _DUAL_BUILDERS[figure]()
    directions.setflags(write=False)
    kind = "edge midpoints" if figure == "square" else "face centres"
    return DirectionSet(directions=directions, label=f"{figure} {kind}")


def custom_scheme(axes) -> MeasurementScheme:
    """Build a scheme from caller-supplied axes (unit, pairwise non-parallel)."""
    axes = np.asarray(axes, dtype=float)
    if axes.ndim != 2 or axes.shape[1] != 3 or len(axes) < 1:
        raise DomainError(
            f"axes must be an (n, 3) array with n >= 1, got shape {axes.shape}"
        )
    norms = np.linalg.norm(axes, axis=1)
    worst = float(np.abs(norms - 1.0).max())
    if worst > UNIT_TOL:
        raise DomainError(f"axes must be unit vectors (worst deviation {worst!r})")
    gram = np.abs(axes @ axes.T)
    np.fill_diagonal(gram, 0.0)
    if gram.max() > 1.0 - _PARALLEL_TOL:
        i, j = np.unravel_index(int(gram.argmax()), gram.shape)
        raise DomainError(f"axes {i} and {j} are parallel or antiparallel")
    axes = axes.copy()
    axes.setflags(write=False)
    return MeasurementScheme(n=len(axes), axes=axes, figure="custom")
