"""Render summary figures and their backing CSV tables to a directory.

Four artifacts, each as PNG + CSV: the steering/CHSH hierarchy scan, the
bound-saturation comparison, the tangle vs linear-entropy plane with
tomographic estimates, and the measurement-scheme geometry.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bounds import steering_bound
from .errors import DomainError
from .experiment import (
    estimate_steering,
    sample_counts,
    steering_settings,
    substream_seed,
)
from .geometry import SUPPORTED_SETTINGS, dual_directions, scheme_axes, vertex_directions
from .protocol import cheat_steering, chsh_max, honest_steering, make_ensemble
from .states import classify, linear_entropy, tangle, werner
from .tomography import tomography, tomography_settings

_SAMPLED_MUS = (0.45, 0.57, 0.67, 0.84)
_TOMO_MUS = (0.2, 0.45, 0.67, 0.84, 0.95)
_TOMO_RESAMPLES = 24


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else _fmt(cell) for cell in row
        ))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _render_hierarchy(outdir: Path, n: int, step: float) -> list[Path]:
    grid = np.arange(0.0, 1.0 + 1e-9, step)
    scheme = scheme_axes(n)
    bound = steering_bound(scheme).value
    rows = []
    for mu in grid:
        rho = werner(mu)
        s_val = honest_steering(rho, scheme).s_value
        b_val = chsh_max(rho).b_value
        rows.append([mu, s_val, bound, b_val, classify(mu)])
    csv_path = outdir / "hierarchy_scan.csv"
    _write_csv(csv_path, ["mu", "s_n", "c_n", "b_max", "regime"], rows)

    s_vals = [row[1] for row in rows]
    b_vals = [row[3] for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(s_vals, b_vals, color="tab:blue", lw=2,
            label="Werner family (exact)")
    ax.axhline(2.0, color="tab:red", ls="--", lw=1, label="CHSH bound B = 2")
    ax.axvline(bound, color="tab:green", ls="--", lw=1,
               label=f"steering bound C_{n}")
    ax.set_xlabel(f"steering parameter S_{n}")
    ax.set_ylabel("maximal CHSH parameter B")
    ax.set_title(f"Steering vs CHSH hierarchy, n = {n}")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    png_path = outdir / "hierarchy_scan.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [csv_path, png_path]


def _render_saturation(outdir: Path, shots: int, seed: int) -> list[Path]:
    rows = []
    ns = list(SUPPORTED_SETTINGS)
    cheat_vals = {"vertex": [], "dual": []}
    bounds_by_n = []
    for n in ns:
        scheme = scheme_axes(n)
        bounds_by_n.append(steering_bound(scheme).value)
        rows.append(["bound", n, bounds_by_n[-1], 0.0])
        for kind in ("vertex", "dual"):
            value = cheat_steering(make_ensemble(n, kind), scheme).s_value
            cheat_vals[kind].append(value)
            rows.append([f"cheat_{kind}", n, value, 0.0])
    sampled = {}
    for i, mu in enumerate(_SAMPLED_MUS):
        points = []
        for j, n in enumerate(ns):
            scheme = scheme_axes(n)
            table = sample_counts(
                werner(mu), steering_settings(scheme), shots,
                substream_seed(seed, 10 * i + j),
            )
            _, estimate = estimate_steering(table, scheme)
            points.append((estimate.value, estimate.std_error))
            rows.append([f"honest_mu_{mu}", n, estimate.value,
                         estimate.std_error])
        sampled[mu] = points
    csv_path = outdir / "bound_saturation.csv"
    _write_csv(csv_path, ["kind", "n", "value", "std_error"], rows)

    x = np.arange(len(ns), dtype=float)
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    ax.bar(x - 0.18, cheat_vals["dual"], width=0.36, color="tab:orange",
           alpha=0.8, label="cheat: dual ensemble")
    ax.bar(x + 0.18, cheat_vals["vertex"], width=0.36, color="tab:purple",
           alpha=0.8, label="cheat: vertex ensemble")
    for i, bound in enumerate(bounds_by_n):
        ax.hlines(bound, x[i] - 0.4, x[i] + 0.4, color="black", lw=1.5,
                  label="bound C_n" if i == 0 else None)
    for mu, points in sampled.items():
        values = [p[0] for p in points]
        errors = [p[1] for p in points]
        ax.errorbar(x, values, yerr=errors, fmt="o", ms=4, capsize=3,
                    label=f"honest, mu = {mu}")
    ax.set_xticks(x, [str(n) for n in ns])
    ax.set_xlabel("number of settings n")
    ax.set_ylabel("steering parameter")
    ax.set_title("Bound saturation: cheats vs honest runs")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    png_path = outdir / "bound_saturation.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [csv_path, png_path]


def _tomo_point(mu: float, shots: int, seed: int) -> tuple:
    table = sample_counts(werner(mu), tomography_settings(), shots, seed)
    rho_hat = tomography(table)
    tangles = []
    entropies = []
    rng = np.random.default_rng(substream_seed(seed, 999))
    for _ in range(_TOMO_RESAMPLES):
        redrawn = rng.poisson(table.counts).astype(float)
        # A resample can zero out a low-count cell row; reuse the original
        # settings and let tomography weight by observed totals.
        resample = type(table)(settings=table.settings, counts=redrawn,
                               shots_target=table.shots_target)
        rho_b = tomography(resample)
        tangles.append(tangle(rho_b))
        entropies.append(linear_entropy(rho_b))
    return (
        tangle(rho_hat), float(np.std(tangles, ddof=1)),
        linear_entropy(rho_hat), float(np.std(entropies, ddof=1)),
    )


def _render_tangle_plane(outdir: Path, shots: int, seed: int) -> list[Path]:
    mus = np.linspace(0.0, 1.0, 101)
    curve = [(linear_entropy(werner(mu)), tangle(werner(mu))) for mu in mus]
    rows = [["curve", mu, le, 0.0, t, 0.0] for mu, (le, t) in zip(mus, curve)]
    points = []
    for i, mu in enumerate(_TOMO_MUS):
        t_hat, t_err, le_hat, le_err = _tomo_point(
            mu, shots, substream_seed(seed, 500 + i)
        )
        points.append((mu, le_hat, le_err, t_hat, t_err))
        rows.append(["tomography", mu, le_hat, le_err, t_hat, t_err])
    csv_path = outdir / "tangle_entropy.csv"
    _write_csv(
        csv_path,
        ["kind", "mu", "linear_entropy", "linear_entropy_err", "tangle",
         "tangle_err"],
        rows,
    )

    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot([c[0] for c in curve], [c[1] for c in curve], color="tab:blue",
            lw=2, label="Werner family (exact)")
    ax.errorbar(
        [p[1] for p in points], [p[3] for p in points],
        xerr=[p[2] for p in points], yerr=[p[4] for p in points],
        fmt="o", ms=4, capsize=3, color="tab:red",
        label=f"tomography, {shots} shots/setting",
    )
    for mu, le_hat, _, t_hat, _ in points:
        ax.annotate(f"mu={mu}", (le_hat, t_hat), fontsize=7,
                    textcoords="offset points", xytext=(5, 5))
    ax.set_xlabel("linear entropy")
    ax.set_ylabel("tangle")
    ax.set_title("Tangle vs linear entropy")
    ax.legend(fontsize=8)
    fig.tight_layout()
    png_path = outdir / "tangle_entropy.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [csv_path, png_path]


def _render_schemes(outdir: Path) -> list[Path]:
    rows = []
    fig = plt.figure(figsize=(11, 7))
    for plot_index, n in enumerate(SUPPORTED_SETTINGS, start=1):
        scheme = scheme_axes(n)
        optimal = (
            vertex_directions(n) if n in (6, 10) else dual_directions(n)
        )
        ax = fig.add_subplot(2, 3, plot_index, projection="3d")
        for idx, axis in enumerate(scheme.axes):
            ax.plot([-axis[0], axis[0]], [-axis[1], axis[1]],
                    [-axis[2], axis[2]], color="tab:blue", lw=1.2)
            rows.append([scheme.figure, n, "axis", idx, *axis])
        ens = optimal.directions
        ax.scatter(ens[:, 0], ens[:, 1], ens[:, 2], color="tab:red", s=14,
                   depthshade=False)
        for idx, direction in enumerate(ens):
            rows.append([scheme.figure, n, "optimal_ensemble", idx, *direction])
        ax.set_title(f"{scheme.figure} (n = {n})", fontsize=9)
        ax.set_box_aspect((1, 1, 1))
        ax.set_xticks([])
        ax.set_yticks([])
        ax.set_zticks([])
    fig.suptitle("Measurement axes (lines) and optimal cheating ensembles (dots)")
    csv_path = outdir / "scheme_axes.csv"
    _write_csv(csv_path, ["figure", "n", "kind", "index", "x", "y", "z"],
               [[r[0], str(r[1]), r[2], str(r[3]), r[4], r[5], r[6]]
                for r in rows])
    png_path = outdir / "scheme_axes.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [csv_path, png_path]


def render_all(outdir, n: int = 3, shots: int = 10000, seed: int = 0,
               step: float = 0.02) -> list[Path]:
    """Render every figure/CSV pair into ``outdir`` and list the files."""
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    if not 0.0 < step <= 0.5:
        raise DomainError(f"step must lie in (0, 0.5], got {step!r}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    written += _render_hierarchy(outdir, n, step)
    written += _render_saturation(outdir, shots, substream_seed(seed, 1))
    written += _render_tangle_plane(outdir, shots, substream_seed(seed, 2))
    written += _render_schemes(outdir)
    return written
