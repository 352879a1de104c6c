"""Command-line front end.

One subcommand per pipeline stage; JSON output carries 17 significant
digits, CSV uses period decimals, and every random path takes --seed
(a generated seed is echoed to stderr when omitted).  Exit codes: 0 on
success, 1 on validation errors, 2 on internal errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import bounds as bounds_mod
from . import geometry, states
from .errors import DomainError
from .experiment import (
    full_pipeline,
    sample_counts,
    substream_seed,
)
from .linalg import eig_hermitian, fidelity
from .protocol import chsh_max, honest_steering, make_ensemble, cheat_steering

_JSON_DIGITS = ".17g"
_CSV_DIGITS = ".17g"
_SCHEME_DIGITS = ".15g"


def _fmt(value: float, spec: str = _JSON_DIGITS) -> str:
    return format(float(value), spec)


def _to_json(value) -> str:
    """Compact JSON with floats at 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if bool(value) else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _fmt(value)
    if isinstance(value, complex):
        return f"[{_fmt(value.real)}, {_fmt(value.imag)}]"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = ", ".join(f'"{key}": {_to_json(item)}' for key, item in value.items())
        return "{" + items + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        seq = value.tolist() if isinstance(value, np.ndarray) else value
        return "[" + ", ".join(_to_json(item) for item in seq) + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


class _Parser(argparse.ArgumentParser):
    """Argument parser whose errors flow through the JSON error path."""

    def error(self, message):
        raise DomainError(message)


def _add_seed(parser):
    parser.add_argument("--seed", type=int, default=None,
                        help="RNG seed; omitted -> generated and echoed to stderr")


def _add_output(parser):
    parser.add_argument("--output", default=None,
                        help="write the payload to this file instead of stdout")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        if args.seed < 0:
            raise DomainError("--seed must be non-negative")
        return args.seed
    generated = int.from_bytes(os.urandom(8), "big") >> 1
    print(f'{{"generated_seed": {generated}}}', file=sys.stderr)
    return generated


def _resolve_threads(args) -> int:
    threads = args.threads if args.threads is not None else os.cpu_count() or 1
    if threads < 1:
        raise DomainError("--threads must be >= 1")
    return threads


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="steersim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("scheme", help="measurement axes as CSV rows")
    p.add_argument("--n", type=int, required=True)
    _add_output(p)

    p = sub.add_parser("bounds", help="steering bound for a scheme")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=int)
    group.add_argument("--axes", help="CSV file of axes (x,y,z rows)")
    _add_output(p)

    p = sub.add_parser("state", help="Werner-state character")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--depolarize", type=float, default=None, metavar="Q")
    _add_output(p)

    p = sub.add_parser("steer", help="honest steering run (exact)")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_output(p)

    p = sub.add_parser("cheat", help="dishonest (local-hidden-state) run")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=("vertex", "dual"), required=True)
    _add_output(p)

    p = sub.add_parser("bell", help="maximal CHSH value for werner(mu)")
    p.add_argument("--mu", type=float, required=True)
    _add_output(p)

    p = sub.add_parser("scan", help="sweep mu: steering vs CHSH hierarchy CSV")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--threads", type=int, default=None)
    _add_output(p)

    p = sub.add_parser("mc", help="Monte-Carlo counting-statistics pipeline")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_seed(p)
    _add_output(p)

    p = sub.add_parser("tomo", help="sample counts and reconstruct the state")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_seed(p)
    _add_output(p)

    p = sub.add_parser("report", help="render figures and CSV tables to a directory")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--step", type=float, default=0.02)
    _add_seed(p)

    return parser


def _cmd_scheme(args) -> str:
    scheme = geometry.scheme_axes(args.n)
    rows = [
        ",".join(_fmt(c, _SCHEME_DIGITS) for c in axis) for axis in scheme.axes
    ]
    return "\n".join(rows)


def _load_axes(path: str) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = [line.strip() for line in handle if line.strip()]
    except OSError as exc:
        raise DomainError(f"cannot read axes file: {exc}") from exc
    rows = []
    for line in lines:
        parts = line.split(",")
        try:
            rows.append([float(part) for part in parts])
        except ValueError:
            continue  # tolerate a header line
    if not rows:
        raise DomainError(f"no numeric axis rows found in {path!r}")
    return np.asarray(rows)


def _cmd_bounds(args) -> str:
    if args.n is not None:
        scheme = geometry.scheme_axes(args.n)
    else:
        scheme = geometry.custom_scheme(_load_axes(args.axes))
    bound = bounds_mod.steering_bound(scheme)
    return _to_json({
        "n": bound.n,
        "value": bound.value,
        "method": bound.method,
        "maximizer_count": len(bound.maximizers),
    })


def _cmd_state(args) -> str:
    rho = states.werner(args.mu)
    mu_eff = args.mu
    if args.depolarize is not None:
        rho = states.depolarize_one_sided(rho, args.depolarize)
        mu_eff = (1.0 - args.depolarize) * args.mu
    character = states.state_character(rho, mu_eff)
    return _to_json({
        "mu": args.mu,
        "mu_effective": mu_eff,
        "eigenvalues": eig_hermitian(rho),
        "tangle": character.tangle,
        "linear_entropy": character.linear_entropy,
        "regime": character.regime,
        "bell_local_limit": states.BELL_LOCAL_LIMIT,
        "below_bell_local_limit": mu_eff < states.BELL_LOCAL_LIMIT,
    })


def _steering_payload(report, extra=None) -> str:
    payload = {"n": report.n}
    if extra:
        payload.update(extra)
    payload.update({
        "s_value": report.s_value,
        "bound": report.bound,
        "violated": report.violated,
        "per_setting": report.per_setting,
    })
    return _to_json(payload)


def _cmd_steer(args) -> str:
    report = honest_steering(states.werner(args.mu),
                             geometry.scheme_axes(args.n))
    return _steering_payload(report, {"mu": args.mu})


def _cmd_cheat(args) -> str:
    ensemble = make_ensemble(args.n, args.kind)
    report = cheat_steering(ensemble, geometry.scheme_axes(args.n))
    return _steering_payload(report, {"kind": args.kind})


def _cmd_bell(args) -> str:
    report = chsh_max(states.werner(args.mu))
    a1, a2, b1, b2 = report.settings
    return _to_json({
        "mu": args.mu,
        "b_value": report.b_value,
        "violated": report.violated,
        "settings": {"a1": a1, "a2": a2, "b1": b1, "b2": b2},
    })


def _scan_row(mu: float, n: int) -> str:
    rho = states.werner(mu)
    steer = honest_steering(rho, geometry.scheme_axes(n))
    bell = chsh_max(rho)
    regime = states.classify(mu)
    cells = [_fmt(mu, _CSV_DIGITS), _fmt(steer.s_value, _CSV_DIGITS),
             _fmt(steer.bound, _CSV_DIGITS), _fmt(bell.b_value, _CSV_DIGITS),
             regime]
    return ",".join(cells)


def _cmd_scan(args) -> str:
    if not 0.0 <= args.start <= args.stop <= 1.0:
        raise DomainError("scan range must satisfy 0 <= from <= to <= 1")
    if args.step <= 0.0:
        raise DomainError("--step must be positive")
    count = int(np.floor((args.stop - args.start) / args.step + 1e-9)) + 1
    grid = [args.start + i * args.step for i in range(count)]
    threads = _resolve_threads(args)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        rows = list(pool.map(lambda mu: _scan_row(mu, args.n), grid))
    return "\n".join(["mu,s_n,c_n,b_max,regime"] + rows)


def _flatten_bundle(bundle: dict) -> dict:
    flat = {
        "mu": bundle["mu"], "n": bundle["n"], "shots": bundle["shots"],
        "seed": bundle["seed"],
    }
    for key, value in bundle["exact"].items():
        if key == "violations_by_n":
            for k, flag in value.items():
                flat[f"exact_violated_n{k}"] = flag
        else:
            flat[f"exact_{key}"] = value
    sampled = bundle["sampled"]
    flat["s_hat"] = sampled["s_hat"]["value"]
    flat["s_hat_err"] = sampled["s_hat"]["std_error"]
    flat["s_hat_err_bootstrap"] = sampled["s_bootstrap"]["std_error"]
    flat["s_violated"] = sampled["s_violated"]
    flat["b_hat"] = sampled["b_hat"]["value"]
    flat["b_hat_err"] = sampled["b_hat"]["std_error"]
    flat["b_violated"] = sampled["b_violated"]
    for key, value in bundle["tomography"].items():
        flat[f"tomo_{key}"] = value
    return flat


def _csv_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if bool(value) else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _fmt(value, _CSV_DIGITS)
    return str(value)


def _cmd_mc(args) -> str:
    if args.repeats < 1:
        raise DomainError("--repeats must be >= 1")
    if args.shots < 1:
        raise DomainError("--shots must be >= 1")
    seed = _resolve_seed(args)
    threads = _resolve_threads(args)
    run_seeds = [substream_seed(seed, r) for r in range(args.repeats)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        runs = list(pool.map(
            lambda s: full_pipeline(args.mu, args.n, args.shots, s), run_seeds
        ))
    if args.format == "json":
        return _to_json({
            "mu": args.mu, "n": args.n, "shots": args.shots, "seed": seed,
            "repeats": args.repeats, "runs": runs,
        })
    rows = [_flatten_bundle(bundle) for bundle in runs]
    header = ",".join(rows[0])
    lines = [header]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row.values()))
    return "\n".join(lines)


def _cmd_tomo(args) -> str:
    from .tomography import tomography, tomography_settings

    if args.shots < 1:
        raise DomainError("--shots must be >= 1")
    seed = _resolve_seed(args)
    target = states.werner(args.mu)
    table = sample_counts(target, tomography_settings(), args.shots, seed)
    rho_hat = tomography(table)
    payload = {
        "mu": args.mu,
        "shots": args.shots,
        "seed": seed,
        "rho_hat": [[complex(entry) for entry in row] for row in rho_hat],
        "fidelity_to_target": fidelity(rho_hat, target),
        "tangle": states.tangle(rho_hat),
        "linear_entropy": states.linear_entropy(rho_hat),
    }
    if args.format == "json":
        return _to_json(payload)
    cells = {
        "mu": args.mu, "shots": args.shots, "seed": seed,
        "fidelity_to_target": payload["fidelity_to_target"],
        "tangle": payload["tangle"],
        "linear_entropy": payload["linear_entropy"],
    }
    for i in range(4):
        for j in range(4):
            cells[f"rho_re_{i}{j}"] = rho_hat[i, j].real
            cells[f"rho_im_{i}{j}"] = rho_hat[i, j].imag
    header = ",".join(cells)
    values = ",".join(_csv_cell(v) for v in cells.values())
    return "\n".join([header, values])


def _cmd_report(args) -> str:
    from .report import render_all

    if args.shots < 1:
        raise DomainError("--shots must be >= 1")
    seed = _resolve_seed(args)
    written = render_all(args.out, n=args.n, shots=args.shots, seed=seed,
                         step=args.step)
    return _to_json({"written": [str(path) for path in written]})


_HANDLERS = {
    "scheme": _cmd_scheme,
    "bounds": _cmd_bounds,
    "state": _cmd_state,
    "steer": _cmd_steer,
    "cheat": _cmd_cheat,
    "bell": _cmd_bell,
    "scan": _cmd_scan,
    "mc": _cmd_mc,
    "tomo": _cmd_tomo,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        payload = _HANDLERS[args.command](args)
        output = getattr(args, "output", None)
        if output:
            with open(output, "w", encoding="utf-8") as handle:
                handle.write(payload + "\n")
        else:
            print(payload)
        return 0
    except DomainError as exc:
        detail = str(exc).replace("\n", " ")
        print(f'{{"error": "validation", "detail": {_quote(detail)}}}',
              file=sys.stderr)
        return 1
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports everything
        detail = f"{type(exc).__name__}: {exc}".replace("\n", " ")
        print(f'{{"error": "internal", "detail": {_quote(detail)}}}',
              file=sys.stderr)
        return 2


def _quote(text: str) -> str:
    return json.dumps(text)


if __name__ == "__main__":
    sys.exit(main())
