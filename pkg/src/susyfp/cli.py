"""Command-line entry points.

Subcommands: ``validate`` (parameter bounds), ``tabulate`` (W, V+, V-, U
on a grid), ``spectrum`` (closed-form level tables), ``density``
(spectral transition densities), ``figure1`` (drift-potential report for
the half-line family, with the metastability scan and a rendered
figure), ``verify`` (self-check suites).

Exit codes: 0 success, 2 parameter error, 3 truncation failure,
4 verification failure.  Data goes to ``--out`` as CSV with a manifest
header (or to stdout when no path is given); figures are PNG files next
to their CSV.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Dict, List, Optional, Tuple

import numpy as np

from .ces_families import CesParams, Family, beta_bound, default_domain, \
    drift_potential, energy_minus, energy_plus, susy_potential, \
    v_minus, v_plus, validate_params
from .errors import BoundViolation, ConvergenceError, DomainError, \
    NotStationaryError, PositivityLoss, SusyFpError, TruncationFailure
from .fokker_planck import build_transition_density, \
    metastability_crossover, metastability_scan
from .reporting import RunManifest, format_number, render_csv, \
    render_figure, write_atomic
from .susy_core import DEFAULT_POINTS, Domain, DomainKind
from .verification import SUITE_NAMES, run_suite

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_TRUNCATION = 3
EXIT_VERIFICATION = 4

_TABULATE_KINDS = ("W", "V+", "V-", "U")


def _params_from_args(args) -> CesParams:
    return validate_params(args.family, args.b, beta=args.beta,
                           gamma=args.gamma)


def _param_dict(params: CesParams) -> Dict[str, object]:
    out: Dict[str, object] = {"family": params.family.value, "b": params.b}
    if params.family is Family.A:
        out["beta"] = params.beta
    else:
        out["gamma"] = params.gamma
    return out


def _resolve_grid(args, params: Optional[CesParams] = None,
                  fallback: Optional[Domain] = None
                  ) -> Tuple[Domain, int, Dict[str, object]]:
    base = fallback if fallback is not None else default_domain(params)
    x_min = base.x_min if args.xmin is None else args.xmin
    x_max = base.x_max if args.xmax is None else args.xmax
    points = DEFAULT_POINTS if args.points is None else args.points
    if points < 2:
        raise DomainError(f"need at least 2 grid points, got {points!r}")
    domain = Domain(base.kind, float(x_min), float(x_max))
    grid = {"xmin": domain.x_min, "xmax": domain.x_max, "points": points}
    return domain, int(points), grid


def _deliver(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)
        print(f"wrote {out}")


def _figure_path(out: str) -> str:
    return os.path.splitext(out)[0] + ".png"


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    family = Family(args.family)
    if family is Family.A:
        ok = args.b > -2.0
        print(f"bound b > -2: b = {format_number(args.b)} -> "
              f"{'pass' if ok else 'fail'}")
        if ok:
            limit = beta_bound(args.b)
            ok_beta = abs(args.beta) < limit
            print(f"bound |beta| < {format_number(limit)}: |beta| = "
                  f"{format_number(abs(args.beta))} -> "
                  f"{'pass' if ok_beta else 'fail'}")
    else:
        ok = args.gamma > 0.0
        print(f"bound gamma > 0: gamma = {format_number(args.gamma)} -> "
              f"{'pass' if ok else 'fail'}")
        if ok:
            limit = -4.0 * args.gamma - 2.0
            ok_b = args.b > limit
            print(f"bound b > {format_number(limit)}: b = "
                  f"{format_number(args.b)} -> "
                  f"{'pass' if ok_b else 'fail'}")
    try:
        _params_from_args(args)
    except BoundViolation as exc:
        print(f"reason: {exc.reason}")
        return EXIT_PARAMETER
    print("valid")
    return EXIT_OK


def cmd_tabulate(args) -> int:
    params = _params_from_args(args)
    domain, n_points, grid = _resolve_grid(args, params)
    x = domain.grid(n_points)
    if args.kind == "W":
        values = susy_potential(params).w(x)
    elif args.kind == "V+":
        values = v_plus(params, x)
    elif args.kind == "V-":
        values = v_minus(params, x)
    else:
        values = drift_potential(params, x)
    manifest = RunManifest(
        command="tabulate",
        params={**_param_dict(params), "kind": args.kind},
        grid=grid)
    text = render_csv(manifest, ("x", "value"), list(zip(x, values)))
    _deliver(text, args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    params = _params_from_args(args)
    if args.count < 1:
        raise DomainError(f"count must be >= 1, got {args.count!r}")
    rows = [(n, energy_minus(params, n), energy_plus(params, n))
            for n in range(args.count)]
    manifest = RunManifest(
        command="spectrum",
        params={**_param_dict(params), "count": args.count})
    text = render_csv(manifest, ("n", "e_minus", "e_plus"), rows)
    _deliver(text, args.out)
    return EXIT_OK


def cmd_density(args) -> int:
    params = _params_from_args(args)
    domain, n_points, grid = _resolve_grid(args, params)
    density = build_transition_density(params, args.t, tol=args.tol)
    x = domain.grid(n_points)
    m = density.evaluate(x, args.x0)
    manifest = RunManifest(
        command="density",
        params={**_param_dict(params), "t": args.t, "x0": args.x0,
                "tol": args.tol},
        grid=grid)
    text = render_csv(manifest, ("x", "m"), list(zip(x, m)))
    _deliver(text, args.out)
    if args.plot:
        if args.out is None:
            print("plot skipped: --plot needs --out to name the file")
        else:
            path = _figure_path(args.out)
            render_figure(path, [(x, m, f"t = {args.t:g}")], "x",
                          "transition density",
                          title="spectral transition density")
            print(f"wrote {path}")
    return EXIT_OK


def cmd_figure1(args) -> int:
    gamma = args.gamma
    b_list = args.b if args.b else [-5.95, -5.75, -5.5, -5.25, -5.05]
    for b in b_list:
        validate_params("B", b, gamma=gamma)
    fallback = Domain.half_line()
    domain, n_points, grid = _resolve_grid(args, fallback=fallback)
    x = domain.grid(n_points)
    rows: List[Tuple[float, float, float]] = []
    curves = []
    for b in b_list:
        params = CesParams(Family.B, b=float(b), gamma=float(gamma))
        u_vals = drift_potential(params, x)
        rows.extend(zip(np.exp(-x), [float(b)] * x.size, u_vals))
        curves.append((b, params, u_vals))
    manifest = RunManifest(
        command="figure1",
        params={"gamma": gamma, "b": [float(b) for b in b_list]},
        grid=grid)
    text = render_csv(manifest, ("exp_neg_x", "b", "u"), rows)
    out = args.out if args.out is not None else "figure1.csv"
    _deliver(text, out)

    scan = metastability_scan(gamma, np.asarray(b_list, dtype=float))
    scan_rows = [
        (format_number(b), "metastable" if metastable else "unstable",
         "" if location is None else format_number(location))
        for b, metastable, location in scan]
    scan_manifest = RunManifest(
        command="figure1",
        params={"gamma": gamma, "b": [float(b) for b in b_list],
                "companion": "scan"})
    scan_path = os.path.splitext(out)[0] + "_scan.csv"
    write_atomic(scan_path, render_csv(
        scan_manifest, ("b", "class", "min_location"), scan_rows))
    print(f"wrote {scan_path}")

    classes = [metastable for _, metastable, _ in scan]
    if any(classes) and not all(classes):
        b_star = metastability_crossover(gamma, min(b_list), max(b_list))
        print(f"crossover b* = {format_number(b_star)}")
    else:
        print("crossover not bracketed by the b list")

    if args.plot:
        marks = []
        for (b, metastable, location), (_, params, _) in zip(scan, curves):
            if metastable and location is not None:
                marks.append((math.exp(-location),
                              float(drift_potential(params, location))))
        series = [(np.exp(-x), u_vals, f"b = {b:g}")
                  for b, _, u_vals in curves]
        path = _figure_path(out)
        render_figure(path, series, "exp(-x)", "drift potential U",
                      marks=marks,
                      title=f"half-line drift potentials, gamma = "
                            f"{gamma:g}")
        print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    params = None
    if args.family is not None:
        params = validate_params(args.family, args.b, beta=args.beta,
                                 gamma=args.gamma)
    results = run_suite(args.suite, params=params, seed=args.seed)
    for result in results:
        print(result.line())
    n_passed = sum(1 for r in results if r.passed)
    print(f"{n_passed}/{len(results)} checks passed")
    return EXIT_OK if n_passed == len(results) else EXIT_VERIFICATION


# ---------------------------------------------------------------------------
# parser


def _add_param_flags(sub, require_family=True):
    sub.add_argument("--family", choices=["A", "B"],
                     required=require_family)
    sub.add_argument("--b", type=float, required=require_family)
    sub.add_argument("--beta", type=float, default=0.0)
    sub.add_argument("--gamma", type=float, default=0.0)


def _add_grid_flags(sub):
    sub.add_argument("--xmin", type=float, default=None)
    sub.add_argument("--xmax", type=float, default=None)
    sub.add_argument("--points", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="susyfp",
        description="Solvable SUSY partner potentials and their "
                    "Fokker-Planck densities")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("validate", help="check the solvability bounds")
    _add_param_flags(p)
    p.set_defaults(handler=cmd_validate)

    p = subs.add_parser("tabulate",
                        help="write W, V+, V- or U on a grid")
    _add_param_flags(p)
    _add_grid_flags(p)
    p.add_argument("--kind", choices=list(_TABULATE_KINDS), required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_tabulate)

    p = subs.add_parser("spectrum", help="closed-form level table")
    _add_param_flags(p)
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_spectrum)

    p = subs.add_parser("density", help="spectral transition density")
    _add_param_flags(p)
    _add_grid_flags(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", default=None)
    p.add_argument("--plot", action=argparse.BooleanOptionalAction,
                   default=False)
    p.set_defaults(handler=cmd_density)

    p = subs.add_parser("figure1",
                        help="half-line drift potentials and "
                             "metastability scan")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--b", type=float, action="append", default=None)
    _add_grid_flags(p)
    p.add_argument("--out", default=None)
    p.add_argument("--plot", action=argparse.BooleanOptionalAction,
                   default=True)
    p.set_defaults(handler=cmd_figure1)

    p = subs.add_parser("verify", help="run a self-check suite")
    p.add_argument("--suite", choices=list(SUITE_NAMES), required=True)
    _add_param_flags(p, require_family=False)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed its message; fold its exit code into
        # ours (unknown flags and bad choices are parameter errors)
        return EXIT_OK if exc.code in (0, None) else EXIT_PARAMETER
    try:
        return args.handler(args)
    except BoundViolation as exc:
        print(f"reason: {exc.reason}")
        return EXIT_PARAMETER
    except TruncationFailure as exc:
        print("truncation failure: requested tolerance "
              f"{format_number(exc.requested_tol)}, smallest reachable "
              f"{format_number(exc.reachable)} with {exc.n_cap} modes")
        return EXIT_TRUNCATION
    except (DomainError, PositivityLoss, NotStationaryError,
            ConvergenceError) as exc:
        print(f"parameter error: {exc}")
        return EXIT_PARAMETER


if __name__ == "__main__":
    sys.exit(main())
