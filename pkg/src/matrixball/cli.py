"""Batch command line: triangle areas, verification suites, boundary sweeps,
and extremal searches, with machine-readable JSON and CSV output.

Exit codes are a stable contract: 0 success, 1 property failure, 2 input
validation, 3 numerical or IO failure.  Reports are deterministic for a
fixed seed except for the timestamp field.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from .domain import MatrixPoint, MembershipError, ShapeError, contains
from .search import BoundViolationError, SearchConfig, boundary_sweep, equality_diagnostics, maximize_area
from .serialize import VertexFileError, load_vertex_file, matrix_to_json, write_json_atomic, write_text_atomic
from .suites import SUITE_NAMES, run_suite
from .triangle import area_gauss_bonnet, area_quadrature, area_stokes, area_vformula

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_METHODS = {
    "vformula": area_vformula,
    "stokes": area_stokes,
    "quadrature": area_quadrature,
    "gauss-bonnet": area_gauss_bonnet,
}


def _default_seed(value) -> int:
    if value is not None:
        return int(value)
    return int(os.environ.get("HSD_SEED", "0"))


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def _result_payload(res) -> dict:
    return {"value": res.value, "error": res.error, "diagnostics": _jsonable(res.diagnostics)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def cmd_area(args) -> int:
    try:
        p, q, verts = load_vertex_file(args.input)
    except FileNotFoundError:
        print(f"error: input file not found: {args.input}", file=sys.stderr)
        return EXIT_VALIDATION
    except VertexFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    for k, v in enumerate(verts):
        if not contains(v):
            print(f"error: field 'vertices[{k}]': sigma_max = {v.sigma_max:.6g} is not below 1", file=sys.stderr)
            return EXIT_VALIDATION

    methods = list(_METHODS) if args.method == "all" else [args.method]
    if "gauss-bonnet" in methods and (p, q) != (1, 1):
        if args.method == "gauss-bonnet":
            print("error: gauss-bonnet area applies to the disc (p = q = 1) only", file=sys.stderr)
            return EXIT_VALIDATION
        methods.remove("gauss-bonnet")

    results = {}
    try:
        for m in methods:
            results[m] = _METHODS[m](*verts)
    except MembershipError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (np.linalg.LinAlgError, FloatingPointError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    names = sorted(results)
    deltas = {
        f"{a}-{b}": results[a].value - results[b].value
        for i, a in enumerate(names)
        for b in names[i + 1 :]
    }
    rank = min(p, q)
    max_abs = max(abs(r.value) for r in results.values())
    payload = {
        "timestamp": _timestamp(),
        "seed": _default_seed(args.seed),
        "input": {
            "domain": {"p": p, "q": q},
            "vertices": [matrix_to_json(v.entries) for v in verts],
        },
        "rank": rank,
        "bound": rank * np.pi,
        "results": {m: _result_payload(r) for m, r in results.items()},
        "pairwise_deltas": deltas,
        "bound_margin": rank * np.pi - max_abs,
    }
    try:
        if args.out:
            write_json_atomic(args.out, payload)
        else:
            json.dump(payload, sys.stdout, indent=2, sort_keys=True)
            print()
    except OSError as exc:
        print(f"io failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    if args.p < 1 or args.q < 1:
        print("error: dimensions must be positive", file=sys.stderr)
        return EXIT_VALIDATION
    seed = _default_seed(args.seed)
    try:
        checks = run_suite(args.suite, args.p, args.q, args.trials, seed)
    except BoundViolationError as exc:
        print(f"FAIL bound violated: {exc}", file=sys.stderr)
        if exc.triangle is not None:
            json.dump({"offending_triangle": exc.triangle}, sys.stderr)
            print(file=sys.stderr)
        return EXIT_PROPERTY
    all_pass = True
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: worst residual {c.worst:.6e} (tolerance {c.tolerance:.1e})")
        if not c.passed:
            all_pass = False
            if c.detail:
                print(f"  offending instance: {json.dumps(_jsonable(c.detail), sort_keys=True)}", file=sys.stderr)
    return EXIT_OK if all_pass else EXIT_PROPERTY


def cmd_sweep(args) -> int:
    try:
        eps_list = [float(x) for x in args.eps_list.split(",") if x.strip()]
    except ValueError:
        print("error: --eps-list must be comma-separated floats", file=sys.stderr)
        return EXIT_VALIDATION
    if not eps_list or any(not (0.0 < e < 0.5) for e in eps_list):
        print("error: eps values must lie in (0, 0.5)", file=sys.stderr)
        return EXIT_VALIDATION
    rank = min(args.p, args.q)
    rows = boundary_sweep(args.p, args.q, eps_list)
    lines = ["eps,area,bound_gap"]
    for eps, area in rows:
        lines.append(f"{eps:.17g},{area:.17g},{rank * np.pi - area:.17g}")
    text = "\n".join(lines) + "\n"
    try:
        if args.csv:
            write_text_atomic(args.csv, text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"io failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_maximize(args) -> int:
    seed = _default_seed(args.seed)
    try:
        cfg = SearchConfig(
            p=args.p,
            q=args.q,
            iterations=args.budget,
            restarts=args.restarts,
            seed=seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    trace = maximize_area(cfg)
    report = equality_diagnostics(trace)
    payload = {
        "timestamp": _timestamp(),
        "seed": seed,
        "config": {
            "p": cfg.p,
            "q": cfg.q,
            "margins": list(cfg.margins),
            "iterations": cfg.iterations,
            "restarts": cfg.restarts,
            "method": cfg.method,
        },
        "target": cfg.target,
        "best_abs": trace.best_abs,
        "achieved_fraction": trace.achieved_fraction,
        "stagnated": trace.stagnated,
        "best_curve": trace.best_curve,
        "stages": [
            {
                "margin": st.margin,
                "best_abs": st.best_abs,
                "defects": list(st.defects),
                "evaluations": st.evaluations,
            }
            for st in trace.stages
        ],
        "best_vertices": [matrix_to_json(v.entries) for v in trace.best_vertices],
        "final_defects": list(trace.stages[-1].defects),
        "equality_diagnostics": report.to_dict(),
    }
    try:
        if args.out:
            write_json_atomic(args.out, payload)
        else:
            json.dump(payload, sys.stdout, indent=2, sort_keys=True)
            print()
    except OSError as exc:
        print(f"io failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matrixball",
        description="Triangle areas, verification suites, and extremal searches on type-I matrix balls.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_area = sub.add_parser("area", help="compute a triangle area from a vertex file")
    p_area.add_argument("--input", required=True, help="vertex file (JSON)")
    p_area.add_argument("--method", default="all", choices=["all", *sorted(_METHODS)])
    p_area.add_argument("--out", default=None, help="write the JSON report here (default stdout)")
    p_area.add_argument("--seed", type=int, default=None)
    p_area.set_defaults(func=cmd_area)

    p_verify = sub.add_parser("verify", help="run a named property suite")
    p_verify.add_argument("--suite", required=True, choices=list(SUITE_NAMES))
    p_verify.add_argument("--p", type=int, required=True)
    p_verify.add_argument("--q", type=int, required=True)
    p_verify.add_argument("--trials", type=int, default=50)
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="near-ideal boundary sweep, CSV output")
    p_sweep.add_argument("--p", type=int, required=True)
    p_sweep.add_argument("--q", type=int, required=True)
    p_sweep.add_argument("--eps-list", required=True, help="comma-separated offsets in (0, 0.5)")
    p_sweep.add_argument("--csv", default=None, help="write CSV here (default stdout)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_max = sub.add_parser("maximize", help="anneal toward the rank*pi bound")
    p_max.add_argument("--p", type=int, required=True)
    p_max.add_argument("--q", type=int, required=True)
    p_max.add_argument("--restarts", type=int, default=2)
    p_max.add_argument("--budget", type=int, default=3000, help="function evaluations per stage")
    p_max.add_argument("--seed", type=int, default=None)
    p_max.add_argument("--out", default=None, help="write the trace JSON here (default stdout)")
    p_max.set_defaults(func=cmd_maximize)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ShapeError, MembershipError, VertexFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
