"""Command-line front end.

Commands:
    condcap cap <config.json>                      capacity run
    condcap field <config.json> --out grid.csv     potential on a grid
    condcap hm <config.json> --component j [--out] harmonic measure

Exit codes: 0 ok, 2 config error, 3 geometry error, 4 solver error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .bie import SolverError, SolverOptions
from .condenser import CondenserProblem, run
from .field import PotentialField, harmonic_measure
from .geometry import (
    GeometryError,
    make_circle,
    make_ellipse,
    make_polygon,
    make_trig_curve,
)

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Malformed or inconsistent problem configuration."""


# ----------------------------------------------------------------------
# config parsing
# ----------------------------------------------------------------------

def _cx(value, where):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"{where}: expected a number or [re, im] pair, got {value!r}")


def _curve_from_config(spec, idx):
    where = f"curves[{idx}]"
    if not isinstance(spec, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = spec.get("kind")
    role = spec.get("role", "plate")
    orientation = spec.get("orientation")
    if role not in ("plate", "neumann"):
        raise ConfigError(f"{where}: role must be 'plate' or 'neumann'")
    if orientation not in ("ccw", "cw"):
        raise ConfigError(f"{where}: orientation must be 'ccw' or 'cw'")
    try:
        if kind == "circle":
            return make_circle(_cx(spec["center"], where), float(spec["radius"]),
                               orientation, role)
        if kind == "ellipse":
            r = spec["radii"]
            return make_ellipse(_cx(spec["center"], where), (float(r[0]), float(r[1])),
                                orientation, role)
        if kind == "polygon":
            verts = [_cx(v, where) for v in spec["vertices"]]
            return make_polygon(verts, orientation,
                                int(spec.get("grading_order", 3)), role)
        if kind == "trig":
            coeffs = {int(k): _cx(v, where) for k, v in spec["coeffs"].items()}
            return make_trig_curve(coeffs, orientation, role)
    except KeyError as exc:
        raise ConfigError(f"{where}: missing field {exc}") from exc
    raise ConfigError(f"{where}: unknown kind {kind!r}")


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    version = cfg.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    return cfg


def problem_from_config(cfg) -> CondenserProblem:
    curves = cfg.get("curves")
    if not isinstance(curves, list) or not curves:
        raise ConfigError("config needs a non-empty 'curves' list")
    comps = [_curve_from_config(c, i) for i, c in enumerate(curves)]
    plates = [c for c in comps if c.role == "plate"]
    walls = [c for c in comps if c.role == "neumann"]
    order = [c.role for c in comps]
    if order != ["plate"] * len(plates) + ["neumann"] * len(walls):
        raise ConfigError("list all plate curves before wall curves")
    levels = cfg.get("levels")
    if not isinstance(levels, list) or len(levels) != len(plates):
        raise ConfigError(
            f"'levels' must list one potential per plate "
            f"({len(plates)} plates, got {levels!r})"
        )
    if len(plates) < 2:
        raise ConfigError("m >= 2 required: a condenser needs at least two plates")
    alphas = []
    for i, c in enumerate(curves):
        if c.get("role", "plate") == "plate":
            a = c.get("alpha")
            alphas.append(None if a is None else _cx(a, f"curves[{i}].alpha"))
    alpha = cfg.get("alpha")
    try:
        return CondenserProblem(
            plates=plates, walls=walls, levels=[float(v) for v in levels],
            alphas=alphas, alpha=None if alpha is None else _cx(alpha, "alpha"),
        )
    except GeometryError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def options_from_config(cfg, args) -> tuple[int, SolverOptions]:
    solver = cfg.get("solver", {})
    if not isinstance(solver, dict):
        raise ConfigError("'solver' must be an object")
    n = args.n if args.n is not None else cfg.get("n")
    if not isinstance(n, int) or n < 4 or n % 2:
        raise ConfigError(f"'n' must be an even integer >= 4, got {n!r}")
    tol = args.tol if args.tol is not None else solver.get("tol", 1e-14)
    maxit = args.maxit if args.maxit is not None else solver.get("maxit", 100)
    mode = args.mode if args.mode is not None else solver.get("mode", "auto")
    if mode not in ("auto", "direct", "iterative"):
        raise ConfigError(f"solver mode must be auto|direct|iterative, got {mode!r}")
    return n, SolverOptions(tol=float(tol), maxit=int(maxit), mode=mode)


# ----------------------------------------------------------------------
# output documents
# ----------------------------------------------------------------------

def _sig15(x: float) -> float:
    return float(f"{x:.15g}")


def _json_ready(obj):
    if isinstance(obj, float):
        return _sig15(obj)
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    return obj


def _write_json(doc, out_path):
    text = json.dumps(_json_ready(doc), indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _result_doc(result, n, elapsed) -> dict:
    con = result.constants
    return {
        "capacity": result.capacity,
        "a": list(map(float, con.a)),
        "c": con.c,
        "nu": list(map(float, con.nu)),
        "case": result.case.label,
        "n": n,
        "residuals": {
            "sum_a": result.diagnostics["sum_a"],
            "h_deviation": result.diagnostics["h_deviation"],
            "bie_residual": result.diagnostics["bie_residual"],
        },
        "elapsed_seconds": elapsed,
    }


def _write_grid_csv(grid, out_path):
    lines = ["x,y,u,mask"]
    for x, y, u, label in grid.rows():
        u_txt = "" if u is None else f"{u:.15g}"
        lines.append(f"{x:.15g},{y:.15g},{u_txt},{label}")
    with open(out_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _grid_request(cfg):
    grid = cfg.get("grid")
    if grid is None:
        raise ConfigError("config has no 'grid' request")
    try:
        bounds = [float(b) for b in grid["bounds"]]
        nx, ny = int(grid["nx"]), int(grid["ny"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad grid request: {exc}") from exc
    if len(bounds) != 4 or nx < 2 or ny < 2:
        raise ConfigError("grid needs bounds [xmin,xmax,ymin,ymax] and nx,ny >= 2")
    return bounds, nx, ny


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_cap(args) -> int:
    cfg = load_config(args.config)
    problem = problem_from_config(cfg)
    n, options = options_from_config(cfg, args)
    t0 = time.perf_counter()
    result = run(problem, n, options)
    doc = _result_doc(result, n, time.perf_counter() - t0)
    _write_json(doc, args.out)
    return 0


def cmd_field(args) -> int:
    cfg = load_config(args.config)
    problem = problem_from_config(cfg)
    n, options = options_from_config(cfg, args)
    bounds, nx, ny = _grid_request(cfg)
    result = run(problem, n, options)
    grid = PotentialField(result).grid(bounds, nx, ny)
    _write_grid_csv(grid, args.out)
    return 0


def cmd_hm(args) -> int:
    cfg = load_config(args.config)
    problem = problem_from_config(cfg)
    if problem.ell != 0:
        raise ConfigError("harmonic measure requires a config without wall curves")
    if not 1 <= args.component <= problem.m:
        raise ConfigError(
            f"--component {args.component} outside 1..{problem.m}"
        )
    n, options = options_from_config(cfg, args)
    points = [
        _cx(p, f"points[{i}]") for i, p in enumerate(cfg.get("points", []))
    ]
    t0 = time.perf_counter()
    holder: list = []
    values = harmonic_measure(
        problem.components, args.component, np.asarray(points, dtype=complex),
        n, alpha=problem.alpha, options=options, result_out=holder,
    ) if points else []
    result = holder[0] if holder else None
    if result is None:
        # no point list: still run once so a grid can be produced
        levels = [1.0 if i == args.component - 1 else 0.0 for i in range(problem.m)]
        hm_problem = CondenserProblem(
            plates=problem.plates, walls=[], levels=levels,
            alphas=problem.alphas, alpha=problem.alpha,
        )
        result = run(hm_problem, n, options)
    doc = {
        "component": args.component,
        "n": n,
        "values": [
            {"z": [p.real, p.imag], "omega": float(v)}
            for p, v in zip(points, np.atleast_1d(values) if points else [])
        ],
        "elapsed_seconds": time.perf_counter() - t0,
    }
    if args.out:
        bounds, nx, ny = _grid_request(cfg)
        grid = PotentialField(result).grid(bounds, nx, ny)
        _write_grid_csv(grid, args.out)
        doc["grid_file"] = args.out
    _write_json(doc, None)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="condcap",
        description="Capacity and potential of planar condensers via boundary integrals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="problem configuration (JSON)")
        p.add_argument("--n", type=int, default=None, help="nodes per component")
        p.add_argument("--tol", type=float, default=None, help="iterative solver tolerance")
        p.add_argument("--maxit", type=int, default=None, help="iteration limit")
        p.add_argument("--mode", choices=["auto", "direct", "iterative"], default=None)

    p_cap = sub.add_parser("cap", help="compute the capacity")
    common(p_cap)
    p_cap.add_argument("--out", default=None, help="write the JSON result here")
    p_cap.set_defaults(func=cmd_cap)

    p_field = sub.add_parser("field", help="potential field on a grid")
    common(p_field)
    p_field.add_argument("--out", required=True, help="output CSV path")
    p_field.set_defaults(func=cmd_field)

    p_hm = sub.add_parser("hm", help="harmonic measure of one component")
    common(p_hm)
    p_hm.add_argument("--component", type=int, required=True, help="1-based index")
    p_hm.add_argument("--out", default=None, help="optional grid CSV path")
    p_hm.set_defaults(func=cmd_hm)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return 3
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
