"""Command-line front end producing reproducible JSON/CSV reports.

Commands: solve, optimal, bounds, scaling, hardy, converge, mesh.
Flags may be preloaded from a JSON config file (--config); explicit flags
override the file.  All floating-point output is printed with 12
significant digits so reruns diff cleanly.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from . import bounds, exact1d, geometry, mixed_dn, robin
from .assembly import SigmaField
from .errors import ArgumentError, RobinspecError
from .geometry import DomainSpec, build_mesh, gamma_arcs, gamma_all, gamma_none, gamma_sides

_MAX_WORKERS = 4


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _parse_grid(text: str) -> List[float]:
    vals = [float(t) for t in str(text).split(",") if t != ""]
    if not vals:
        raise ArgumentError("empty parameter grid")
    return vals


def _parse_gamma(text: str):
    text = str(text)
    if text == "all":
        return gamma_all()
    if text == "none":
        return gamma_none()
    if text.startswith("edges="):
        return gamma_sides(*(int(t) for t in text[len("edges="):].split(",")))
    if text.startswith("arc="):
        ranges = []
        for part in text[len("arc="):].split(","):
            lo, hi = part.split(":")
            ranges.append((float(lo), float(hi)))
        return gamma_arcs(ranges)
    raise ArgumentError(f"cannot parse gamma selector {text!r}")


def _domain_from(opts: dict) -> DomainSpec:
    kind = opts["domain"]
    gamma = _parse_gamma(opts["gamma"])
    if kind == "interval":
        return geometry.interval(opts["a"], opts["b"], gamma=gamma)
    if kind == "square":
        return geometry.unit_square(gamma=gamma)
    if kind == "rect":
        return geometry.rectangle(opts["width"], opts["height"], gamma=gamma)
    if kind == "triangle":
        return geometry.polygon([(0, 0), (1, 0), (0, 1)], gamma=gamma)
    if kind == "polygon":
        if not opts.get("vertices"):
            raise ArgumentError("--vertices required for --domain polygon")
        verts = []
        for pair in opts["vertices"].split(";"):
            x, y = pair.split(",")
            verts.append((float(x), float(y)))
        return geometry.polygon(verts, gamma=gamma)
    if kind == "disk":
        cx, cy = (float(t) for t in str(opts["center"]).split(","))
        return geometry.disk((cx, cy), opts["radius"], int(opts["segments"]), gamma=gamma)
    raise ArgumentError(f"unknown domain {kind!r}")


def _domain_diameter(domain: DomainSpec) -> float:
    if domain.kind == "interval":
        return domain.b - domain.a
    if domain.kind == "disk":
        return 2.0 * domain.radius
    verts = np.array(domain.vertices)
    return float(max(np.linalg.norm(p - q) for p in verts for q in verts))


def _mesh_at_level(domain: DomainSpec, level: int, target_h: Optional[float]):
    base_h = target_h if target_h is not None else _domain_diameter(domain)
    mesh = build_mesh(domain, base_h)
    for _ in range(level):
        mesh = geometry.refine(mesh)
    return mesh


def _sigma_from(opts: dict, mesh) -> SigmaField:
    if opts["domain"] == "interval" and (opts.get("sigma_a") is not None
                                         or opts.get("sigma_b") is not None):
        vals = np.zeros(mesh.num_nodes)
        left = mesh.boundary[0, 0]
        right = mesh.boundary[1, 0]
        vals[left] = opts.get("sigma_a") or 0.0
        vals[right] = opts.get("sigma_b") or 0.0
        return SigmaField.nodal(vals)
    value = opts.get("sigma")
    if value is None:
        raise ArgumentError("a sigma value is required (--sigma or --sigma-a/--sigma-b)")
    if opts["gamma"] == "all":
        return SigmaField.constant(float(value))
    return SigmaField.on_gamma(mesh, float(value))


def _emit_text(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out: Optional[str]) -> None:
    _emit_text(json.dumps(payload, indent=2) + "\n", out)


def _csv(rows: List[List[str]]) -> str:
    return "\n".join(",".join(row) for row in rows) + "\n"


def _pool_map(fn, items):
    if len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(_MAX_WORKERS, len(items))) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_solve(opts: dict) -> int:
    domain = _domain_from(opts)
    mesh = _mesh_at_level(domain, opts["levels"], opts.get("target_h"))
    sigma = _sigma_from(opts, mesh)
    res = robin.lowest_eigenvalue(mesh, sigma, seed=opts["seed"])
    h = geometry.max_element_diameter(mesh)
    payload = {
        "lambda1": float(_fmt(res.value)),
        "residual": float(_fmt(res.residual)),
        "level": opts["levels"],
        "h": float(_fmt(h)),
        "dofs": mesh.num_nodes,
    }
    _emit_json(payload, opts.get("out"))
    return 0


def cmd_optimal(opts: dict) -> int:
    domain = _domain_from(opts)
    mesh = _mesh_at_level(domain, opts["levels"], opts.get("target_h"))
    mass = _parse_grid(opts["m"])[0]
    opt = mixed_dn.optimal_sigma(mesh, mass, seed=opts["seed"])
    payload = {
        "m": float(_fmt(opt.mass)),
        "xi": float(_fmt(opt.value)),
        "E1": float(_fmt(opt.ground.value)),
        "mass_defect": float(_fmt(opt.mass_defect)),
        "lambda_check": float(_fmt(opt.lambda_check)),
        "level": opts["levels"],
        "dofs": mesh.num_nodes,
    }
    _emit_json(payload, opts.get("out"))
    nodes, arclen = geometry.gamma_arclength(mesh)
    sigma_vals = np.asarray(opt.sigma.values)
    rows = [["arclength", "sigma_m"]]
    for s, node in zip(arclen, nodes):
        rows.append([_fmt(s), _fmt(sigma_vals[node])])
    with open(opts["csv"], "w") as fh:
        fh.write(_csv(rows))
    return 0


def cmd_bounds(opts: dict) -> int:
    domain = _domain_from(opts)
    mesh = _mesh_at_level(domain, opts["levels"], opts.get("target_h"))
    rows = [["quantity", "m", "lower", "computed", "upper",
             "slack_lower", "slack_upper", "tol", "pass"]]
    m_grid = _parse_grid(opts["m"]) if opts.get("m") else []
    reports = _pool_map(lambda m: bounds.optimal_eigenvalue_sandwich(mesh, m), m_grid)
    for m, rep in zip(m_grid, reports):
        rows.append([rep.quantity, _fmt(m), _fmt(rep.lower), _fmt(rep.computed),
                     _fmt(rep.upper), _fmt(rep.slack_lower), _fmt(rep.slack_upper),
                     _fmt(rep.tol), str(rep.passed).lower()])
    if opts.get("sigma"):
        for s in _parse_grid(opts["sigma"]):
            rep = bounds.robin_inradius_report(mesh, domain, s)
            rows.append([rep.quantity, "", _fmt(rep.lower), _fmt(rep.computed),
                         _fmt(rep.upper), _fmt(rep.slack_lower), _fmt(rep.slack_upper),
                         _fmt(rep.tol), str(rep.passed).lower()])
    _emit_text(_csv(rows), opts.get("out"))
    return 0


def cmd_scaling(opts: dict) -> int:
    domain = _domain_from(opts)
    mesh = _mesh_at_level(domain, opts["levels"], opts.get("target_h"))
    sigma = _sigma_from(opts, mesh)
    eps_grid = _parse_grid(opts["eps"])
    table = bounds.scaling_table(mesh, sigma, eps_grid, seed=opts["seed"])
    shrink, expand = bounds.scaling_limits(mesh, sigma)
    rows = [["eps", "lambda1", "eps_lambda1", "eps2_lambda1",
             "shrink_limit", "expand_limit"]]
    for row in table:
        rows.append([_fmt(row.eps), _fmt(row.eigenvalue), _fmt(row.eps_eigenvalue),
                     _fmt(row.eps2_eigenvalue), _fmt(shrink), _fmt(expand)])
    _emit_text(_csv(rows), opts.get("out"))
    return 0


def cmd_hardy(opts: dict) -> int:
    domain = _domain_from(opts)
    mesh = _mesh_at_level(domain, opts["levels"], opts.get("target_h"))
    sigmas = _parse_grid(opts["sigma"])
    rows = [["sigma", "alpha", "coefficient", "trials", "violations", "pass"]]
    for s in sigmas:
        alphas = []
        for tok in str(opts["alpha"]).split(","):
            alphas.append(0.5 / s if tok == "auto" else float(tok))
        reports = _pool_map(
            lambda a: bounds.hardy_report(mesh, s, a, trials=opts["trials"],
                                          seed=opts["seed"]), alphas)
        for a, rep in zip(alphas, reports):
            rows.append([_fmt(s), _fmt(a), _fmt(rep.coefficient),
                         str(len(rep.trials)), str(rep.violations),
                         str(rep.passed).lower()])
    _emit_text(_csv(rows), opts.get("out"))
    return 0


def cmd_converge(opts: dict) -> int:
    domain = _domain_from(opts)
    levels = opts["levels"]
    values = []
    hs = []
    dofs = []
    for lvl in range(1, levels + 1):
        mesh = _mesh_at_level(domain, lvl, opts.get("target_h"))
        sigma = _sigma_from(opts, mesh)
        values.append(robin.lowest_eigenvalue(mesh, sigma, seed=opts["seed"]).value)
        hs.append(geometry.max_element_diameter(mesh))
        dofs.append(mesh.num_nodes)
    rows = [["level", "h", "dofs", "lambda1", "diff", "order"]]
    diffs = [abs(values[i] - values[i + 1]) for i in range(len(values) - 1)]
    for i, lam in enumerate(values):
        diff = _fmt(diffs[i]) if i < len(diffs) else ""
        order = ""
        if i + 1 < len(diffs) and diffs[i + 1] > 0:
            order = _fmt(math.log2(diffs[i] / diffs[i + 1]))
        rows.append([str(i + 1), _fmt(hs[i]), str(dofs[i]), _fmt(lam), diff, order])
    _emit_text(_csv(rows), opts.get("out"))
    return 0


def cmd_mesh(opts: dict) -> int:
    domain = _domain_from(opts)
    mesh = _mesh_at_level(domain, opts["levels"], opts.get("target_h"))
    if not opts.get("out"):
        raise ArgumentError("mesh export needs --out")
    geometry.write_mesh(mesh, opts["out"])
    return 0


_COMMANDS = {
    "solve": cmd_solve,
    "optimal": cmd_optimal,
    "bounds": cmd_bounds,
    "scaling": cmd_scaling,
    "hardy": cmd_hardy,
    "converge": cmd_converge,
    "mesh": cmd_mesh,
}

_DEFAULTS = {
    "domain": "square", "gamma": "all",
    "a": 0.0, "b": 1.0, "width": 2.0, "height": 1.0,
    "center": "0,0", "radius": 1.0, "segments": 16,
    "vertices": None,
    "sigma": None, "sigma_a": None, "sigma_b": None,
    "m": "1", "eps": "1", "alpha": "0.5", "trials": 25,
    "levels": 3, "target_h": None,
    "out": None, "csv": "sigma_m.csv", "seed": 42,
    "config": None,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robinspec",
        description="Robin eigenvalue solves, optimal boundary coefficients, "
                    "and bound certification tables.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--domain", choices=["interval", "square", "rect",
                                            "triangle", "polygon", "disk"])
        p.add_argument("--gamma")
        p.add_argument("--a", type=float)
        p.add_argument("--b", type=float)
        p.add_argument("--width", type=float)
        p.add_argument("--height", type=float)
        p.add_argument("--center")
        p.add_argument("--radius", type=float)
        p.add_argument("--segments", type=int)
        p.add_argument("--vertices")
        p.add_argument("--sigma")
        p.add_argument("--sigma-a", dest="sigma_a", type=float)
        p.add_argument("--sigma-b", dest="sigma_b", type=float)
        p.add_argument("--m")
        p.add_argument("--eps")
        p.add_argument("--alpha")
        p.add_argument("--trials", type=int)
        p.add_argument("--levels", type=int)
        p.add_argument("--target-h", dest="target_h", type=float)
        p.add_argument("--out")
        p.add_argument("--csv")
        p.add_argument("--seed", type=int)
        p.add_argument("--config")
    return parser


def _merge_options(args: argparse.Namespace) -> dict:
    opts = dict(_DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(_DEFAULTS)
        if unknown:
            raise ArgumentError(f"unknown config keys: {sorted(unknown)}")
        opts.update(loaded)
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        opts[key] = value
    return opts


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _merge_options(args)
        return _COMMANDS[args.command](opts)
    except (RobinspecError, OSError, json.JSONDecodeError) as exc:
        diagnostic = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, (ArgumentError, json.JSONDecodeError, OSError)):
            sys.stderr.write(json.dumps(diagnostic) + "\n")
            return 2
        sys.stderr.write(json.dumps(diagnostic) + "\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
