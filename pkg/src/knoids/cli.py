"""Command-line pipelines.

Subcommands: scherk | knoid | noid2k | sister | verify.  Every run writes
its resolved configuration next to the outputs.  Exit codes: 0 success,
2 validation failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, ValidationError, load_config, write_resolved
from .contours import NoidSpec, contour_angles, contour_closure_error, measured_vertical_gap
from .meshio import export_mesh, graph_to_mesh, grid_to_mesh, write_csv
from .scherk import ScherkParams, scherk_conservation_residual, scherk_height
from .sister import gauss_bonnet_loop_check, mirror_curve, twist_along_vertical
from .solver import (
    SolverOptions,
    convergence_ladder,
    knoid_family,
    noid2k_family,
    solve_family,
)
from .spaces import NumericalError


def _ensure_out(cfg):
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_resolved(cfg, out / "resolved-config.txt")
    return out


def cmd_scherk(cfg):
    out = _ensure_out(cfg)
    space = cfg.space()
    par = ScherkParams(space)
    ss = np.linspace(0.0, cfg.scherk_smax, cfg.scherk_samples)
    rows = []
    for s in ss:
        u = scherk_height(par, float(s))
        res = float(scherk_conservation_residual(par, s)) if s > 0 else 0.0
        rows.append((float(s), u, res))
    write_csv(out / "scherk.csv", ["s", "u", "conservation_residual"], rows)
    # rotational graph mesh over an annular wedge
    r_vals = np.linspace(0.5, 2.0, 24)
    s_vals = np.linspace(1e-3, cfg.scherk_smax, 48)
    grid = np.empty((len(r_vals), len(s_vals), 3))
    for i, r in enumerate(r_vals):
        for j, s in enumerate(s_vals):
            grid[i, j] = (r * math.cos(s), r * math.sin(s), scherk_height(par, float(s)))
    pts, faces = grid_to_mesh(grid)
    export_mesh(out / "scherk.obj", pts, faces)
    return 0


def _write_contour(path, contour):
    lines = [f"# contour arcs={len(contour.arcs)}"]
    for name, v in contour.vertices.items():
        lines.append("vertex %s %.17g %.17g %.17g" % (name, v[0], v[1], v[2]))
    for arc in contour.arcs:
        lines.append(f"arc {arc.kind} {arc.label} {len(arc.points)}")
        for p in arc.points:
            lines.append("%.17g %.17g %.17g" % tuple(p))
    Path(path).write_text("\n".join(lines) + "\n")


def read_contour(path):
    """Round-trip reader for the contour text format: returns (vertices, arcs)."""
    vertices = {}
    arcs = []
    lines = Path(path).read_text().splitlines()
    i = 0
    while i < len(lines):
        ln = lines[i].strip()
        if ln.startswith("vertex"):
            parts = ln.split()
            vertices[parts[1]] = np.array([float(v) for v in parts[2:5]])
            i += 1
        elif ln.startswith("arc"):
            _, kind, label, n = ln.split()
            n = int(n)
            pts = np.array([[float(v) for v in lines[i + 1 + j].split()] for j in range(n)])
            arcs.append({"kind": kind, "label": label, "points": pts})
            i += 1 + n
        else:
            i += 1
    return vertices, arcs


def _solve_pipeline(cfg, family_builder, spec):
    out = _ensure_out(cfg)
    opts = SolverOptions(newton_tol=cfg.newton_tol)
    problems = family_builder(spec, list(cfg.truncations), cfg.depth)
    solutions = solve_family(problems, opts)
    rows = []
    for prob, (graph, report) in zip(problems, solutions):
        graph.meta["truncation"] = prob["spec"].truncation
        graph.contour = prob["contour"]
        t = prob["spec"].truncation
        _write_contour(out / f"contour_t{t:g}.txt", prob["contour"])
        pts, faces = graph_to_mesh(graph)
        export_mesh(out / f"solution_t{t:g}.obj", pts, faces)
        if not report.converged:
            raise NumericalError(f"solve at truncation {t:g} did not converge")
        rows.append((t, report.area, report.grad_norm, report.iterations,
                     int(report.converged), int(report.max_principle_ok),
                     contour_closure_error(prob["contour"])))
    write_csv(out / "solves.csv",
              ["truncation", "area", "grad_norm", "iterations", "converged",
               "max_principle", "contour_closure"], rows)
    if len(solutions) >= 2:
        ladder = convergence_ladder(solutions)
        write_csv(out / "ladder.csv",
                  ["pair", "sup_difference"],
                  [(i, s) for i, s in enumerate(ladder.sup_differences)])
        meta = [("monotone", int(ladder.monotone)),
                ("min_increment", ladder.min_increment),
                ("decreasing", int(ladder.decreasing))]
        write_csv(out / "ladder_meta.csv", ["key", "value"], meta)
    return problems, solutions, out


def cmd_knoid(cfg):
    spec = NoidSpec(cfg.space(), k=cfg.k, truncation=cfg.truncations[0], a=cfg.a)
    problems, solutions, out = _solve_pipeline(cfg, knoid_family, spec)
    _mirror_outputs(cfg, out, solutions[-1][0])
    return 0


def cmd_noid2k(cfg):
    spec = NoidSpec(cfg.space(), k=cfg.k, truncation=cfg.truncations[0],
                    d=cfg.d, alpha=cfg.alpha)
    problems, solutions, out = _solve_pipeline(cfg, noid2k_family, spec)
    delta = spec.delta
    write_csv(out / "family.csv", ["key", "value"],
              [("delta", delta), ("symmetric", int(abs(delta) < 1e-12))])
    return 0


def _mirror_outputs(cfg, out, graph):
    space = graph.space
    for arc in graph.contour.arcs:
        if arc.kind != "vertical":
            continue
        try:
            tw = twist_along_vertical(space, graph, arc)
        except ValueError:
            continue
        mc = mirror_curve(space.kappa, space.h_mean, tw)
        chk = gauss_bonnet_loop_check(mc, space.kappa)
        rows = list(zip(mc.params, mc.points[:, 0], mc.points[:, 1], mc.curvature))
        write_csv(out / f"mirror_{arc.label}.csv", ["t", "x", "y", "k_tilde"], rows)
        write_csv(out / f"twist_{arc.label}.csv", ["t", "alpha", "alpha_rate"],
                  list(zip(tw.params, tw.alpha, tw.alpha_rate)))
        write_csv(out / f"mirror_{arc.label}_audit.csv", ["key", "value"],
                  [("verdict", chk.verdict),
                   ("max_k_tilde", float(np.max(mc.curvature))),
                   ("two_H", 2.0 * space.h_mean)])


def cmd_sister(cfg):
    spec = NoidSpec(cfg.space(), k=cfg.k, truncation=cfg.truncations[-1], a=cfg.a)
    out = _ensure_out(cfg)
    opts = SolverOptions(newton_tol=cfg.newton_tol)
    problems = knoid_family(spec, [spec.truncation], cfg.depth)
    (graph, report), = solve_family(problems, opts)
    if not report.converged:
        raise NumericalError("solve did not converge")
    graph.contour = problems[0]["contour"]
    _mirror_outputs(cfg, out, graph)
    return 0


def cmd_verify(cfg):
    """Fast self-check of the main invariants (not the full test suite)."""
    import time

    from .spaces import SpaceParams, oriented_area, polyline_lift_displacements

    t0 = time.time()
    failures = []

    def check(name, ok):
        print(("PASS" if ok else "FAIL"), name)
        if not ok:
            failures.append(name)

    space = SpaceParams(-1.0, 0.3)
    th = np.linspace(0, 2 * math.pi, 20001)[::-1]
    loop = np.column_stack([0.3 * np.cos(th) + 0.1, 0.3 * np.sin(th) + 1.5])
    dz = float(np.sum(polyline_lift_displacements(space, loop)))
    area = oriented_area(space, loop)
    check("holonomy", abs(dz - 2 * space.tau * area) < 1e-6 * (1 + abs(area)))

    par = ScherkParams(SpaceParams(-1.0, 0.0))
    check("scherk value", abs(scherk_height(par, math.pi / 4) - math.log(1 + math.sqrt(2))) < 1e-9)
    ss = np.linspace(0.05, math.pi / 2 - 0.05, 50)
    par2 = ScherkParams(SpaceParams(-1.0, 0.3))
    check("scherk conservation",
          float(np.max(np.abs(scherk_conservation_residual(par2, ss)))) < 1e-10)

    spec = NoidSpec(SpaceParams(-1.0, 0.5), k=2, truncation=2.0, a=1.0)
    from .contours import knoid_contour, knoid_triangle

    tri = knoid_triangle(spec)
    cont = knoid_contour(spec, tri)
    gap = measured_vertical_gap(cont, "closure-vertical")
    check("knoid gap", abs(-gap - (4.0 - 2 * 0.5 * tri.oriented_area)) < 1e-6)
    check("contour closure", contour_closure_error(cont) < 1e-7)

    print(f"done in {time.time() - t0:.1f}s;", "all passed" if not failures else f"failed: {failures}")
    return 0 if not failures else 3


def main(argv=None):
    parser = argparse.ArgumentParser(prog="knoids",
                                     description="minimal graphs over polygonal "
                                                 "contours in fibered 3-spaces")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("scherk", "knoid", "noid2k", "sister", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--depth", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, overrides={
            "pipeline": args.command,
            "out_dir": args.out,
            "depth": args.depth,
        })
        handler = {
            "scherk": cmd_scherk, "knoid": cmd_knoid, "noid2k": cmd_noid2k,
            "sister": cmd_sister, "verify": cmd_verify,
        }[args.command]
        return handler(cfg)
    except (ValidationError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
