"""Command-line driver: run one benchmark mesh or a convergence sweep.

Writes ``report.csv`` (one row per refinement level) and optionally
``field.dat`` (sampled displacements and resultants), printing a one-line
summary per level.  Exit codes: 0 success, 2 usage error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from .cases import (ConvergenceReport, make_case, run_convergence, solve_case,
                    write_report_csv)
from .errors import (IndefiniteSystemError, NumericalError,
                     SingularGeometryError, SingularSystemError)
from .fields import write_field


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="klshell",
        description="Kirchhoff-Love shell benchmarks with quadratic NURBS "
                    "cs/cas elements")
    p.add_argument("--benchmark", required=True,
                   choices=["strip", "hemisphere", "scordelis", "hypar"])
    p.add_argument("--element", default="cas", choices=["cs", "cas"])
    p.add_argument("--quad", type=int, default=3, choices=[2, 3],
                   help="Gauss points per direction")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--slenderness", type=float,
                   help="R/t (L/t for the hypar); converted to thickness")
    g.add_argument("--thickness", type=float)
    p.add_argument("--levels", type=int, default=None,
                   help="number of uniform refinement levels to sweep")
    p.add_argument("--elements-per-side", type=int, default=None,
                   help="solve a single uniform mesh with this many elements "
                        "per side instead of sweeping levels")
    p.add_argument("--sample-density", type=int, default=None,
                   help="write field.dat sampled on this parametric grid")
    p.add_argument("--outdir", default=".")
    return p


def _single_mesh(case, n_per_side: int) -> tuple[int, int]:
    nu0, nv0 = case.initial_mesh
    if not case.refine_v:
        return n_per_side, nv0
    return n_per_side, max(1, (n_per_side * nv0) // nu0)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.levels is not None and args.levels < 1:
        parser.error("--levels must be >= 1")
    if args.levels is not None and args.elements_per_side is not None:
        parser.error("--levels and --elements-per-side are exclusive")

    case = make_case(args.benchmark, thickness=args.thickness,
                     slenderness=args.slenderness)
    os.makedirs(args.outdir, exist_ok=True)

    try:
        if args.elements_per_side is not None:
            mesh = _single_mesh(case, args.elements_per_side)
            report = ConvergenceReport(case_id=case.id, element_kind=args.element,
                                       quad_n=args.quad,
                                       slenderness=case.slenderness)
            import time as _time
            t0 = _time.perf_counter()
            res = solve_case(case, mesh, args.element, args.quad)
            row = {"level": 0, "n_el_u": mesh[0], "n_el_v": mesh[1],
                   "n_dof": res.n_dof, "deflection": res.deflection,
                   "normalized": res.normalized, "e_n11": None, "e_m11": None,
                   "Em": None, "Eb": None, "Et": None,
                   "wall_s": _time.perf_counter() - t0}
            report.rows.append(row)
            last = res
        else:
            levels = args.levels if args.levels is not None else 5
            report = run_convergence(case, args.element, args.quad, levels)
            last = None
    except (NumericalError, SingularSystemError, IndefiniteSystemError,
            SingularGeometryError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    for row in report.rows:
        norm = "" if row["normalized"] is None else f"  norm {row['normalized']:+.5f}"
        print(f"level {row['level']}  elems {row['n_el_u']}x{row['n_el_v']}"
              f"  dofs {row['n_dof']}  deflection {row['deflection']:+.6e}"
              f"{norm}  [{row.get('wall_s', 0.0):.2f}s]")

    write_report_csv(report, os.path.join(args.outdir, "report.csv"))

    if args.sample_density is not None:
        if last is None:
            mesh = case.mesh_at_level(len(report.rows) - 1)
            last = solve_case(case, mesh, args.element, args.quad)
        header = {"benchmark": case.id, "element": args.element,
                  "mesh": f"{last.mesh[0]}x{last.mesh[1]}",
                  "slenderness": format(case.slenderness, ".17g")}
        write_field(last.solution, os.path.join(args.outdir, "field.dat"),
                    header, density=args.sample_density)
    return 0


if __name__ == "__main__":
    sys.exit(main())
