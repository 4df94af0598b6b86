"""Command line entry point: ``run``, ``convergence`` and ``mesh-info``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .driver import CASES, SCHEMES, convergence_study, fitted_order, run
from .io import parse_config, write_convergence_csv
from .mesh import load_mesh

DEFAULT_SEQUENCE = (36, 50, 71, 100)


def _common(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--case", choices=CASES)
    p.add_argument("--mesh", help="mesh file (.msh or raw)")
    p.add_argument("--cfl", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--fc", dest="f_c", type=float)
    p.add_argument("--tend", dest="t_end", type=float)
    p.add_argument("--boundary")
    p.add_argument("--resolution", type=float)
    p.add_argument("--dt-length", dest="dt_length")


def build_parser():
    parser = argparse.ArgumentParser(prog="fvcswe", description="Shallow water solver on triangle meshes.")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("run", help="run one simulation")
    _common(p)
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--out", dest="output_dir", help="directory for VTK frames and diagnostics.csv")
    p.add_argument("--every", dest="output_every", type=float, help="time between VTK frames")
    p.add_argument("--max-steps", dest="max_steps", type=int)

    p = sub.add_parser("convergence", help="mesh refinement study against the exact dam break")
    _common(p)
    p.add_argument("--scheme", action="append", choices=SCHEMES,
                   help="scheme to study; repeat for several (default: fvc)")
    p.add_argument("--sizes", type=int, nargs="+", default=list(DEFAULT_SEQUENCE),
                   help="quads per side of each mesh (default: %(default)s)")
    p.add_argument("--csv", help="write the table here instead of stdout")

    p = sub.add_parser("mesh-info", help="print mesh counts, quality and boundary tags")
    p.add_argument("mesh")
    return parser


def _overrides(args, skip=()):
    keys = ("case", "mesh", "cfl", "alpha", "g", "f_c", "t_end", "boundary", "resolution", "dt_length",
            "scheme", "output_dir", "output_every", "max_steps")
    return {k: getattr(args, k, None) for k in keys if k not in skip}


def cmd_run(args):
    config = parse_config(args.config, _overrides(args))
    field, diag = run(config)
    print(f"t={field.time:.6g} steps={len(diag) - 1} mass={diag.mass[-1]:.12g} "
          f"min_h={min(diag.min_h):.6g} max_froude={max(diag.max_froude):.6g}")
    return 0


def cmd_convergence(args):
    base = parse_config(args.config, _overrides(args, skip=("scheme",)))
    if base.case != "accuracy_dam":
        raise ValueError("convergence needs the accuracy_dam case (it has an exact solution)")
    rows = []
    for scheme in args.scheme or ["fvc"]:
        table = convergence_study(replace(base, scheme=scheme), args.sizes)
        rows += [(scheme, c, e, o) for c, e, o in table]
        order = fitted_order([r[0] for r in table], [r[1] for r in table])
        print(f"{scheme}: fitted order {order:.3f}", file=sys.stderr)
    write_convergence_csv(rows, args.csv if args.csv else sys.stdout)
    return 0


def cmd_mesh_info(args):
    info = load_mesh(args.mesh).summary()
    for key, value in info.items():
        print(f"{key}: {value}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    handler = {"run": cmd_run, "convergence": cmd_convergence, "mesh-info": cmd_mesh_info}[args.command]
    try:
        return handler(args)
    except (ValueError, OSError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"fvcswe {args.command}: error: {exc}", file=sys.stderr)
        return 1


cli_main = main
