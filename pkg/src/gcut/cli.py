"""Command-line front end.

Subcommands: parse, discretize, enumerate, build, solve, verify, oracle,
audit-guillotine, render, bench, and solve-mps (the bundled MPS backend
behind the default ``builtin`` solver).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import backend as backend_mod
from .bench import VARIANT_MODES, VARIANTS, render_figures, run_matrix, summarize, write_csv
from .discretize import ORIENTATIONS, cut_positions
from .enumeration import enumerate_bba, enumerate_fmt
from .hybridise import HybridisationConfig
from .instance import Instance, expand_rotation, parse_instance, serialize_instance
from .model import build_model, model_stats, write_mps
from .oracle import oracle_feasible, oracle_optimal
from .render import read_placement, render_svg
from .solve import parse_solution_text, solve_model, _finish
from .verify import check_solution, decode, is_guillotinable, placement_from_tree


def _instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", help="instance file")
    p.add_argument("--format", choices=("classic", "extended"), default="classic")
    p.add_argument("--rotation", action="store_true", help="allow piece rotation")
    p.add_argument("--unweighted", action="store_true", help="overwrite profits with areas")


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--formulation", choices=("bba", "fmt"), default="bba")
    p.add_argument("--hybrid", choices=("none", "conservative", "aggressive"), default="none")
    p.add_argument("--binding", action="store_true", help="outlined pieces must be sold")


def _load(args) -> Instance:
    inst = parse_instance(
        args.instance,
        args.format,
        rotation_allowed=args.rotation,
        unweighted=args.unweighted,
    )
    return expand_rotation(inst)


def _graph_and_model(inst: Instance, args):
    cfg = HybridisationConfig(
        mode=args.hybrid, binding=args.binding and args.hybrid != "none"
    )
    enum = enumerate_bba if args.formulation == "bba" else enumerate_fmt
    g = enum(inst, hybrid=args.hybrid)
    return g, build_model(g, inst, cfg), cfg


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_parse(args) -> int:
    inst = _load(args)
    if args.emit:
        sys.stdout.write(serialize_instance(inst, args.emit))
        return 0
    _emit(
        {
            "plate_length": inst.plate_length,
            "plate_width": inst.plate_width,
            "rotation_allowed": inst.rotation_allowed,
            "constrained": inst.constrained,
            "pieces": [asdict(p) for p in inst.pieces],
        }
    )
    return 0


def cmd_discretize(args) -> int:
    inst = _load(args)
    dims = (inst.plate_length, inst.plate_width)
    out = []
    for orientation in ORIENTATIONS:
        dim = dims[0] if orientation == "h" else dims[1]
        caps = [
            (p.length if orientation == "h" else p.width, p.demand)
            for p in inst.pieces
            if p.fits(*dims)
        ]
        ps = cut_positions(dim, caps, orientation=orientation, plate=dims)
        out.append(
            {
                "orientation": ps.orientation,
                "plate_length": ps.plate_length,
                "plate_width": ps.plate_width,
                "positions": list(ps.positions),
            }
        )
    _emit(out)
    return 0


def cmd_enumerate(args) -> int:
    inst = _load(args)
    g, m, _ = _graph_and_model(inst, args)
    stats = model_stats(m, g)
    _emit(asdict(stats))
    return 0


def cmd_build(args) -> int:
    inst = _load(args)
    g, m, _ = _graph_and_model(inst, args)
    write_mps(m, args.mps_out, strict=args.mps_strict)
    _emit({"mps": str(args.mps_out), **asdict(model_stats(m, g))})
    return 0


def cmd_solve(args) -> int:
    inst = _load(args)
    g, m, _ = _graph_and_model(inst, args)
    if args.mps_out:
        write_mps(m, args.mps_out)
    assignment = solve_model(
        m, args.backend_cmd, mode=args.mode, time_limit=args.time_limit, seed=args.seed
    )
    result = {"status": assignment.status, "objective": assignment.objective}
    if args.mode == "mip" and assignment.status in ("optimal", "feasible"):
        tree = decode(assignment, g, inst)
        report = check_solution(tree, inst)
        result["value"] = report.value
        result["check_ok"] = report.ok
        result["violations"] = list(report.violations)
        if args.svg_out:
            render_svg(tree, args.svg_out)
            result["svg"] = str(args.svg_out)
    _emit(result)
    return 0


def cmd_verify(args) -> int:
    inst = _load(args)
    g, m, _ = _graph_and_model(inst, args)
    values, declared, status = parse_solution_text(
        Path(args.solution).read_text(encoding="utf-8")
    )
    assignment = _finish(m, values, declared, status, "mip")
    tree = decode(assignment, g, inst)
    report = check_solution(tree, inst)
    placement = placement_from_tree(tree)
    _emit(
        {
            "ok": report.ok,
            "value": report.value,
            "violations": list(report.violations),
            "guillotinable": is_guillotinable(placement),
            "piece_counts": dict(report.piece_counts),
        }
    )
    return 0 if report.ok else 1


def cmd_oracle(args) -> int:
    inst = _load(args)
    if args.feasible:
        _emit({"feasible": oracle_feasible(inst.pieces, (inst.plate_length, inst.plate_width), budget=args.budget)})
    else:
        _emit({"optimal": oracle_optimal(inst, budget=args.budget)})
    return 0


def cmd_audit(args) -> int:
    placement = read_placement(args.placement, (args.plate[0], args.plate[1]))
    _emit({"guillotinable": is_guillotinable(placement)})
    return 0


def cmd_render(args) -> int:
    placement = read_placement(args.placement, (args.plate[0], args.plate[1]))
    render_svg(placement, args.out)
    _emit({"svg": str(args.out)})
    return 0


def cmd_bench(args) -> int:
    instances = []
    for path in args.instances:
        inst = parse_instance(
            path, args.format, rotation_allowed=args.rotation, unweighted=args.unweighted
        )
        instances.append((Path(path).stem, expand_rotation(inst)))
    variant_names = {"nh": "N.H.", "ch": "C.H.", "ah": "A.H."}
    variants = [variant_names[v.strip().lower()] for v in args.variants.split(",")]
    seeds = list(range(args.seeds))
    backend = None if args.no_solve else args.backend_cmd
    report = run_matrix(
        instances,
        variants,
        seeds,
        backend,
        formulation=args.formulation,
        binding=args.binding,
        time_limit=args.time_limit,
        jobs=args.jobs,
    )
    if args.report_csv:
        write_csv(report, args.report_csv)
    if args.figures_prefix:
        for path in render_figures(report, args.figures_prefix, variants):
            print(f"wrote {path}", file=sys.stderr)
    sys.stdout.write(summarize(report, variants))
    return 0


def cmd_solve_mps(args) -> int:
    status = backend_mod.solve_mps_to_file(
        args.mps, args.sol, mode=args.mode, time_limit=args.time_limit
    )
    return 0 if status in ("optimal", "feasible") else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gcut", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="validate and echo an instance")
    _instance_args(p)
    p.add_argument("--emit", choices=("classic", "extended"), help="re-serialize instead of JSON")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("discretize", help="print cut positions of the original plate")
    _instance_args(p)
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("enumerate", help="print graph/model statistics")
    _instance_args(p)
    _model_args(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("build", help="write the model as MPS")
    _instance_args(p)
    _model_args(p)
    p.add_argument("--mps-out", required=True)
    p.add_argument("--mps-strict", action="store_true", help="truncate names to 8 chars")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("solve", help="build, solve, decode and check")
    _instance_args(p)
    _model_args(p)
    p.add_argument("--backend-cmd", default="builtin")
    p.add_argument("--mode", choices=("mip", "lp"), default="mip")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mps-out")
    p.add_argument("--svg-out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="decode a solution file and check it")
    _instance_args(p)
    _model_args(p)
    p.add_argument("--solution", required=True, help="'name value' solution file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact optimum by exhaustive search")
    _instance_args(p)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.add_argument("--feasible", action="store_true", help="check full packing instead")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("audit-guillotine", help="check a placement for guillotinability")
    p.add_argument("placement", help="text file with 'id x y l w' lines")
    p.add_argument("--plate", type=int, nargs=2, required=True, metavar=("L", "W"))
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("render", help="render a placement to SVG")
    p.add_argument("placement")
    p.add_argument("--plate", type=int, nargs=2, required=True, metavar=("L", "W"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="run a variant/seed matrix and report")
    p.add_argument("instances", nargs="+")
    p.add_argument("--format", choices=("classic", "extended"), default="classic")
    p.add_argument("--rotation", action="store_true")
    p.add_argument("--unweighted", action="store_true")
    p.add_argument("--formulation", choices=("bba", "fmt"), default="bba")
    p.add_argument("--binding", action="store_true")
    p.add_argument("--variants", default="nh,ch,ah")
    p.add_argument("--seeds", type=int, default=1, help="number of seeds (0..n-1)")
    p.add_argument("--backend-cmd", default="builtin")
    p.add_argument("--no-solve", action="store_true", help="model statistics only")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--report-csv")
    p.add_argument("--figures-prefix", help="write <prefix>_times.png and <prefix>_model.png")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("solve-mps", help="bundled MPS solver (backend contract)")
    p.add_argument("mps")
    p.add_argument("sol")
    p.add_argument("--mode", choices=("mip", "lp"), default="mip")
    p.add_argument("--time-limit", type=float)
    p.set_defaults(func=cmd_solve_mps)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"gcut: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
