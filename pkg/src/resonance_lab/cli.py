"""Command line interface.

Subcommands:

* ``converge`` -- run a convergence study from a JSON config, write CSV + JSON.
* ``evolve``   -- step a single-tau config, dumping spectral snapshots.
* ``trees``    -- print the decorated-tree catalogue (shapes, symmetry
  factors, phase polynomials and splits, optionally the coproduct).
* ``bourgain`` -- fit discrete Bourgain estimate constants, print JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bourgain import check_estimate
from .harness import ExperimentConfig, evolve, report_to_csv, run_convergence
from .trees import (
    bck_coproduct,
    classical_threshold,
    enumerate_trees,
    integral_vertex_paths,
    phase_polynomial,
    render_tree,
    resonance_split,
    symmetry_factor,
)


def _cmd_converge(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_json_obj(json.loads(Path(args.config).read_text()))
    seeds = None
    if args.seeds:
        seeds = [int(s) for s in args.seeds.split(",")]
    report = run_convergence(config, seeds=seeds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "convergence.csv").write_text(report_to_csv(report))
    (out / "report.json").write_text(json.dumps(report.to_json_obj(), indent=2))
    order = report.fitted_order
    print(f"fitted order: {order if order is not None else 'n/a'}")
    print(f"wrote {out / 'convergence.csv'} and {out / 'report.json'}")
    return 0


def _cmd_evolve(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_json_obj(json.loads(Path(args.config).read_text()))
    result = evolve(config, args.dump_every, args.out)
    print(f"wrote {len(result['snapshots'])} snapshots to {args.out}")
    return 0


def _cmd_trees(args: argparse.Namespace) -> int:
    shapes = enumerate_trees(args.model, args.order)
    shapes = sorted(shapes, key=render_tree)
    print(f"model={args.model} order={args.order} shapes={len(shapes)}")
    for tree in shapes:
        print(f"tree {render_tree(tree)} S={symmetry_factor(tree)}")
        for path in integral_vertex_paths(tree):
            poly = phase_polynomial(tree, path)
            dom, low = resonance_split(poly, tree.model)
            loc = "root" if path == () else "/".join(str(i) for i in path)
            print(f"  vertex {loc}: L = {poly} ; L_dom = {dom} ; L_low = {low}")
        if integral_vertex_paths(tree):
            print(f"  classical_threshold = {classical_threshold(tree)}")
        if args.coproduct:
            for term in bck_coproduct(tree):
                forest = " ".join(render_tree(f) for f in term.forest) or "1"
                trunk = "1" if term.trunk is None else render_tree(term.trunk)
                print(f"  cut trunk={trunk} forest={forest}")
    return 0


def _cmd_bourgain(args: argparse.Namespace) -> int:
    taus = [float(t) for t in args.taus.split(",")]
    report = check_estimate(
        args.estimate,
        taus,
        trials=args.trials,
        seed=args.seed,
        s=args.s,
        n_modes=args.n_modes,
        cutoff=not args.no_cutoff,
    )
    print(json.dumps(report.to_json_obj(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resonance-lab",
        description="Low-regularity resonance-based integrators for KdV/NLS",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("converge", help="run a convergence study")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seeds", default="", help="comma list of rough-data seeds")
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("evolve", help="evolve one trajectory with snapshots")
    p.add_argument("--config", required=True)
    p.add_argument("--dump-every", type=int, required=True, dest="dump_every")
    p.add_argument("--out", default="out")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("trees", help="print the decorated-tree catalogue")
    p.add_argument("--model", choices=("kdv", "nls"), required=True)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--coproduct", action="store_true")
    p.set_defaults(func=_cmd_trees)

    p = sub.add_parser("bourgain", help="fit discrete Bourgain estimate constants")
    p.add_argument("--estimate", required=True)
    p.add_argument("--taus", required=True, help="comma list, e.g. 0.125,0.0625")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--n-modes", type=int, default=64, dest="n_modes")
    p.add_argument("--no-cutoff", action="store_true", dest="no_cutoff")
    p.set_defaults(func=_cmd_bourgain)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
