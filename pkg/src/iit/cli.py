"""Command line entry point ``iit``.

Exit codes: 0 all inequalities hold, 1 an inequality is violated, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import convex, harness, loomis, mt, pattern
from .families import FamilyError, WeightedFamily, classify_weights, load_family, shearer_weights
from .setfun import JointDistribution, StructureError, entropy_oracle

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def _order(text):
    return tuple(int(x) for x in text.split(",")) if text else None


def _weighted(path) -> WeightedFamily:
    F, weights = load_family(path)
    if weights is None:
        return shearer_weights(F)
    return WeightedFamily(F, weights)


def _emit(doc: dict, path: str | None):
    text = json.dumps(doc, indent=2, default=str)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def cmd_mt(args) -> int:
    f = entropy_oracle(JointDistribution.load(args.fn))
    wf = _weighted(args.family)
    if classify_weights(wf).partition:
        rep = mt.mt_bounds(f, wf, _order(args.order))
    else:
        rep = mt.covering_packing_bounds(f, wf, _order(args.order))
    _emit(rep.to_dict(), args.report)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_convex(args) -> int:
    f = entropy_oracle(JointDistribution.load(args.fn))
    wf = _weighted(args.family)
    g = convex.parse_transform(args.g)
    order = _order(args.order)
    if not classify_weights(wf).partition:
        rep = convex.covering_packing_convex(f, wf, g, order)
    elif args.weak:
        rep = convex.convex_bounds_weak(f, wf, g, order)
    else:
        rep = convex.convex_bounds_strong(f, wf, g, order)
    _emit(rep.to_dict(), args.report)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_lw(args) -> int:
    S = loomis.PointSet.load(args.points)
    slice_coord = args.slice
    doc = {}
    if args.best:
        slice_coord, bound = loomis.best_slice_coord(S)
        doc["best"] = {"slice_coord": slice_coord, "strong": bound}
    b = loomis.lw_bounds(S, slice_coord)
    doc.update(b.to_dict())
    _emit(doc, args.report)
    return EXIT_OK if b.strong_holds and b.classic_holds else EXIT_VIOLATION


def cmd_graph(args) -> int:
    V, fam = pattern.load_instance(args.instance)
    G = pattern.build_graph(V, fam)
    rep = pattern.edge_bound(G)
    doc = rep.to_dict()
    doc["edges"] = len(G.edges)
    doc["duplicates_collapsed"] = sum(c - 1 for c in G.duplicates.values())
    code = EXIT_OK
    if args.verify:
        ver = pattern.verify_bound(G)
        doc["verify"] = {"brute_force_edges": ver.edges, "slack": ver.slack, "passed": ver.passed}
        code = EXIT_OK if ver.passed else EXIT_VIOLATION
    _emit(doc, args.report)
    return code


def cmd_fuzz(args) -> int:
    spec = harness.CampaignSpec(args.target, args.trials, args.seed, max_n=args.max_n)
    res = harness.run_campaign(spec)
    doc, text = harness.report(res)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(doc + "\n")
    print(text if args.verbose else text.splitlines()[0])
    for t in res.failures:
        print(f"  FAIL #{t.trial}: {t.detail}")
    return res.exit_status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iit", description="Submodular information inequalities with brute-force checks.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("mt", help="strong/weak fractional bounds for an entropy oracle")
    q.add_argument("--fn", required=True, help="pmf JSON file")
    q.add_argument("--family", required=True, help="family JSON file")
    q.add_argument("--order", help="evaluation order, e.g. 2,1,3")
    q.add_argument("--report", help="write the JSON report here")
    q.set_defaults(func=cmd_mt)

    q = sub.add_parser("convex", help="Jensen-type bounds with a transform g")
    q.add_argument("--fn", required=True)
    q.add_argument("--family", required=True)
    q.add_argument("--g", default="exp2x", help="identity | exp2x | sqrt | affine:a,b | power:p")
    q.add_argument("--order")
    q.add_argument("--weak", action="store_true", help="unconditioned (weak) form")
    q.add_argument("--report")
    q.set_defaults(func=cmd_convex)

    q = sub.add_parser("lw", help="Loomis-Whitney bounds for a point set")
    q.add_argument("--points", required=True)
    q.add_argument("--slice", type=int, default=1, help="slice coordinate (1-based)")
    q.add_argument("--best", action="store_true", help="pick the slice coordinate with the smallest bound")
    q.add_argument("--report")
    q.set_defaults(func=cmd_lw)

    q = sub.add_parser("graph", help="edge bound for a difference-pattern graph")
    q.add_argument("--instance", required=True)
    q.add_argument("--verify", action="store_true", help="compare with a brute-force edge count")
    q.add_argument("--report")
    q.set_defaults(func=cmd_graph)

    q = sub.add_parser("fuzz", help="random campaign against brute-force oracles")
    q.add_argument("--target", choices=harness.TARGETS, default="mt")
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--seed", type=int, default=42)
    q.add_argument("--max-n", type=int, help="ground-set size cap (default 4, or 8 for graph)")
    q.add_argument("--report")
    q.add_argument("-v", "--verbose", action="store_true")
    q.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError, StructureError, FamilyError) as exc:
        print(f"iit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
