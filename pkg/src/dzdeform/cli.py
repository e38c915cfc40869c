"""Command line harness: verify / dump / fixtures.

Exit status of `verify` is 0 exactly when every verdict passes.  JSON output
is canonical (sorted keys, no timing data) so identical configurations and
seeds produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys

from .operators import operator_text
from .hierarchy import Hierarchy
from .potentials import PotentialStore
from .givental import DeformationContext
from . import verify as verify_mod


def _build_parser():
    p = argparse.ArgumentParser(prog="dzdeform",
                                description="exact verifier for hierarchy deformation identities")
    sub = p.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run verification suites")
    pv.add_argument("--config", help="path to a JSON run configuration")
    pv.add_argument("--suite", action="append",
                    help="suite name (repeatable); default: all suites")
    pv.add_argument("--seed", type=int, help="random seed for property checks")
    pv.add_argument("--json", dest="json_path", help="write the JSON report here")
    pv.add_argument("--fault-inject", dest="fault",
                    help="inject a documented fault (see `fixtures`)")

    pd = sub.add_parser("dump", help="canonical dump of an engine entity")
    pd.add_argument("selector",
                    help="F0 | F1 | omega[a,p,b,q] | G[a] | L[a,b] | A[a,b] | term:LABEL[a,b]")
    pd.add_argument("--config", help="path to a JSON run configuration")
    pd.add_argument("--json", dest="json_path", help="write a JSON dump here")

    sub.add_parser("fixtures", help="list shipped fixtures, generators and fault tags")
    return p


def _context_from_config(cfg):
    store = PotentialStore(cfg["_spec"])
    hier = Hierarchy(store, cfg.get("check_window", 4))
    return store, hier


def cmd_verify(args):
    overrides = {"seed": args.seed, "fault": args.fault}
    if args.suite:
        overrides["suites"] = args.suite
    try:
        cfg = verify_mod.load_config(args.config, overrides)
    except verify_mod.ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    payload, text, ok = verify_mod.run_suite(cfg)
    print(text)
    if args.json_path:
        with open(args.json_path, "w") as fh:
            fh.write(verify_mod.report_json(payload))
        print(f"report written to {args.json_path}")
    return 0 if ok else 1


def _parse_indices(sel, inside):
    raw = inside.strip("[]").split(",")
    return [int(x) for x in raw]


def cmd_dump(args):
    try:
        cfg = verify_mod.load_config(args.config, {})
    except verify_mod.ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    store, hier = _context_from_config(cfg)
    sel = args.selector
    out = {}
    try:
        if sel in ("F0", "F1"):
            g = int(sel[1])
            from .poly import poly_text
            out[sel] = poly_text(store.F[g].poly)
        elif sel.startswith("omega[") :
            a, p, b, q = _parse_indices(sel, sel[len("omega"):])
            out[sel] = hier.omega_jet(a, p, b, q).text()
        elif sel.startswith("G["):
            (a,) = _parse_indices(sel, sel[1:])
            out[sel] = hier.G(a).text()
        elif sel.startswith("L["):
            a, b = _parse_indices(sel, sel[1:])
            out[sel] = operator_text(hier.L_matrix()[a, b])
        elif sel.startswith("A["):
            a, b = _parse_indices(sel, sel[1:])
            out[sel] = operator_text(hier.bracket_w()[a, b])
        elif sel.startswith("term:"):
            label, rest = sel[5:].split("[", 1)
            b, x = _parse_indices(sel, "[" + rest)
            gens = [g for g in cfg["_generators"] if g.kind == "r"]
            if not gens:
                raise KeyError("no r-generator in the configuration")
            ctx = DeformationContext(hier, gens[0])
            out[sel] = operator_text(ctx.bracket_term(label, b, x))
        else:
            raise KeyError(sel)
    except KeyError as exc:
        print(f"unknown selector: {exc}", file=sys.stderr)
        return 2
    for k in sorted(out):
        print(f"{k} = {out[k]}")
    if args.json_path:
        with open(args.json_path, "w") as fh:
            json.dump(out, fh, indent=2, sort_keys=True)
    return 0


def cmd_fixtures(_args):
    print("cohft specs:")
    print("  trivial-1d     dim=1 construction=trivial-1d genus_max=1")
    print("  product-2d     dim=2 construction=product-of-trivial genus_max=1")
    print("generator presets:")
    print("  r1  scalar [[1]]            (dim 1)")
    print("  r3  scalar [[1]]            (dim 1; even levels vanish in dim 1)")
    print("  r2  [[0,1],[-1,0]]          (dim 2, antisymmetric)")
    print("  s1  [[1]] / [[2,1],[1,-1]]  (symmetric)")
    print("quasi-Miura fixtures: trivial-1d-g1, product-g1")
    print("fault tags:")
    for tag in sorted(verify_mod.FAULTS):
        print(f"  {tag:24s} {verify_mod.FAULTS[tag]}")
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "dump":
        return cmd_dump(args)
    if args.command == "fixtures":
        return cmd_fixtures(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
