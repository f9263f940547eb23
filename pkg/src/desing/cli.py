"""Command-line front end: charts, reduce, tree, series, verify."""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .charts import all_charts
from .parse_io import ParseError, emit_tree, parse_polynomial, parse_problem
from .reduce import Hints, ReductionError, reduction_pass
from .tree import TreeConfig, build_tree, verify_dict, verify_tree

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")


def _problem(args):
    return parse_problem(_read(args.input))


def _config(args, spec) -> TreeConfig:
    def pick(flag, from_file, default):
        if flag is not None:
            return flag
        return from_file if from_file is not None else default

    cfg = TreeConfig(
        max_depth=pick(args.max_depth, spec.max_depth, 16),
        series_order=pick(args.series_order, spec.series_order, 12),
        weight_bound=args.weight_bound,
        jobs=args.jobs,
        at_origin=spec.at == "origin",
        hints=_hints(args, spec),
    )
    if cfg.max_depth < 0 or cfg.series_order < 0 or cfg.weight_bound < 1 or cfg.jobs < 1:
        raise InputError("depth, order, bound and jobs must be non-negative (bound and jobs positive)")
    return cfg


def _hints(args, spec) -> Optional[Hints]:
    var = getattr(args, "hint_var", None)
    g = getattr(args, "hint_g", None)
    k = getattr(args, "hint_k", None)
    if var is None and g is None and k is None:
        return None
    if var is None:
        raise InputError("--hint-g/--hint-k need --hint-var")
    if var not in spec.vars:
        raise InputError(f"--hint-var {var!r} is not a declared variable")
    gp = parse_polynomial(g, spec.char, spec.vars) if g is not None else None
    if k is not None and k < 2:
        raise InputError("--hint-k must be at least 2")
    return Hints(var, gp, k)


def _problem_dict(spec) -> dict:
    d = {"char": str(spec.char), "vars": list(spec.vars), "b": str(spec.b)}
    if spec.at:
        d["at"] = spec.at
    return d


def cmd_charts(args, out) -> int:
    spec = _problem(args)
    charts = all_charts(spec.b, spec.vars)
    if args.format == "json":
        rows = [{
            "K": str(c.index.K),
            "bits": "".join(str(x) for x in c.index.bits),
            "b": str(c.b),
            "factor": str(c.factor and _mono(c.factor, spec.char)),
            "status": "EMPTY" if c.empty else "ok",
            "witness": c.witness,
        } for c in charts]
        out.write(json.dumps({"problem": _problem_dict(spec), "charts": rows}, indent=2) + "\n")
        return EXIT_OK
    for c in charts:
        bits = "".join(str(x) for x in c.index.bits)
        status = "EMPTY" if c.empty else "ok"
        line = f"K={c.index.K} bits={bits} {status:5} b_{c.node_id} = {c.b}"
        if c.witness:
            line += f"  [{c.witness}]"
        out.write(line + "\n")
    return EXIT_OK


def _mono(m, char):
    from .poly import Polynomial

    return Polynomial.monomial(m, 1, char)


def cmd_reduce(args, out) -> int:
    spec = _problem(args)
    final, trail = reduction_pass(spec.b, spec.vars, _hints(args, spec))
    bad = [r for r in trail if not r.verify()]
    if args.format == "json":
        out.write(json.dumps({"problem": _problem_dict(spec), "final": str(final),
                              "trail": [r.to_dict() for r in trail]}, indent=2) + "\n")
    else:
        if not trail:
            out.write("no reduction applies\n")
        for i, r in enumerate(trail):
            out.write(f"step {i}: {r.kind}\n")
            if r.weights is not None:
                out.write(f"  weights: {','.join(str(x) for x in r.weights)}\n")
            if r.solved is not None:
                out.write(f"  {r.solved[0]} = {r.solved[1]}\n")
            else:
                for k, v in r.phi.items():
                    out.write(f"  {k} -> {v}\n")
                power = f"^{r.power}" if r.power != 1 else ""
                out.write(f"  factor: {r.factor}\n  reduced{power}: {r.reduced}\n")
            if r.globals:
                out.write(f"  global parameters: {', '.join(r.globals)}\n")
        out.write(f"final: {final}\n")
    if bad:
        print("reduction identity failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _build(args):
    spec = _problem(args)
    cfg = _config(args, spec)
    tree = build_tree(spec.b, spec.vars, cfg, _problem_dict(spec))
    return spec, tree


def cmd_tree(args, out) -> int:
    _, tree = _build(args)
    failures = [r for r in verify_tree(tree) if not r[2]]
    out.write(emit_tree(tree, args.format))
    if failures:
        for s, t, _ in failures:
            print(f"arc {s} -> {t}: identity fails", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_series(args, out) -> int:
    _, tree = _build(args)
    if args.node not in tree.nodes:
        raise InputError(f"unknown node {args.node!r}")
    node = tree.nodes[args.node]
    res = [node.resolution] if node.resolution is not None else list(node.resolved_parts)
    if not res:
        raise InputError(f"node {args.node} is not strongly resolved (status {node.status})")
    payload = {"node": node.id, "b": str(node.b), "resolutions": [r.to_dict() for r in res]}
    if args.format == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        for r in res:
            d = r.decomposition
            out.write(f"node {node.id}: b = {node.b}\n")
            out.write(f"  unit {d.unit}, distinguished {d.dist}: f0 = {d.f0}, f1 = {d.f1}, D = {d.D}\n")
            s = r.series
            out.write(f"  series in ({', '.join(s.params)}) to order {s.order}:\n")
            for k, v in s.to_dict()["terms"].items():
                out.write(f"    [{k}] {v}\n")
            out.write(f"  rewrite identity: {'pass' if r.rewrite.identity_ok else 'fail'}, "
                      f"linear mod {d.dist}: {'pass' if r.rewrite.linear_ok else 'fail'}\n")
    if any(not (r.rewrite.identity_ok and r.rewrite.linear_ok) for r in res):
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args, out) -> int:
    try:
        data = json.loads(_read(args.input))
    except json.JSONDecodeError as e:
        raise InputError(f"not a JSON tree: {e}")
    if not isinstance(data, dict) or "nodes" not in data or "arcs" not in data:
        raise InputError("not a JSON tree: missing nodes/arcs")
    results = verify_dict(data)
    ok = all(r[2] for r in results)
    for s, t, good, msg in results:
        out.write(f"{'pass' if good else 'FAIL'} {s} -> {t}: {msg}\n")
    out.write(f"{'pass' if ok else 'FAIL'}: {sum(r[2] for r in results)}/{len(results)} arcs verified\n")
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="desing", description="Exact resolution trees for hypersurfaces b = 0.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("text", "json"), default="text"):
        sp.add_argument("--input", required=True, help="problem file (or saved tree for verify)")
        sp.add_argument("--format", choices=formats, default=default)

    def tree_flags(sp):
        sp.add_argument("--max-depth", type=int, default=None)
        sp.add_argument("--series-order", type=int, default=None)
        sp.add_argument("--weight-bound", type=int, default=16)
        sp.add_argument("--jobs", type=int, default=1)

    def hint_flags(sp):
        sp.add_argument("--hint-var", default=None)
        sp.add_argument("--hint-g", default=None)
        sp.add_argument("--hint-k", type=int, default=None)

    sp = sub.add_parser("charts", help="the 2^(d+1) chart table")
    common(sp)
    sp.set_defaults(func=cmd_charts)
    sp = sub.add_parser("reduce", help="global-parameter reduction trail")
    common(sp)
    hint_flags(sp)
    sp.set_defaults(func=cmd_reduce)
    sp = sub.add_parser("tree", help="build the desingularization tree")
    common(sp, ("json", "dot", "text"), "json")
    tree_flags(sp)
    hint_flags(sp)
    sp.set_defaults(func=cmd_tree)
    sp = sub.add_parser("series", help="strongly resolved check and unit series for a node")
    common(sp)
    tree_flags(sp)
    hint_flags(sp)
    sp.add_argument("--node", required=True)
    sp.set_defaults(func=cmd_series)
    sp = sub.add_parser("verify", help="re-run every arc identity of a saved JSON tree")
    sp.add_argument("--input", required=True)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except (InputError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, ReductionError) as e:
        print(f"verification error: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
