"""Recheck every resolved node's unit series with sympy, including the slow ones.

The test suite skips the three generic-part leaves of the curve in this route
because they take seconds each; this script runs them all.

    python3 scripts/series_oracle.py
"""
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "tests"))

from series_oracle import series_vanishes  # noqa: E402

from desing.parse_io import parse_problem  # noqa: E402
from desing.tree import TreeConfig, build_tree  # noqa: E402

PROBLEMS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "problems")


def main():
    bad = 0
    for name in ("curve", "three_branch", "resolved"):
        with open(os.path.join(PROBLEMS, f"{name}.txt")) as fh:
            spec = parse_problem(fh.read())
        tree = build_tree(spec.b, spec.vars, TreeConfig(at_origin=spec.at == "origin"))
        for node in tree.nodes.values():
            if node.resolution is None:
                continue
            t0 = time.perf_counter()
            ok, where = series_vanishes(node)
            bad += not ok
            print(f"{name} node {node.id}: {'ok' if ok else f'FAIL at {where}'} ({time.perf_counter() - t0:.1f}s)")
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
