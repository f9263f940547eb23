"""Build the tree for the plane curve x0^3 + x0*x1 + x1^5 and print every leaf.

For each resolved leaf the composed map back to (x0, x1), the unit series and
the arc checks are shown.

    python3 scripts/curve_tree.py
"""
import time

from desing.parse_io import emit_tree, parse_polynomial
from desing.tree import build_tree, compose_path, verify_tree


def main():
    b = parse_polynomial("x0^3 + x0*x1 + x1^5")
    t0 = time.perf_counter()
    tree = build_tree(b, ("x0", "x1"))
    print(f"built {len(tree.nodes)} nodes in {time.perf_counter() - t0:.2f}s\n")
    print(emit_tree(tree, "text"))
    for node in tree.leaves():
        if node.status != "resolved":
            continue
        m = compose_path(tree, node.id)
        arc = tree.arc_to(node.id)
        print(f"leaf {node.id}  weights {arc.weights}  factor {arc.factor}")
        print(f"  b = {node.b}")
        for x, r in m.phi.items():
            print(f"  {x} = {r}")
        s = node.resolution.series.to_dict()
        print(f"  unit series in {s['params']} to order {s['order']}: {len(s['terms'])} terms")
    results = verify_tree(tree)
    print(f"\narc identities: {sum(ok for _, _, ok in results)}/{len(results)}")


if __name__ == "__main__":
    main()
