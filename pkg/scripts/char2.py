"""Characteristic 2: p-th roots, power patterns and the trees they feed.

    python3 scripts/char2.py
"""
import time

from desing.parse_io import parse_polynomial as P
from desing.poly import pth_power_decompose
from desing.reduce import reduction_pass, split_power_pattern
from desing.tree import TreeConfig, build_tree, verify_tree


def show_pass(b, vs):
    final, trail = reduction_pass(b, vs)
    for r in trail:
        print(f"  {r.kind}: reduced {r.reduced}" + (f", {r.solved[0]} = {r.solved[1]}" if r.solved else ""))
        print(f"    identity {'ok' if r.verify() else 'FAIL'}")
    return final


def main():
    q = P("x0^3*x1^2*x2 + x1^3*x2^2*x3 + x2^3*x3^2*x0 + x3^3*x0^2*x1", 2)
    once = pth_power_decompose(q ** 4)
    print(f"square root of q^4 is q^2: {once == q ** 2}; again gives q: {pth_power_decompose(once) == q}")

    b = P("(x0*x1*x2*x3)^5", 2) + q ** 4
    v, g, f1, f2 = split_power_pattern(b, 4)
    print(f"quartic: b = {v}*g*f2^4 + f1^4 with g = {g}, f2 = {f2}")
    show_pass(b, ("x0", "x1", "x2", "x3"))

    print("\nHauser surface in characteristic 2")
    h = P("(x2 + x1*x0^2)^2 + x0*(x1^2 + x0^3)^2", 2)
    print(f"  b = {h}")
    show_pass(h, ("x0", "x1", "x2"))

    for name, text, vs, depth in [
        ("quartic", str(b), ("x0", "x1", "x2", "x3"), 6),
        ("Hauser char 2", str(h), ("x0", "x1", "x2"), 16),
    ]:
        t0 = time.perf_counter()
        tree = build_tree(P(text, 2), vs, TreeConfig(max_depth=depth))
        res = verify_tree(tree)
        statuses = sorted({n.status for n in tree.nodes.values()})
        print(f"\n{name} tree: {len(tree.nodes)} nodes, statuses {statuses}, "
              f"arcs {sum(ok for _, _, ok in res)}/{len(res)}, {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
