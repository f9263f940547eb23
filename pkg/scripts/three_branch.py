"""The surface x00 + x01^2 + x00^2*x01 + x02^3 + x00^2*x01*x02 at the origin.

Three weight sequences survive minimality; each child is rechecked by sympy.

    python3 scripts/three_branch.py
"""
import sympy

from desing.parse_io import parse_polynomial as P
from desing.tree import TreeConfig, build_tree


def main():
    vs = ("x00", "x01", "x02")
    b = P("x00 + x01^2 + x00^2*x01 + x02^3 + x00^2*x01*x02")
    tree = build_tree(b, vs, TreeConfig(at_origin=True))
    syms = {v: sympy.Symbol(v) for v in vs}
    for k in tree.children("root"):
        arc, node = tree.arc_to(k), tree.nodes[k]
        loc = dict(syms, **{v: sympy.Symbol(v) for v in node.vars})
        conv = lambda f: sympy.sympify(str(f).replace("^", "**"), locals=loc)
        img = sympy.expand(conv(b).subs({syms[x]: conv(r.num) for x, r in arc.phi.items()}, simultaneous=True))
        ok = sympy.expand(img - conv(arc.factor) * conv(node.b)) == 0
        print(f"child {k}: weights {arc.weights}, {node.status}")
        print(f"  phi {arc.phi_strings()}")
        print(f"  factor {arc.factor}")
        print(f"  b = {node.b}")
        print(f"  sympy substitute-and-factor: {'ok' if ok else 'FAIL'}")
        d = node.resolution.decomposition
        print(f"  unit {d.unit}, distinguished {d.dist}, D = {d.D}")


if __name__ == "__main__":
    main()
