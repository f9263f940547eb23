"""Global-parameter reductions on the standard surface and threefold examples.

Each reduction is replayed through sympy (substitute, then split off the
monomial content) and compared with the factor and cofactor we compute.  The
Eisenbud cone is then followed into its tree, where the reduced polynomial
1 + z0^2 + z1^2 is charted and resolved.

    python3 scripts/reductions.py
"""
import sympy

from desing.parse_io import emit_tree, parse_polynomial as P
from desing.reduce import reduction_pass
from desing.tree import build_tree, verify_tree

EXAMPLES = [
    ("Narasimhan", "x0^2 + x1*x2^3 + x2*x3^3 + x1^7*x3", 4),
    ("Hauser", "x0^2 + x1^4*x2 + x1^2*x2^4 + x2^7", 3),
    ("Eisenbud", "x0^2 + x1^2 + x2^2", 3),
    ("Kollar m=2 n=3 r=s=1", "x0^2 + x1^2 + x2^5*x3^7", 4),
    ("cone", "u*v - w^2", None),
    ("umbrella", "x^2 - y^2*z", None),
]


def sympy_check(r):
    if r.kind == "linear-solve":
        v, sol = r.solved
        syms = {x: sympy.Symbol(x) for x in r.source_vars}
        e = sympy.sympify(str(r.source).replace("^", "**"), locals=syms)
        val = sympy.sympify(f"({sol.num})/({sol.den})".replace("^", "**"), locals=syms)
        return sympy.simplify(e.subs(syms[v], val)) == 0
    syms = {x: sympy.Symbol(x) for x in set(r.source_vars) | set(r.target_vars)}
    conv = lambda f: sympy.sympify(str(f).replace("^", "**"), locals=syms)
    img = conv(r.source).subs({syms[x]: conv(q.num) / conv(q.den) for x, q in r.phi.items()}, simultaneous=True)
    return sympy.simplify(img - conv(r.factor) * conv(r.reduced) ** r.power) == 0


def main():
    for name, text, n in EXAMPLES:
        b = P(text)
        vs = tuple(f"x{i}" for i in range(n)) if n else tuple(sorted(b.variables()))
        final, trail = reduction_pass(b, vs)
        print(f"{name}: b = {b}")
        for r in trail:
            extra = f" weights {r.weights}" if r.weights else ""
            if r.solved:
                extra += f" {r.solved[0]} = {r.solved[1]}"
            print(f"  {r.kind}{extra}")
            print(f"    factor {r.factor}, reduced {r.reduced}, globals {list(r.globals)}")
            print(f"    identity {'ok' if r.verify() else 'FAIL'}, sympy {'ok' if sympy_check(r) else 'FAIL'}")
        if not trail:
            print("  no reduction applies")
        print()

    tree = build_tree(P("x0^2 + x1^2 + x2^2"), ("x0", "x1", "x2"))
    print("Eisenbud follow-on tree")
    print(emit_tree(tree, "text"))
    results = verify_tree(tree)
    print(f"arc identities: {sum(ok for _, _, ok in results)}/{len(results)}")


if __name__ == "__main__":
    main()
