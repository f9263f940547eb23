"""Independent check of a node's unit series using sympy arithmetic only.

The series is substituted for the unit by truncated Horner evaluation in a sympy
ring over the fraction field of the generic coordinates.  Each coefficient of
b(s) up to the order must vanish on the node's part: its numerator lies in the
EQ ideal, or its product with the INEQ members lies in the radical (sympy
Groebner bases, Rabinowitsch trick).
"""
import re

import sympy
from sympy import QQ
from sympy.polys.rings import ring


def _sy(text, syms):
    return sympy.sympify(str(text).replace("^", "**"), locals=syms)


def series_vanishes(node, order=None):
    """Return (ok, first bad exponent) for node.resolution's series."""
    res = node.resolution
    ser = res.series.to_dict()
    N = int(ser["order"]) if order is None else order
    terms = {k: v for k, v in ser["terms"].items() if sum(int(e) for e in k.split(",")) <= N}
    desc = node.constraints.describe()
    texts = [str(node.b), *desc["eq"], *desc["ineq"], *terms.values(), *ser["shift"].values()]
    anames = sorted({n for t in texts for n in re.findall(r"\ba\w+", t)})
    syms = {n: sympy.Symbol(n) for n in set(anames) | set(node.vars)}
    asyms = [syms[a] for a in anames]
    K = QQ.frac_field(*asyms) if anames else QQ
    R, *gens = ring(ser["params"], K)
    psyms = [syms[p] for p in ser["params"]]

    def trunc(f):
        return R({m: c for m, c in f.items() if sum(m) <= N})

    def lift(expr):
        expr = sympy.expand(expr)
        if not expr.free_symbols & set(psyms):
            return R(K.from_sympy(expr))
        return R(sympy.Poly(expr, *psyms, domain=K).as_dict())

    s = R(0)
    for k, v in terms.items():
        mon = R(1)
        for g, e in zip(gens, k.split(",")):
            mon *= g ** int(e)
        s += R(K.from_sympy(_sy(v, syms))) * mon
    shift = {syms[p]: syms[p] + _sy(v, syms) for p, v in ser["shift"].items()}
    total = R(0)
    for c in sympy.Poly(_sy(node.b, syms), syms[res.decomposition.unit]).all_coeffs():
        total = trunc(total * s) + lift(c.subs(shift, simultaneous=True))

    eq = [_sy(e, syms) for e in desc["eq"]]
    ineq = [_sy(e, syms) for e in desc["ineq"]]
    G = sympy.groebner(eq, *asyms, order="grevlex") if eq and asyms else None
    z = sympy.Symbol("_z")
    for m, c in sorted(total.items()):
        num = sympy.fraction(sympy.together(K.to_sympy(c)))[0]
        if num == 0 or (G is not None and G.reduce(sympy.expand(num))[1] == 0):
            continue
        h = sympy.expand(sympy.Mul(*ineq) * num)
        if not asyms or sympy.groebner(eq + [1 - z * h], *asyms, z, order="grevlex").exprs != [1]:
            return False, m
    return True, None
