import itertools

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from desing.parse_io import parse_polynomial as P
from desing.poly import Polynomial, RationalFunction, monomial_content, substitute
from desing.reduce import (
    Hints,
    apply_weight_reduction,
    detect_divisor_pattern,
    detect_linear_variable,
    detect_power_pattern,
    kth_root,
    maximal_monomial_divisor,
    reduction_pass,
    split_power_pattern,
    weighted_homogeneous_weights,
)

NARASIMHAN = P("x0^2 + x1*x2^3 + x2*x3^3 + x1^7*x3")
HAUSER = P("x0^2 + x1^4*x2 + x1^2*x2^4 + x2^7")
EISENBUD = P("x0^2 + x1^2 + x2^2")
V3 = ("x0", "x1", "x2")
V4 = ("x0", "x1", "x2", "x3")


def sympy_substitute_and_factor(b, phi, target):
    """Independent oracle: substitute with sympy and split off the monomial content."""
    syms = {v: sympy.Symbol(v) for v in set(b.variables()) | set(target)}
    expr = sympy.sympify(str(b).replace("^", "**"), locals=syms)
    subs = {syms[x]: sympy.sympify(str(r.num).replace("^", "**"), locals=syms) for x, r in phi.items()}
    img = sympy.expand(expr.subs(subs, simultaneous=True))
    poly = sympy.Poly(img, *[syms[t] for t in target])
    mins = [min(m[i] for m in poly.monoms()) for i in range(len(target))]
    content = sympy.Mul(*[syms[t] ** k for t, k in zip(target, mins)])
    return content, sympy.expand(img / content)


def test_linear_solves():
    r = detect_linear_variable(P("u*v - w^2"), ("u", "v", "w"))
    assert r.solved[0] == "u" and r.solved[1] == RationalFunction(P("w^2"), P("v"))
    assert r.verify()
    r = detect_linear_variable(P("x^2 - y^2*z"), ("x", "y", "z"))
    assert r.solved[0] == "z" and r.solved[1] == RationalFunction(P("x^2"), P("y^2"))
    assert r.verify()


def test_curve_has_no_linear_variable():
    assert detect_linear_variable(P("x0^3 + x0*x1 + x1^5")) is None


@pytest.mark.parametrize("b, vs, w", [
    (NARASIMHAN, V4, (32, 7, 19, 15)),
    (HAUSER, V3, (7, 3, 2)),
    (EISENBUD, V3, (1, 1, 1)),
])
def test_weights_found(b, vs, w):
    assert weighted_homogeneous_weights(b, vs) == w


def test_not_weighted_homogeneous():
    assert weighted_homogeneous_weights(P("x + x^2 + y")) is None


def test_hauser_cofactor():
    r = apply_weight_reduction(HAUSER, (7, 3, 2), V3)
    assert r.reduced == P("z1 + z0^4 + z1*z0^2 + z1^2")
    assert r.factor == P("z1^5*z2^14") and r.globals == ("z2",)
    assert r.verify()


def test_eisenbud_cofactor():
    r = apply_weight_reduction(EISENBUD, (1, 1, 1), V3)
    assert r.reduced == P("1 + z0^2 + z1^2")
    assert r.verify()


def test_narasimhan_against_oracle():
    r = apply_weight_reduction(NARASIMHAN, (32, 7, 19, 15), V4)
    assert r.reduced == P("z2^2 + z2*z1^2 + z2*z0 + z0^3")
    # the full monomial factor carries z2^7 as well as z3^64
    assert r.factor == P("z3^64*z2^7")
    content, cof = sympy_substitute_and_factor(NARASIMHAN, r.phi, ("z0", "z1", "z2", "z3"))
    z = sympy.symbols("z0 z1 z2 z3")
    assert content == z[3] ** 64 * z[2] ** 7
    assert cof == sympy.expand(z[2] ** 2 + z[2] * z[1] ** 2 + z[2] * z[0] + z[0] ** 3)


def test_kollar_family():
    # x0^2 + x1^2 + x2^(2m+r) x3^(2n+s) with m=2, n=3, r=1, s=1
    b = P("x0^2 + x1^2 + x2^5*x3^7")
    r = detect_divisor_pattern(b, ("x0", "x1"), P("x2^2*x3^3"), V4)
    assert r.reduced == P("y0^2 + y1^2 + x2*x3")
    assert r.verify()
    assert maximal_monomial_divisor(b, ("x0", "x1")) == P("x2^2*x3^3")


def test_divisor_pattern_reassembly():
    b = P("v^2 + v*g + g^2*h")
    r = detect_divisor_pattern(b, "v", P("g"), ("v", "g", "h"))
    assert r.reduced == P("y_v^2 + y_v + h")
    back = substitute(r.reduced, {"y_v": P("v*g^-1")}) * P("g^2")
    assert back == b


def test_divisor_pattern_fails_cleanly():
    assert detect_divisor_pattern(P("v^2 + v + g"), "v", P("g"), ("v", "g")) is None


def test_power_pattern_char2_hauser():
    b = P("(x2 + x1*x0^2)^2 + x0*(x1^2 + x0^3)^2", 2)
    r = detect_power_pattern(b, "x0", 2, variables=V3)
    assert r is not None and r.power == 2
    assert r.reduced == P("z2 + z0*z1^2 + z0^4*z1 + z0^7", 2)
    assert r.verify()
    solve = detect_linear_variable(r.reduced, r.target_vars)
    assert solve.solved[0] == "z2" and solve.verify()


def test_power_pattern_quartic():
    q = P("x0^3*x1^2*x2 + x1^3*x2^2*x3 + x2^3*x3^2*x0 + x3^3*x0^2*x1", 2)
    b = P("(x0*x1*x2*x3)^5", 2) + q ** 4
    v, g, f1, f2 = split_power_pattern(b, 4)
    assert (v, g, f1, f2) == ("x0", P("x1*x2*x3", 2), q, P("x0*x1*x2*x3", 2))
    assert kth_root(q ** 4, 4) == q
    r = detect_power_pattern(b, "x0", 4, variables=V4)
    assert r.verify()


def test_power_pattern_absent():
    assert split_power_pattern(P("x0^2 + x1^3 + x2^3", 2), 2) is None
    assert detect_power_pattern(P("x0 + x1", 2), "x0", 2) is None
    with pytest.raises(ValueError):
        detect_power_pattern(P("x0^2"), "x0", 1)


def test_pass_narasimhan_single_step():
    final, trail = reduction_pass(NARASIMHAN, V4)
    assert [r.kind for r in trail] == ["weighted-homogeneous"]
    assert trail[0].weights == (32, 7, 19, 15)


def test_pass_resolved_is_empty():
    final, trail = reduction_pass(P("1 + u + u^3*t^7"), ("u", "t"))
    assert trail == [] and final == P("1 + u + u^3*t^7")


def test_pass_cone_one_step():
    final, trail = reduction_pass(P("u*v - w^2"), ("u", "v", "w"))
    assert [r.kind for r in trail] == ["linear-solve"] and final.is_zero()


def test_pass_hauser_char2_ends_with_solve():
    b = P("(x2 + x1*x0^2)^2 + x0*(x1^2 + x0^3)^2", 2)
    final, trail = reduction_pass(b, V3)
    assert trail[-1].kind == "linear-solve"
    assert all(r.verify() for r in trail)


def test_pass_with_hint():
    # without the hint, h is solved for linearly
    b = P("v^2 + v*g + g^2*h")
    final, trail = reduction_pass(b, ("v", "g", "h"), Hints("v", P("g"), None))
    assert trail[0].kind == "divisor-pattern"
    assert reduction_pass(b, ("v", "g", "h"))[1][0].kind == "linear-solve"


# ---------------------------------------------------------------- property


def _weighted_poly(w, d, picks):
    n = len(w)
    exps = [e for e in itertools.product(range(d + 1), repeat=n) if sum(a * b for a, b in zip(w, e)) == d]
    chosen = sorted({exps[i % len(exps)] for i in picks}) if exps else []
    vs = ("x0", "x1", "x2")[:n]
    return Polynomial({tuple((v, k) for v, k in zip(vs, e) if k): 1 for e in chosen}), vs


@given(st.lists(st.integers(1, 4), min_size=2, max_size=3), st.integers(4, 9),
       st.lists(st.integers(0, 50), min_size=2, max_size=4))
@settings(max_examples=60)
def test_weighted_homogeneous_property(w, d, picks):
    b, vs = _weighted_poly(w, d, picks)
    if len(b.terms) < 2 or any(b.degree(v) == 0 for v in vs) or detect_linear_variable(b, vs):
        return
    found = weighted_homogeneous_weights(b, vs)
    assert found is not None and all(x > 0 for x in found)
    vals = {sum(found[vs.index(v)] * k for v, k in m) for m in b.terms}
    assert len(vals) == 1
    r = apply_weight_reduction(b, found, vs)
    assert r.verify()
    _, cof = monomial_content(r.reduced)
    assert cof == r.reduced
