"""Acceptance criteria, one pass/fail line each in the terminal summary."""
from contextlib import contextmanager

import pytest
import sympy

import test_localize
import test_poly
import test_weights
from conftest import ACCEPTANCE, fixture_tree, load_problem
from desing.charts import ChartIndex, chart
from desing.localize import initial_monomials, translate
from desing.parse_io import emit_tree, parse_polynomial as P
from desing.poly import RationalFunction, pth_power_decompose, substitute
from desing.reduce import (
    apply_weight_reduction,
    detect_linear_variable,
    detect_power_pattern,
    weighted_homogeneous_weights,
)
from desing.resolved import series_residual
from desing.tree import TreeConfig, build_tree, compose_path
from series_oracle import series_vanishes
from test_reduce import sympy_substitute_and_factor

CURVE = P("x0^3 + x0*x1 + x1^5")

DESC = {
    1: "curve chart K=3: b_3, init, weight (5,3), child 1+u+u^3t^7, composed map",
    2: "curve origin part of chart 0: weights {(1,2),(4,1)} and their children",
    3: "curve charts K=1, K=2 empty with a nonzero-constant witness",
    4: "weighted homogeneity: Narasimhan, Hauser, Eisenbud weights and cofactors",
    5: "linear solves for uv-w^2 and x^2-y^2z",
    6: "char 2: quartic p-th root and the Hauser chain ending in a solve for z2",
    7: "three-branch surface: three weight children, each checked by sympy",
    8: "property suites (a)-(h)",
}


@contextmanager
def criterion(k):
    ok = ACCEPTANCE.get(k, (DESC[k], True))[1]
    ACCEPTANCE[k] = (DESC[k], False)
    try:
        yield
    except BaseException:
        raise
    else:
        ACCEPTANCE[k] = (DESC[k], ok)


def renamed(poly, node_id):
    return substitute(poly, {f"x{node_id}_0": P("u"), f"x{node_id}_1": P("t")})


def check_arc_by_sympy(tree, arc):
    """phi(b_source) == factor * b_target via sympy substitution and content split."""
    src, dst = tree.nodes[arc.source], tree.nodes[arc.target]
    assert all(r.den == P("1") for r in arc.phi.values())
    content, cof = sympy_substitute_and_factor(src.b, arc.phi, dst.vars)
    syms = {v: sympy.Symbol(v) for v in dst.vars}
    expect = lambda f: sympy.sympify(str(f).replace("^", "**"), locals=syms)
    assert content == expect(arc.factor)
    assert sympy.expand(cof - expect(dst.b)) == 0


# ------------------------------------------------------------------ 1 - 3


def test_criterion_1_chart_3(curve_tree):
    with criterion(1):
        c = chart(CURVE, ChartIndex(3, 2), ("x0", "x1"), "3")
        assert c.b == P("x3_0^3 + x3_1^5 + x3_0^2*x3_1^4")
        assert initial_monomials(translate(c.b, c.vars, c.constraints)) == {(3, 0), (0, 5), (2, 4)}
        tree = curve_tree
        (leaf,) = tree.children("3")
        assert tree.arc_to(leaf).weights == (5, 3)
        assert renamed(tree.nodes[leaf].b, leaf) == P("1 + u + u^3*t^7")
        m = compose_path(tree, leaf)
        u, t = P(f"x{leaf}_0"), P(f"x{leaf}_1")
        assert m.phi["x0"] == RationalFunction(P("1"), t ** 5 * u ** 2)
        assert m.phi["x1"] == RationalFunction(P("1"), t ** 3 * u)


def test_criterion_2_origin_part(curve_tree):
    with criterion(2):
        tree = curve_tree
        origin = [a for a in tree.arcs if a.source == "0"
                  and a.part.vanishes(P("a0_0")) and a.part.vanishes(P("a0_1"))]
        assert sorted(a.weights for a in origin) == [(1, 2), (4, 1)]
        kids = {a.weights: renamed(tree.nodes[a.target].b, a.target) for a in origin}
        assert kids[(1, 2)] == P("1 + u + u^5*t^7")
        assert kids[(4, 1)] == P("1 + u + u^3*t^7")
        for a in origin:
            check_arc_by_sympy(tree, a)


def test_criterion_3_empty_charts(curve_tree):
    with criterion(3):
        tree = curve_tree
        for k in ("1", "2"):
            node = tree.nodes[k]
            assert node.status == "empty" and node.constraints.contains_one()
            assert "nonzero constant" in node.witness
        assert tree.nodes["0"].status != "empty" and tree.nodes["3"].status != "empty"


# ------------------------------------------------------------------ 4 - 6


def test_criterion_4_weighted_homogeneous():
    with criterion(4):
        nar = P("x0^2 + x1*x2^3 + x2*x3^3 + x1^7*x3")
        hau = P("x0^2 + x1^4*x2 + x1^2*x2^4 + x2^7")
        eis = P("x0^2 + x1^2 + x2^2")
        v3, v4 = ("x0", "x1", "x2"), ("x0", "x1", "x2", "x3")
        assert weighted_homogeneous_weights(nar, v4) == (32, 7, 19, 15)
        assert weighted_homogeneous_weights(hau, v3) == (7, 3, 2)
        assert weighted_homogeneous_weights(eis, v3) == (1, 1, 1)
        assert apply_weight_reduction(hau, (7, 3, 2), v3).reduced == P("z1 + z0^4 + z1*z0^2 + z1^2")
        assert apply_weight_reduction(eis, (1, 1, 1), v3).reduced == P("1 + z0^2 + z1^2")
        r = apply_weight_reduction(nar, (32, 7, 19, 15), v4)
        assert r.reduced == P("z2^2 + z2*z1^2 + z2*z0 + z0^3")
        # the printed factor z3^64 omits z2^7; the oracle below decides
        assert r.factor == P("z3^64*z2^7")
        content, cof = sympy_substitute_and_factor(nar, r.phi, ("z0", "z1", "z2", "z3"))
        z0, z1, z2, z3 = sympy.symbols("z0 z1 z2 z3")
        assert content == z3 ** 64 * z2 ** 7
        assert cof == sympy.expand(z2 ** 2 + z2 * z1 ** 2 + z2 * z0 + z0 ** 3)


def test_criterion_5_linear_solves():
    with criterion(5):
        for b, vs, var, sol in [
            ("u*v - w^2", ("u", "v", "w"), "u", RationalFunction(P("w^2"), P("v"))),
            ("x^2 - y^2*z", ("x", "y", "z"), "z", RationalFunction(P("x^2"), P("y^2"))),
        ]:
            r = detect_linear_variable(P(b), vs)
            assert r.solved == (var, sol)
            assert r.verify()
            syms = {x: sympy.Symbol(x) for x in vs}
            expr = sympy.sympify(b.replace("^", "**"), locals=syms)
            val = sympy.sympify(f"({sol.num})/({sol.den})".replace("^", "**"), locals=syms)
            assert sympy.simplify(expr.subs(syms[var], val)) == 0


def test_criterion_6_char2():
    with criterion(6):
        q = P("x0^3*x1^2*x2 + x1^3*x2^2*x3 + x2^3*x3^2*x0 + x3^3*x0^2*x1", 2)
        quartic = q ** 4
        assert pth_power_decompose(pth_power_decompose(quartic)) == q
        b = P("(x0*x1*x2*x3)^5", 2) + quartic
        r = detect_power_pattern(b, "x0", 4, variables=("x0", "x1", "x2", "x3"))
        assert r is not None and r.power == 4 and r.verify()

        hau = P("(x2 + x1*x0^2)^2 + x0*(x1^2 + x0^3)^2", 2)
        r = detect_power_pattern(hau, "x0", 2, variables=("x0", "x1", "x2"))
        # printed form (z2 + z1 z0^2) + z0 (z1^2 + z0^3) does not reassemble;
        # the identity-checked result is:
        assert r.reduced == P("z2 + z0*z1^2 + z0^4*z1 + z0^7", 2) and r.verify()
        solve = detect_linear_variable(r.reduced, r.target_vars)
        assert solve.solved[0] == "z2" and solve.verify()


# ------------------------------------------------------------------ 7


def test_criterion_7_three_branch():
    with criterion(7):
        tree = fixture_tree("three_branch")
        kids = tree.children("root")
        assert len(kids) == 3
        assert sorted(tree.arc_to(k).weights for k in kids) == [(2, 1, 1), (3, 2, 1), (6, 3, 2)]
        # a hand-derived b_1 in circulation fails this check; the sympy result decides
        for k in kids:
            check_arc_by_sympy(tree, tree.arc_to(k))


# ------------------------------------------------------------------ 8


def test_criterion_8a_arc_round_trip():
    with criterion(8):
        test_weights.test_arc_maps_round_trip()


def test_criterion_8b_unimodular():
    with criterion(8):
        test_weights.test_unimodular_det_and_inverse()


def test_criterion_8c_valid_brute_force():
    with criterion(8):
        test_weights.test_valid_agrees_with_brute_force()


def test_criterion_8d_minimality():
    with criterion(8):
        test_weights.test_minimal_is_not_a_sum()


def test_criterion_8e_init_antichain():
    with criterion(8):
        test_localize.test_init_antichain_cover_at_origin()


def test_criterion_8f_series_own_route():
    with criterion(8):
        for name in ("curve", "three_branch", "resolved"):
            tree = fixture_tree(name)
            resolved = [n for n in tree.nodes.values() if n.status == "resolved"]
            assert resolved
            for n in resolved:
                assert n.resolution.series.order == 12
                assert series_residual(n.resolution.decomposition, n.resolution.series) == {}


def _sympy_route(nodes):
    for n in nodes:
        assert series_vanishes(n, 12) == (True, None), n.id


# generic-part curve leaves 4, 5, 6 take seconds in sympy; scripts/series_oracle.py covers them
@pytest.mark.parametrize("node", ["0", "1", "2"])
def test_criterion_8f_series_sympy_route_surface(node):
    with criterion(8):
        tree = fixture_tree("three_branch")
        assert tree.nodes[node].status == "resolved"
        _sympy_route([tree.nodes[node]])


def test_criterion_8f_series_sympy_route_curve():
    with criterion(8):
        _sympy_route([fixture_tree("resolved").nodes["root"]]
                     + [fixture_tree("curve").nodes[k] for k in ("7", "8", "9")])


def test_criterion_8g_monomial_content():
    with criterion(8):
        test_poly.test_monomial_content_round_trip()


def test_criterion_8h_deterministic_json():
    with criterion(8):
        spec = load_problem("three_branch")
        cfgs = [TreeConfig(at_origin=True), TreeConfig(at_origin=True), TreeConfig(at_origin=True, jobs=3)]
        texts = {emit_tree(build_tree(spec.b, spec.vars, c), "json") for c in cfgs}
        assert len(texts) == 1
