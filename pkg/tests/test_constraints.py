import sympy
from hypothesis import given, settings, strategies as st

from desing.constraints import ConstraintSet, groebner_basis, in_radical, normal_form, split
from desing.parse_io import parse_polynomial as P

CURVE_A = P("a0^3 + a0*a1 + a1^5")


def test_generator_reduces_to_zero():
    c = ConstraintSet([P("a00"), P("a01")])
    assert normal_form(P("a00"), c).is_zero()


def test_linear_coefficient_survives_on_curve():
    c = ConstraintSet([CURVE_A])
    assert not normal_form(P("a1 + 3*a0^2"), c).is_zero()


def test_constant_survives():
    c = ConstraintSet([P("a0")])
    assert normal_form(P("1"), c) == P("1")


def test_split_on_curve_gives_two_parts():
    zero, nonzero = split(ConstraintSet([CURVE_A]), P("a0"))
    assert zero is not None and nonzero is not None
    # a1^5 lies in the ideal, a1 only in its radical
    assert zero.is_zero(P("a0")) and zero.vanishes(P("a1")) and not zero.is_zero(P("a1"))
    assert P("a0") in nonzero.ineq


def test_split_trivial_cases():
    c = ConstraintSet([P("a0")])
    assert split(c, P("a0")) == (c, None)
    c = ConstraintSet([], [P("a0")])
    zero, nonzero = split(c, P("a0"))
    assert zero is None and nonzero.ineq == c.ineq and not nonzero.basis


def test_emptiness_and_radical():
    assert ConstraintSet([P("a0"), P("a0 - 1")]).empty
    # a0 != 0 is impossible once a0^2 = 0
    assert ConstraintSet([P("a0^2")], [P("a0")]).empty
    assert in_radical(P("a0"), [P("a0^3")])
    assert not in_radical(P("a0"), [P("a0*a1")])


def test_nonvanishing():
    c = ConstraintSet([P("a0 - 1")])
    assert c.nonvanishing(P("a0"))
    assert not c.nonvanishing(P("a1"))


def test_vanishes_on_unsaturated_part():
    # a0*a1 = 0 with a0 != 0 forces a1 = 0 pointwise but a1 is not in the ideal
    c = ConstraintSet([P("a0*a1")], [P("a0")])
    assert not c.is_zero(P("a1"))
    assert c.vanishes(P("a1"))
    assert not c.vanishes(P("a0 + a1"))


def test_char2_basis():
    G = groebner_basis([P("a^2 + b", 2), P("a*b + 1", 2)], 2)
    c = ConstraintSet([P("a^2 + b", 2), P("a*b + 1", 2)], (), 2)
    assert c.basis == tuple(G)
    assert c.is_zero(P("b^3 + 1", 2))


SYM = sympy.symbols("a0 a1 a2")


def ideals():
    exps = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
    poly = st.dictionaries(exps, st.integers(-3, 3), min_size=1, max_size=3)
    return st.lists(poly, min_size=1, max_size=3)


def _to_poly(d):
    from desing.poly import Polynomial

    return Polynomial({tuple((f"a{i}", e) for i, e in enumerate(k) if e): c for k, c in d.items()})


@given(ideals())
@settings(max_examples=40)
def test_groebner_matches_sympy(gens):
    polys = [p for p in (_to_poly(d) for d in gens) if not p.is_zero()]
    if not polys:
        return
    ours = groebner_basis(polys)
    exprs = [sympy.sympify(str(p).replace("^", "**"), locals={f"a{i}": s for i, s in enumerate(SYM)})
             for p in polys]
    theirs = sympy.groebner(exprs, *SYM, order="grlex")
    got = {sympy.expand(sympy.sympify(str(g).replace("^", "**"), locals={f"a{i}": s for i, s in enumerate(SYM)}))
           for g in ours}
    want = {sympy.expand(g / sympy.Poly(g, *SYM).LC(order="grlex")) for g in theirs.exprs}
    assert got == want


@given(ideals(), st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)),
                                 st.integers(-3, 3), max_size=4))
@settings(max_examples=40)
def test_normal_form_is_idempotent_and_member_difference(gens, fd):
    polys = [p for p in (_to_poly(d) for d in gens) if not p.is_zero()]
    c = ConstraintSet(polys)
    f = _to_poly(fd)
    r = c.normal_form(f)
    assert c.normal_form(r) == r
    assert c.is_zero(f - r)
