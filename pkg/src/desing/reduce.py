"""Global-parameter reductions: linear solve, divisor and power patterns, weighted homogeneity."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .poly import (
    Polynomial,
    RationalFunction,
    coefficients_wrt,
    exact_divide,
    mono_from,
    monomial_content,
    pth_power_decompose,
    substitute,
    substitute_rational,
    var_key,
)
from .weights import unimodular_extend

MAX_STEPS = 32


class ReductionError(RuntimeError):
    pass


@dataclass
class Reduction:
    """mult*phi(source) = factor * reduced^power, or a solve when kind is linear-solve."""

    kind: str
    source: Polynomial
    source_vars: Tuple[str, ...]
    target_vars: Tuple[str, ...]
    phi: Dict[str, RationalFunction]
    psi: Dict[str, RationalFunction]
    reduced: Polynomial
    factor: Polynomial
    power: int = 1
    globals: Tuple[str, ...] = ()
    weights: Optional[Tuple[int, ...]] = None
    matrix: Optional[Tuple[Tuple[int, ...], ...]] = None
    solved: Optional[Tuple[str, RationalFunction]] = None
    notes: List[str] = field(default_factory=list)

    def verify(self) -> bool:
        char = self.source.char
        if self.kind == "linear-solve":
            v, sol = self.solved
            return substitute_rational(self.source, {v: sol}).num.is_zero()
        lhs = substitute_rational(self.source, self.phi)
        rhs = RationalFunction(self.factor) * RationalFunction(self.reduced) ** self.power
        if not lhs == rhs:
            return False
        for x in self.source_vars:
            if x in self.phi:
                diff = self.phi[x].substitute(self.psi) - RationalFunction(Polynomial.var(x, char))
                # the power pattern inverts only modulo the source relation
                if diff.num.is_zero():
                    continue
                _, num = monomial_content(diff.num)
                if exact_divide(num, self.source) is None:
                    return False
        return True

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "source": str(self.source),
            "reduced": str(self.reduced),
            "factor": str(self.factor),
            "power": str(self.power),
            "phi": {k: str(v) for k, v in self.phi.items()},
            "psi": {k: str(v) for k, v in self.psi.items()},
            "globals": list(self.globals),
        }
        if self.weights is not None:
            d["weights"] = [str(x) for x in self.weights]
        if self.matrix is not None:
            d["matrix"] = [[str(x) for x in row] for row in self.matrix]
        if self.solved is not None:
            d["solved"] = {self.solved[0]: str(self.solved[1])}
        return d


def _vars(b: Polynomial, variables: Optional[Sequence[str]]) -> Tuple[str, ...]:
    if variables is None:
        return tuple(sorted(b.variables(), key=var_key))
    return tuple(variables)


def fresh_name(v: str, prefix: str) -> str:
    m = re.fullmatch(r"[A-Za-z]+(\d+)", v)
    return f"{prefix}{m.group(1)}" if m else f"{prefix}_{v}"


def _identity_maps(vs: Sequence[str], char: int):
    return ({v: RationalFunction(Polynomial.var(v, char)) for v in vs},
            {v: RationalFunction(Polynomial.var(v, char)) for v in vs})


# -------------------------------------------------------------- linear solve


def detect_linear_variable(b: Polynomial, variables: Optional[Sequence[str]] = None) -> Optional[Reduction]:
    """First variable x with b = f1 - x*f2, f1 and f2 free of x; the solve x = f1/f2."""
    vs = _vars(b, variables)
    char = b.char
    for v in vs:
        if b.degree(v) != 1:
            continue
        c0, c1 = coefficients_wrt(b, v)
        f1, f2 = c0, -c1
        sol = RationalFunction(f1, f2)
        rest = tuple(x for x in vs if x != v)
        phi, psi = _identity_maps(rest, char)
        red = Reduction("linear-solve", b, vs, rest, phi, psi, Polynomial({}, char),
                        Polynomial.const(1, char), 1, rest, solved=(v, sol))
        return red
    return None


# ------------------------------------------------------ weighted homogeneity


def _primitive(v: Sequence[Fraction]) -> Tuple[int, ...]:
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    ints = [x // g for x in ints]
    if any(x < 0 for x in ints) and all(x <= 0 for x in ints):
        ints = [-x for x in ints]
    return tuple(ints)


def _kernel(rows: List[List[int]], n: int) -> List[Tuple[int, ...]]:
    import sympy

    if not rows:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    basis = sympy.Matrix(rows).nullspace()
    return [_primitive([Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in vec])
            for vec in basis]


def weighted_homogeneous_weights(
    b: Polynomial, variables: Optional[Sequence[str]] = None, search: int = 4
) -> Optional[Tuple[int, ...]]:
    """Nonzero non-negative primitive w, constant on the support; None if no such w."""
    vs = _vars(b, variables)
    sup = b.support()
    if len(sup) < 2:
        return None
    occurring = [v for v in vs if b.degree(v) > 0]
    idx = {v: i for i, v in enumerate(occurring)}
    exps = []
    for m in sup:
        e = [0] * len(occurring)
        for v, k in m:
            e[idx[v]] = k
        exps.append(e)
    rows = [[a - b0 for a, b0 in zip(e, exps[0])] for e in exps[1:]]
    K = _kernel(rows, len(occurring))
    if not K:
        return None
    good = [k for k in K if any(k) and all(x >= 0 for x in k)]
    if good:
        w = min(good)
    elif len(K) == 1:
        return None
    else:
        best = None
        rng = range(-search, search + 1)
        for coeffs in itertools.product(rng, repeat=len(K)):
            if not any(coeffs):
                continue
            v = [sum(c * k[i] for c, k in zip(coeffs, K)) for i in range(len(occurring))]
            if any(x < 0 for x in v) or not any(v):
                continue
            v = _primitive(v)
            key = (sum(v), v)
            if best is None or key < best:
                best = key
        if best is None:
            return None
        w = best[1]
    full = tuple(w[idx[v]] if v in idx else 0 for v in vs)
    vals = {sum(full[vs.index(v)] * k for v, k in m) for m in sup}
    assert len(vals) == 1
    return full


def apply_weight_reduction(
    b: Polynomial,
    w: Sequence[int],
    variables: Optional[Sequence[str]] = None,
    new_vars: Optional[Sequence[str]] = None,
) -> Reduction:
    """phi(x_i) = prod_j z_j^M_ij with w the last column of M; the last z is a global parameter."""
    vs = _vars(b, variables)
    char = b.char
    if len(w) != len(vs):
        raise ValueError("weight vector length does not match the variables")
    new = tuple(new_vars) if new_vars is not None else tuple(f"z{j}" for j in range(len(vs)))
    U = unimodular_extend(w)
    phi, psi = {}, {}
    for i, x in enumerate(vs):
        phi[x] = RationalFunction(Polynomial.monomial(mono_from((new[j], U.matrix[i][j]) for j in range(len(vs))), 1, char))
    for j, z in enumerate(new):
        psi[z] = RationalFunction(Polynomial.monomial(mono_from((vs[i], U.inverse[j][i]) for i in range(len(vs))), 1, char))
    image = substitute(b, {x: r.as_polynomial() for x, r in phi.items()})
    content, red = monomial_content(image, new)
    glob = new[-1]
    if red.degree(glob) > 0:
        raise ReductionError("cofactor still mentions the global parameter")
    factor = Polynomial.monomial(content, 1, char)
    return Reduction("weighted-homogeneous", b, vs, new[:-1], phi, psi, red, factor, 1, (glob,),
                     weights=tuple(w), matrix=U.matrix)


# ----------------------------------------------------------- divisor pattern


def detect_divisor_pattern(
    b: Polynomial,
    v,
    g: Polynomial,
    variables: Optional[Sequence[str]] = None,
    names: Optional[Dict[str, str]] = None,
) -> Optional[Reduction]:
    """v -> y*g (jointly for a set of variables); reduced = phi(b) / g^m when exact."""
    vs = _vars(b, variables)
    V = (v,) if isinstance(v, str) else tuple(v)
    char = b.char
    if g.is_zero() or g.is_constant():
        return None
    if any(g.degree(x) > 0 for x in V):
        raise ValueError("g must be free of the substituted variables")
    names = dict(names or {})
    for x in V:
        names.setdefault(x, fresh_name(x, "y"))
    m = max(sum(k for x, k in mono if x in V) for mono in b.terms)
    if m == 0:
        return None
    images = {x: Polynomial.var(names[x], char) * g for x in V}
    image = substitute(b, images)
    red = exact_divide(image, g ** m)
    if red is None:
        return None
    target = tuple(names.get(x, x) for x in vs)
    ren = {x: names[x] for x in vs if x in names and x not in V}
    if ren:
        images.update({x: Polynomial.var(y, char) for x, y in ren.items()})
        g_new = g.rename(ren)
        images.update({x: Polynomial.var(names[x], char) * g_new for x in V})
        red = red.rename(ren)
    phi = {x: RationalFunction(images[x]) for x in images}
    psi = {names[x]: RationalFunction(Polynomial.var(x, char), g) for x in V}
    psi.update({y: RationalFunction(Polynomial.var(x, char)) for x, y in ren.items()})
    factor = (g ** m).rename(ren)
    return Reduction("divisor-pattern", b, vs, target, phi, psi, red, factor, 1)


def maximal_monomial_divisor(b: Polynomial, V: Sequence[str]) -> Optional[Polynomial]:
    """Largest monomial g free of V with coefficient of V-degree m-j divisible by g^j."""
    m = max(sum(k for x, k in mono if x in V) for mono in b.terms)
    if m == 0:
        return None
    bound: Dict[str, int] = {}
    others = {x for mono in b.terms for x, _ in mono if x not in V}
    for x in others:
        bound[x] = 10 ** 9
    for mono in b.terms:
        j = m - sum(k for x, k in mono if x in V)
        if j == 0:
            continue
        e = dict(mono)
        for x in others:
            bound[x] = min(bound[x], e.get(x, 0) // j)
    g = mono_from((x, k) for x, k in bound.items() if k > 0)
    if not g:
        return None
    return Polynomial.monomial(g, 1, b.char)


# ------------------------------------------------------------- power pattern


def kth_root(f: Polynomial, k: int) -> Optional[Polynomial]:
    """h with h^k = f for k a power of the characteristic, by repeated Frobenius roots."""
    p = f.char
    if p == 0 or k < 1:
        return None
    h = f
    while k > 1:
        if k % p:
            return None
        h = pth_power_decompose(h, p)
        if h is None:
            return None
        k //= p
    return h


def split_power_pattern(b: Polynomial, k: int):
    """(v, g, f1, f2) with b = f1^k - v*g*f2^k, g a monomial, found from exponents mod k."""
    char = b.char
    A = Polynomial({m: c for m, c in b.terms.items() if all(e % k == 0 for _, e in m)}, char)
    rest = b - A
    if A.is_zero() or rest.is_zero():
        return None
    f1 = kth_root(A, k)
    if f1 is None:
        return None
    content, H = monomial_content(rest)
    h = kth_root(H, k)
    if h is None:
        return None
    q = mono_from((x, e // k) for x, e in content)
    r = mono_from((x, e % k) for x, e in content)
    if not r:
        return None
    v = next((x for x, e in sorted(r, key=lambda t: var_key(t[0])) if e == 1), None)
    if v is None:
        return None
    g = Polynomial.monomial(tuple((x, e) for x, e in r if x != v), 1, char)
    f2 = h.mul_term(q)
    if k % 2 == 1:
        f2 = -f2
    if not f1 ** k - Polynomial.var(v, char) * g * f2 ** k == b:
        return None
    return v, g, f1, f2


def detect_power_pattern(
    b: Polynomial,
    v: str,
    k: int,
    g: Optional[Polynomial] = None,
    f1: Optional[Polynomial] = None,
    f2: Optional[Polynomial] = None,
    variables: Optional[Sequence[str]] = None,
    names: Optional[Dict[str, str]] = None,
) -> Optional[Reduction]:
    """b = f1^k - v*g*f2^k; phi(v) = z^k/g, other variables renamed; reduced = f1 - z*f2 after phi."""
    if k < 2:
        raise ValueError("k must be at least 2")
    vs = _vars(b, variables)
    char = b.char
    if f1 is None or f2 is None:
        if char == 0 or kth_root(Polynomial.const(1, char), k) is None:
            return None
        found = split_power_pattern(b, k)
        if found is None or found[0] != v:
            return None
        _, g0, f1, f2 = found
        if g is not None and g != g0:
            return None
        g = g0
    g = g if g is not None else Polynomial.const(1, char)
    if g.degree(v) > 0:
        raise ValueError("g must be free of v")
    x = Polynomial.var(v, char)
    if not f1 ** k - x * g * f2 ** k == b:
        return None
    names = dict(names or {})
    for y in vs:
        names.setdefault(y, fresh_name(y, "z"))
    z = Polynomial.var(names[v], char)
    phi = {y: RationalFunction(Polynomial.var(names[y], char)) for y in vs if y != v}
    phi[v] = RationalFunction(z ** k, g.rename(names))
    psi = {names[y]: RationalFunction(Polynomial.var(y, char)) for y in vs if y != v}
    # z = f1/f2 on the hypersurface; outside it the k-th root is the birational inverse
    psi[names[v]] = RationalFunction(f1, f2)
    rf = substitute_rational(f1, phi) - RationalFunction(z) * substitute_rational(f2, phi)
    num, den = rf.num, rf.den
    if not den.is_monomial():
        return None
    content, red = monomial_content(num)
    dm = den.leading()
    factor_m = Polynomial.monomial(content, 1, char) / Polynomial.monomial(dm[0], dm[1], char)
    target = tuple(names[y] for y in vs)
    out = Reduction("power-pattern", b, vs, target, phi, psi, red, factor_m ** k, k)
    out.notes.append(f"{v} = {names[v]}^{k}/({g})")
    return out


# ---------------------------------------------------------------- the pass


@dataclass
class Hints:
    var: Optional[str] = None
    g: Optional[Polynomial] = None
    k: Optional[int] = None


def _auto_power(b: Polynomial, vs: Sequence[str], names: Optional[Dict[str, str]]) -> Optional[Reduction]:
    p = b.char
    if p == 0:
        return None
    top = max((e for m in b.terms for _, e in m), default=0)
    ks = []
    k = p
    while k <= top:
        ks.append(k)
        k *= p
    for k in reversed(ks):
        found = split_power_pattern(b, k)
        if found is None:
            continue
        v, g, f1, f2 = found
        r = detect_power_pattern(b, v, k, g, f1, f2, vs, names)
        if r is not None and not r.reduced.is_constant():
            return r
    return None


def _auto_divisor(b: Polynomial, vs: Sequence[str], names: Optional[Dict[str, str]]) -> Optional[Reduction]:
    occurring = [v for v in vs if b.degree(v) > 0]
    groups = [(v,) for v in occurring] + list(itertools.combinations(occurring, 2))
    for V in groups:
        g = maximal_monomial_divisor(b, V)
        if g is None:
            continue
        r = detect_divisor_pattern(b, V, g, vs, names)
        if r is not None and not r.reduced.is_constant():
            return r
    return None


def reduction_step(
    b: Polynomial,
    variables: Optional[Sequence[str]] = None,
    hints: Optional[Hints] = None,
    namer=None,
) -> Optional[Reduction]:
    """One reduction in the fixed order: hints, linear solve, weighted, power, monomial divisor."""
    vs = _vars(b, variables)
    names = namer(vs) if namer is not None else None
    if hints is not None and hints.var is not None:
        if hints.k is not None:
            r = detect_power_pattern(b, hints.var, hints.k, hints.g, variables=vs, names=names)
        elif hints.g is not None:
            r = detect_divisor_pattern(b, hints.var, hints.g, vs, names)
        else:
            r = None
        if r is not None:
            return r
    r = detect_linear_variable(b, vs)
    if r is not None:
        return r
    w = weighted_homogeneous_weights(b, vs)
    if w is not None:
        new = tuple(names[v] for v in vs) if names else None
        return apply_weight_reduction(b, w, vs, new)
    r = _auto_power(b, vs, names)
    if r is not None:
        return r
    return _auto_divisor(b, vs, names)


def reduction_pass(
    b: Polynomial,
    variables: Optional[Sequence[str]] = None,
    hints: Optional[Hints] = None,
    max_steps: int = MAX_STEPS,
) -> Tuple[Polynomial, List[Reduction]]:
    """Apply reductions until none fires; a linear solve ends the pass with the zero polynomial."""
    vs = _vars(b, variables)
    trail: List[Reduction] = []
    cur = b
    for step in range(max_steps):
        r = reduction_step(cur, vs, hints if step == 0 else None)
        if r is None:
            return cur, trail
        if not r.verify():
            raise ReductionError(f"{r.kind} reduction failed its identity check")
        trail.append(r)
        if r.kind == "linear-solve":
            return r.reduced, trail
        cur, vs = r.reduced, r.target_vars
    raise ReductionError(f"reduction pass did not settle within {max_steps} steps")
