"""Translation to a generic point, initial monomials, and init-set partitions."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .constraints import ConstraintSet
from .poly import Polynomial, substitute

Exps = Tuple[int, ...]

_INTERNAL = re.compile(r"x(\d+)_(\d+)")


def generic_name(v: str) -> str:
    """Generic coordinate symbol for a variable: x7_0 -> a7_0, u -> a_u."""
    m = _INTERNAL.fullmatch(v)
    if m:
        return f"a{m.group(1)}_{m.group(2)}"
    return f"a_{v}"


def generic_point(vs: Sequence[str], char: int = 0) -> Dict[str, Polynomial]:
    return {v: Polynomial.var(generic_name(v), char) for v in vs}


def divides(a: Exps, b: Exps) -> bool:
    return all(x <= y for x, y in zip(a, b))


def exps_key(e: Exps):
    """Total degree first, then earlier variables heavier (display order)."""
    return (sum(e), tuple(-x for x in e))


@dataclass
class LocalizedPoly:
    B: Polynomial
    xvars: Tuple[str, ...]
    yvars: Tuple[str, ...]
    constraints: ConstraintSet
    coeffs: Dict[Exps, Polynomial]

    def support(self) -> List[Exps]:
        return sorted(self.coeffs, key=exps_key)

    def coefficient(self, alpha: Exps) -> Polynomial:
        return self.coeffs.get(alpha, Polynomial({}, self.B.char))


def translate(b: Polynomial, xvars: Sequence[str], c: ConstraintSet,
              yvars: Optional[Sequence[str]] = None) -> LocalizedPoly:
    """B(y) = b(a + y) with coefficients reduced modulo c + {b(a)}."""
    if c.empty:
        raise ValueError("cannot translate to an empty part")
    xvars = tuple(xvars)
    yvars = tuple(yvars) if yvars is not None else tuple(f"y{j}" for j in range(len(xvars)))
    char = b.char
    coords = generic_point(xvars, char)
    c = c.with_eq(substitute(b, coords))
    if c.empty:
        raise ValueError("part becomes empty once b(a) = 0 is imposed")
    images = {x: coords[x] + Polynomial.var(y, char) for x, y in zip(xvars, yvars)}
    B = substitute(b, images)
    coeffs: Dict[Exps, Polynomial] = {}
    out = Polynomial({}, char)
    for m, coef in B.collect(yvars).items():
        r = c.normal_form(coef)
        if r.is_zero():
            continue
        d = dict(m)
        coeffs[tuple(d.get(y, 0) for y in yvars)] = r
        out = out + r.mul_term(m)
    if tuple(0 for _ in yvars) in coeffs:
        raise AssertionError("constant term survived the translation")
    return LocalizedPoly(out, xvars, yvars, c, coeffs)


def minimal_elements(support) -> List[Exps]:
    sup = sorted(set(support), key=exps_key)
    out: List[Exps] = []
    for e in sup:
        if not any(divides(m, e) for m in out):
            out.append(e)
    return out


def initial_monomials(L: LocalizedPoly) -> FrozenSet[Exps]:
    if not L.coeffs:
        raise ValueError("degenerate part: every coefficient vanishes")
    return frozenset(minimal_elements(L.coeffs))


def partition_by_init(L: LocalizedPoly) -> List[Tuple[ConstraintSet, FrozenSet[Exps]]]:
    """Split the part by which candidate coefficients vanish; nonzero branches first."""
    cands = L.support()
    out: List[Tuple[ConstraintSet, FrozenSet[Exps]]] = []
    stack: List[Tuple[ConstraintSet, int, Tuple[Exps, ...]]] = [(L.constraints, 0, ())]
    while stack:
        c, i, chosen = stack.pop()
        while i < len(cands):
            m = cands[i]
            if any(divides(n, m) for n in chosen):
                i += 1
                continue
            zero, nonzero = c.split(L.coeffs[m])
            if zero is not None and nonzero is not None:
                stack.append((zero, i + 1, chosen))
                c, chosen = nonzero, chosen + (m,)
            elif nonzero is not None:
                c, chosen = nonzero, chosen + (m,)
            elif zero is not None:
                c = zero
            else:
                break
            i += 1
        else:
            if chosen:
                out.append((c, frozenset(chosen)))
    return out
