"""Strongly resolved form: decomposition, the unit's series, and the certifying rewrite."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .constraints import ConstraintSet
from .localize import generic_name
from .poly import (
    Monomial,
    Polynomial,
    RationalFunction,
    coefficients_wrt,
    exact_divide,
    format_monomial,
    mono_degree,
    mono_inv,
    mono_mul,
    monomial_content,
    poly_gcd,
    substitute,
    substitute_rational,
)


@dataclass
class ResolvedDecomposition:
    """b = f0 + unit*f1 + dist*D*sum_j unit^j g_j, with f1 and f0 units at the point."""

    b: Polynomial
    unit: str
    dist: str
    others: Tuple[str, ...]
    f0: Polynomial
    f1: Polynomial
    D: Polynomial
    g: List[Polynomial]
    shift: Dict[str, Polynomial] = field(default_factory=dict)
    F: Optional[Polynomial] = None
    part: Optional[ConstraintSet] = None

    def reassemble(self) -> Polynomial:
        u = Polynomial.var(self.unit, self.b.char)
        t = Polynomial.var(self.dist, self.b.char)
        tail = Polynomial({}, self.b.char)
        for j, gj in enumerate(self.g):
            tail = tail + gj * u ** j
        return self.f0 + u * self.f1 + t * self.D * tail

    def to_dict(self) -> dict:
        return {
            "unit": self.unit,
            "dist": self.dist,
            "f0": str(self.f0),
            "f1": str(self.f1),
            "D": str(self.D),
            "g": [str(gj) for gj in self.g],
        }


def default_part(b: Polynomial, dist: str, variables: Sequence[str]) -> ConstraintSet:
    coords = {v: Polynomial.var(generic_name(v), b.char) for v in variables}
    return ConstraintSet([coords[dist], substitute(b, coords)], (), b.char)


def _gcd_all(polys: Sequence[Polynomial]) -> Polynomial:
    nz = [p for p in polys if not p.is_zero()]
    if not nz:
        return Polynomial.const(1, polys[0].char if polys else 0)
    g = nz[0]
    for p in nz[1:]:
        if g.is_constant():
            break
        g = poly_gcd(g, p)
    return g if not g.is_constant() else Polynomial.const(1, g.char)


def is_strongly_resolved(
    b: Polynomial,
    unit: str,
    dist: str,
    constraints: Optional[ConstraintSet] = None,
    variables: Optional[Sequence[str]] = None,
) -> Optional[ResolvedDecomposition]:
    """The decomposition when b mod dist is linear in unit with f1, f0 nonzero at the point."""
    if unit == dist:
        raise ValueError("unit and distinguished variable must differ")
    vs = tuple(variables) if variables is not None else b.variables()
    vs = vs + tuple(v for v in (unit, dist) if v not in vs)
    char = b.char
    b0 = substitute(b, {dist: Polynomial({}, char)})
    cs = coefficients_wrt(b0, unit) if b0.degree(unit) > 0 else [b0]
    if len(cs) > 2:
        return None
    f0 = cs[0]
    f1 = cs[1] if len(cs) == 2 else Polynomial({}, char)
    if f1.is_zero():
        return None
    c = constraints if constraints is not None else default_part(b, dist, vs)
    if c.empty:
        return None
    if not c.is_zero(Polynomial.var(generic_name(dist), char)):
        return None
    others = tuple(v for v in vs if v not in (unit, dist))
    shift = {v: c.normal_form(Polynomial.var(generic_name(v), char)) for v in others}
    F = c.normal_form(substitute(f1, shift))
    if not c.nonvanishing(F):
        return None
    if not c.nonvanishing(substitute(f0, shift)):
        return None
    R = (b - b0).mul_term(((dist, -1),))
    if R.is_zero():
        g = [Polynomial({}, char)]
        D = Polynomial.const(1, char)
    else:
        gs = coefficients_wrt(R, unit)
        content, _ = monomial_content(R, [v for v in R.variables() if v != unit])
        gs = [gj.mul_term(mono_inv(content)) for gj in gs]
        common = _gcd_all(gs)
        if not common.is_constant():
            gs = [exact_divide(gj, common) for gj in gs]
        D = common.mul_term(content)
        g = gs
    return ResolvedDecomposition(b, unit, dist, others, f0, f1, D, g, shift, F, c)


def find_resolution(
    b: Polynomial, variables: Sequence[str], constraints: Optional[ConstraintSet] = None
) -> Optional[ResolvedDecomposition]:
    """First (unit, dist) pair in variable order for which b is strongly resolved."""
    vs = [v for v in variables if b.degree(v) > 0]
    for u in vs:
        if b.degree(u) == 0:
            continue
        for t in vs:
            if t == u:
                continue
            dec = is_strongly_resolved(b, u, t, constraints, variables)
            if dec is not None:
                return dec
    return None


# ------------------------------------------------------------------- series


@lru_cache(maxsize=256)
def _fpow(F: Polynomial, n: int) -> Polynomial:
    return F ** n


class _Coef:
    """num / F^k with F fixed; num is kept in normal form modulo the part."""

    __slots__ = ("num", "k", "F", "nf")

    def __init__(self, num: Polynomial, k: int, F: Polynomial, nf=None):
        if nf is not None:
            num = nf(num)
        if F.is_constant():
            if k:
                num = num / (F.constant_term() ** k)
            k = 0
        elif num.is_zero():
            k = 0
        self.num, self.k, self.F, self.nf = num, k, F, nf

    @classmethod
    def _raw(cls, num: Polynomial, k: int, F: Polynomial, nf) -> "_Coef":
        c = cls.__new__(cls)
        c.num, c.k, c.F, c.nf = num, k, F, nf
        return c

    def reduced(self) -> "_Coef":
        return _Coef(self.num, self.k, self.F, self.nf)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, o: "_Coef") -> "_Coef":
        k = max(self.k, o.k)
        num = self.num * _fpow(self.F, k - self.k) if k > self.k else self.num
        onum = o.num * _fpow(self.F, k - o.k) if k > o.k else o.num
        return _Coef._raw(num + onum, k, self.F, self.nf or o.nf)

    def __mul__(self, o: "_Coef") -> "_Coef":
        return _Coef._raw(self.num * o.num, self.k + o.k, self.F, self.nf or o.nf)

    def __neg__(self) -> "_Coef":
        return _Coef(-self.num, self.k, self.F)

    def div_F(self) -> "_Coef":
        return _Coef(self.num, self.k + 1, self.F)

    def __str__(self) -> str:
        if self.k == 0:
            return str(self.num)
        n = str(self.num)
        if len(self.num.terms) > 1:
            n = f"({n})"
        den = f"({self.F})" if len(self.F.terms) > 1 else str(self.F)
        return f"{n}/{den}" + (f"^{self.k}" if self.k > 1 else "")


Series = Dict[Tuple[int, ...], _Coef]


def _smul_into(out: Series, a: Series, b: Series, N: int) -> Series:
    for e1, c1 in a.items():
        d1 = sum(e1)
        for e2, c2 in b.items():
            if d1 + sum(e2) > N:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            p = c1 * c2
            out[e] = out[e] + p if e in out else p
    return out


def _finish(out: Series) -> Series:
    out = {e: c.reduced() for e, c in out.items()}
    return {e: c for e, c in out.items() if not c.is_zero()}


def _smul(a: Series, b: Series, N: int) -> Series:
    return _finish(_smul_into({}, a, b, N))


def _sadd(a: Series, b: Series) -> Series:
    out = dict(a)
    for e, c in b.items():
        out[e] = (out[e] + c).reduced() if e in out else c
    return {e: c for e, c in out.items() if not c.is_zero()}


@dataclass
class TruncatedSeries:
    params: Tuple[str, ...]
    shift: Dict[str, Polynomial]
    order: int
    coeffs: Dict[Tuple[int, ...], _Coef]
    F: Polynomial

    def constant_term(self) -> _Coef:
        return self.coeffs[tuple(0 for _ in self.params)]

    def to_dict(self) -> dict:
        terms = {}
        for e in sorted(self.coeffs, key=lambda e: (sum(e), tuple(-x for x in e))):
            terms[",".join(str(x) for x in e)] = str(self.coeffs[e])
        return {
            "params": list(self.params),
            "shift": {k: str(v) for k, v in self.shift.items()},
            "order": str(self.order),
            "terms": terms,
        }


def _expand(dec: ResolvedDecomposition) -> Tuple[Tuple[str, ...], List[Dict[Tuple[int, ...], Polynomial]]]:
    """b with series variables shifted, as coefficient lists of unit powers."""
    char = dec.b.char
    params = dec.others + (dec.dist,)
    shifted = substitute(dec.b, {v: dec.shift[v] + Polynomial.var(v, char) for v in dec.others})
    cols = coefficients_wrt(shifted, dec.unit)
    out = []
    for cj in cols:
        d: Dict[Tuple[int, ...], Polynomial] = {}
        for m, coef in cj.collect(params).items():
            dm = dict(m)
            d[tuple(dm.get(p, 0) for p in params)] = coef
        out.append(d)
    return params, out


def _nf(dec: ResolvedDecomposition):
    return dec.part.normal_form if dec.part is not None else None


def _vanishes(dec: ResolvedDecomposition, F: Polynomial, num: Polynomial) -> bool:
    # EQ need not be saturated by F: a numerator can survive the normal form
    # and still vanish wherever F and the ineq members are nonzero
    if num.is_zero():
        return True
    return dec.part is not None and dec.part.vanishes(F * num)


def _clean(dec: ResolvedDecomposition, F: Polynomial, residual: Series) -> Series:
    return {e: c for e, c in residual.items() if not _vanishes(dec, F, c.num)}


def _evaluate(P: List[Dict[Tuple[int, ...], Polynomial]], S: Series, F: Polynomial, N: int, nf=None) -> Series:
    """b(S) truncated at degree N, by Horner's rule in the unit."""
    total: Series = {}
    for Pj in reversed(P):
        if total:
            total = _smul(total, S, N)
        lifted = {e: _Coef(c, 0, F, nf) for e, c in Pj.items() if sum(e) <= N}
        total = _sadd(total, lifted)
    return total


def _graded(d: Dict[Tuple[int, ...], _Coef]) -> Dict[int, Series]:
    out: Dict[int, Series] = {}
    for e, c in d.items():
        out.setdefault(sum(e), {})[e] = c
    return out


def _conv(A: Dict[int, Series], B: Dict[int, Series], n: int) -> Series:
    """Degree-n part of A*B for graded series."""
    out: Series = {}
    for a, Aa in A.items():
        Bb = B.get(n - a)
        if Bb:
            _smul_into(out, Aa, Bb, n)
    return _finish(out)


def unit_series(dec: ResolvedDecomposition, N: int = 12, budget: Optional[int] = None) -> TruncatedSeries:
    """The unique unit s with b(s, ...) = 0 modulo total degree N+1, solved degree by degree.

    Coefficients live in F[a]/EQ localized at F: numerators are reduced modulo
    the part, so the final residual check is a check on the part.  With a
    budget, solving stops before the degree at which the numerators together
    exceed that many terms; the returned order says how far it got.
    """
    if N < 0:
        raise ValueError("order must be non-negative")
    F = dec.F if dec.F is not None else dec.f1
    if F.is_zero():
        raise ValueError("f1 vanishes at the point: not a unit")
    params, P = _expand(dec)
    nf = _nf(dec)
    zero = tuple(0 for _ in params)
    one = _Coef(Polynomial.const(1, F.char), 0, F)
    c0 = P[0].get(zero, Polynomial({}, F.char))
    S: Dict[int, Series] = {0: {zero: (-_Coef(c0, 0, F, nf)).div_F()}}
    PG = [_graded({e: _Coef(c, 0, F, nf) for e, c in Pj.items() if sum(e) <= N}) for Pj in P]
    m = len(P) - 1
    size = len(S[0][zero].num.terms)
    # pw[j][n]: degree-n part of S^j
    pw: List[Dict[int, Series]] = [{0: {zero: one}}]
    for j in range(1, m + 1):
        pw.append({0: _smul(pw[j - 1][0], S[0], 0)})
    for n in range(1, N + 1):
        for j in range(1, m + 1):
            # S_n is still zero here; its contribution j*S0^(j-1)*S_n is added after solving
            pw[j][n] = _conv(S, pw[j - 1], n)
        val: Series = {}
        for j in range(m + 1):
            val = _sadd(val, _conv(PG[j], pw[j], n))
        Sn = {e: (-c).div_F() for e, c in val.items()}
        Sn = {e: c for e, c in Sn.items() if not c.is_zero()}
        if budget is not None:
            size += sum(len(c.num.terms) for c in Sn.values())
            if size > budget:
                N = n - 1
                break
        S[n] = Sn
        if Sn:
            for j in range(1, m + 1):
                scale = _Coef(Polynomial.const(j, F.char), 0, F)
                lead = {e: c * scale for e, c in pw[j - 1][0].items()}
                pw[j][n] = _sadd(pw[j][n], _smul(lead, Sn, n))
    coeffs = {e: c for part in S.values() for e, c in part.items()}
    residual = _clean(dec, F, _evaluate(P, coeffs, F, N, nf))
    if residual:
        raise ArithmeticError("series check failed: b(s) does not vanish to the requested order")
    return TruncatedSeries(params, dict(dec.shift), N, coeffs, F)


def series_residual(dec: ResolvedDecomposition, s: TruncatedSeries, N: Optional[int] = None) -> Series:
    """b(s) truncated at degree N; empty means the check passes."""
    N = s.order if N is None else N
    _, P = _expand(dec)
    return _clean(dec, s.F, _evaluate(P, s.coeffs, s.F, N, _nf(dec)))


# ----------------------------------------------------------------- rewrite


@dataclass
class ResolvedRewrite:
    u0: str
    phi: Dict[str, RationalFunction]
    psi: Dict[str, RationalFunction]
    transformed: Polynomial
    identity_ok: bool
    linear_ok: bool

    def to_dict(self) -> dict:
        return {
            "u0": self.u0,
            "phi": {k: str(v) for k, v in self.phi.items()},
            "psi": {k: str(v) for k, v in self.psi.items()},
            "transformed": str(self.transformed),
            "identity": "pass" if self.identity_ok else "fail",
            "linear_mod_dist": "pass" if self.linear_ok else "fail",
        }


def resolved_rewrite(dec: ResolvedDecomposition, u0: Optional[str] = None) -> ResolvedRewrite:
    """psi(u0) = (f0 + x0 f1)/(x_d D), phi(x0) = (-f0 + x_d D u0)/f1, with both checks run."""
    char = dec.b.char
    u0 = u0 or f"{dec.unit}_r"
    x0 = Polynomial.var(dec.unit, char)
    xd = Polynomial.var(dec.dist, char)
    U = Polynomial.var(u0, char)
    m = len(dec.g) - 1
    psi = {u0: RationalFunction(dec.f0 + x0 * dec.f1, xd * dec.D)}
    phi = {dec.unit: RationalFunction(-dec.f0 + xd * dec.D * U, dec.f1)}
    inner = -dec.f0 + xd * dec.D * U
    T = dec.f1 ** m * U
    for j, gj in enumerate(dec.g):
        T = T + inner ** j * dec.f1 ** (m - j) * gj
    lhs = substitute_rational(dec.b, phi) * RationalFunction(dec.f1 ** m)
    identity_ok = lhs == RationalFunction(xd * dec.D * T)
    T0 = substitute(T, {dec.dist: Polynomial({}, char)})
    linear_ok = T0.degree(u0) == 1
    return ResolvedRewrite(u0, phi, psi, T, identity_ok, linear_ok)
