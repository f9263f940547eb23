"""EQ/INEQ constraint sets on generic coordinates, backed by a small Buchberger engine.

Groebner bases use graded lex order with variables ranked by their natural
name order.  Internally polynomials are dicts from dense exponent tuples to
coefficients over one fixed variable list.
"""

from __future__ import annotations

import heapq
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .poly import Monomial, Polynomial, var_key
from .scalars import Scalar

Dense = Dict[Tuple[int, ...], Scalar]


def _key(e: Tuple[int, ...]):
    return (sum(e), e)


def _lead(p: Dense) -> Tuple[int, ...]:
    return max(p, key=_key)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _to_dense(f: Polynomial, vs: Sequence[str]) -> Dense:
    idx = {v: i for i, v in enumerate(vs)}
    out: Dense = {}
    for m, c in f.terms.items():
        e = [0] * len(vs)
        for v, k in m:
            e[idx[v]] = k
        out[tuple(e)] = c
    return out


def _from_dense(p: Dense, vs: Sequence[str], char: int) -> Polynomial:
    terms = {}
    for e, c in p.items():
        terms[tuple((v, k) for v, k in zip(vs, e) if k)] = c
    return Polynomial._raw(terms, char)


def _monic(p: Dense) -> Dense:
    lc = p[_lead(p)]
    if lc == 1:
        return p
    inv = 1 / lc
    return {e: c * inv for e, c in p.items()}


def _sub_mul(p: Dense, g: Dense, shift, coef, fresh: Optional[list] = None) -> None:
    """p -= coef * x^shift * g, in place; newly created exponents go to `fresh`."""
    for e, c in g.items():
        k = tuple(a + b for a, b in zip(e, shift))
        v = p.get(k)
        if v is None:
            p[k] = -coef * c
            if fresh is not None:
                fresh.append(k)
        else:
            v = v - coef * c
            if v:
                p[k] = v
            else:
                del p[k]


def _hkey(e: Tuple[int, ...]):
    return (-sum(e), tuple(-x for x in e))


def _reduce(f: Dense, basis: List[Tuple[Tuple[int, ...], Dense]]) -> Dense:
    """Full reduction of f by (leading exponent, monic polynomial) pairs."""
    p = dict(f)
    heap = [(_hkey(e), e) for e in p]
    heapq.heapify(heap)
    rem: Dense = {}
    fresh: list = []
    while heap:
        _, m = heapq.heappop(heap)
        c = p.get(m)
        if c is None:
            continue
        for lt, g in basis:
            if _divides(lt, m):
                _sub_mul(p, g, tuple(a - b for a, b in zip(m, lt)), c, fresh)
                for k in fresh:
                    heapq.heappush(heap, (_hkey(k), k))
                fresh.clear()
                break
        else:
            rem[m] = c
            del p[m]
    return rem


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _buchberger(old: List[Dense], new: List[Dense]) -> List[Dense]:
    """Groebner basis of old + new, where old is already a Groebner basis."""
    G: List[Dense] = [_monic(g) for g in old if g]
    lts = [_lead(g) for g in G]
    # heap of (key of lcm of leading terms, i, j): normal selection strategy
    pairs: list = []

    def add(g: Dense) -> None:
        g = _monic(g)
        G.append(g)
        lt = _lead(g)
        lts.append(lt)
        j = len(G) - 1
        for i in range(j):
            heapq.heappush(pairs, (_key(_lcm(lts[i], lt)), i, j))

    for f in new:
        r = _reduce(f, list(zip(lts, G)))
        if r:
            add(r)
            if not any(lts[-1]):
                return [G[-1]]
    done = set()
    while pairs:
        _, i, j = heapq.heappop(pairs)
        done.add((i, j))
        a, b = lts[i], lts[j]
        L = _lcm(a, b)
        if all(x == 0 or y == 0 for x, y in zip(a, b)):
            continue
        if any(
            k not in (i, j)
            and _divides(lts[k], L)
            and (min(i, k), max(i, k)) in done
            and (min(j, k), max(j, k)) in done
            for k in range(len(G))
        ):
            continue
        s: Dense = {}
        _sub_mul(s, G[i], tuple(x - y for x, y in zip(L, a)), -1)
        _sub_mul(s, G[j], tuple(x - y for x, y in zip(L, b)), 1)
        r = _reduce(s, list(zip(lts, G)))
        if r:
            add(r)
            if not any(lts[-1]):
                return [G[-1]]
    return _interreduce(G)


def _interreduce(G: List[Dense]) -> List[Dense]:
    G = sorted(G, key=lambda g: _key(_lead(g)))
    keep: List[Dense] = []
    for g in G:
        lt = _lead(g)
        if not any(_divides(_lead(h), lt) for h in keep):
            keep.append(g)
    out = []
    for i, g in enumerate(keep):
        others = [(_lead(h), h) for j, h in enumerate(keep) if j != i]
        lt = _lead(g)
        tail = {e: c for e, c in g.items() if e != lt}
        r = _reduce(tail, others)
        r[lt] = g[lt]
        out.append(_monic(r))
    return sorted(out, key=lambda g: _key(_lead(g)))


def groebner_basis(polys: Iterable[Polynomial], char: int = 0) -> List[Polynomial]:
    """Reduced graded-lex Groebner basis."""
    polys = [p for p in polys if not p.is_zero()]
    vs = sorted({v for p in polys for v in p.variables()}, key=var_key)
    dense = [_to_dense(p, vs) for p in polys]
    G = _buchberger([], dense)
    return [_from_dense(g, vs, char) for g in G]


def _tidy(r: Polynomial) -> Polynomial:
    """Monic, and a monomial is replaced by the product of its variables."""
    if r.is_monomial():
        m, _ = r.leading()
        return Polynomial.monomial(tuple((v, 1) for v, _ in m), 1, r.char)
    return r / r.leading()[1]


_RADICAL_CACHE: Dict[Tuple[Tuple[Polynomial, ...], Polynomial], bool] = {}


def in_radical(g: Polynomial, basis: Sequence[Polynomial], char: int = 0) -> bool:
    """g in rad<basis>, decided by 1 in <basis, 1 - z g>."""
    if not basis:
        return g.is_constant() and g.is_zero()
    key = (tuple(basis), g)
    if key not in _RADICAL_CACHE:
        z = Polynomial.var("_z", char)
        G = groebner_basis(list(basis) + [1 - z * g], char)
        _RADICAL_CACHE[key] = len(G) == 1 and G[0].is_constant()
    return _RADICAL_CACHE[key]


class ConstraintSet:
    """A part of the generic-point space: eq generators vanish, ineq members do not.

    The reduced Groebner basis of eq is computed at construction.
    """

    __slots__ = ("eq", "ineq", "char", "basis", "_vars", "_dense", "_nf_cache", "empty")

    def __init__(
        self,
        eq: Sequence[Polynomial] = (),
        ineq: Sequence[Polynomial] = (),
        char: int = 0,
        _prior: Optional["ConstraintSet"] = None,
    ):
        self.char = char
        gens: List[Polynomial] = []
        for g in eq:
            if not g.is_zero() and g not in gens:
                gens.append(g)
        self.eq = tuple(gens)
        if _prior is not None:
            old = list(_prior.basis)
            new = [g for g in gens if g not in _prior.eq]
        else:
            old, new = [], gens
        vs = sorted({v for p in old + new for v in p.variables()}, key=var_key)
        G = _buchberger([_to_dense(p, vs) for p in old], [_to_dense(p, vs) for p in new])
        self.basis = tuple(_from_dense(g, vs, char) for g in G)
        self._vars = tuple(vs)
        self._dense = [(_lead(g), g) for g in G]
        self._nf_cache: Dict[Polynomial, Polynomial] = {}
        self.empty = self.contains_one()
        self.ineq = ()
        self._add_ineq(ineq)

    def __reduce__(self):
        return (ConstraintSet, (self.eq, self.ineq, self.char))

    def contains_one(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def normal_form(self, f: Polynomial) -> Polynomial:
        if f in self._nf_cache:
            return self._nf_cache[f]
        if not self.basis or f.is_zero():
            out = f
        elif self.contains_one():
            out = Polynomial({}, f.char)
        else:
            vset = set(self._vars)
            extra = [v for v in f.variables() if v not in vset]
            if not extra:
                out = _from_dense(_reduce(_to_dense(f, self._vars), self._dense), self._vars, f.char)
            else:
                out = Polynomial({}, f.char)
                for m, c in f.collect(extra).items():
                    r = _from_dense(_reduce(_to_dense(c, self._vars), self._dense), self._vars, f.char)
                    out = out + r.mul_term(m)
        self._nf_cache[f] = out
        return out

    def is_zero(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()

    def vanishes(self, f: Polynomial) -> bool:
        """f is zero at every point of the part (EQ holds, no ineq member vanishes).

        Weaker than is_zero when EQ is not saturated by the ineq members.
        """
        r = self.normal_form(f)
        if r.is_zero() or self.empty:
            return True
        w = r
        for g in self.ineq:
            w = w * g
        return in_radical(w, self.basis, self.char)

    def with_eq(self, *fs: Polynomial) -> "ConstraintSet":
        return ConstraintSet(self.eq + tuple(fs), self.ineq, self.char, _prior=self)

    def with_ineq(self, *fs: Polynomial) -> "ConstraintSet":
        c = ConstraintSet.__new__(ConstraintSet)
        c.char, c.eq, c.basis = self.char, self.eq, self.basis
        c._vars, c._dense, c._nf_cache = self._vars, self._dense, dict(self._nf_cache)
        c.empty = self.empty
        c.ineq = self.ineq
        c._add_ineq(fs)
        return c

    def _add_ineq(self, fs: Iterable[Polynomial]) -> None:
        kept = list(self.ineq)
        for f in fs:
            r = self.normal_form(f)
            if r.is_zero():
                self.empty = True
                continue
            if r.is_constant():
                continue
            r = _tidy(r)
            if r in kept:
                continue
            if in_radical(r, self.basis, self.char):
                self.empty = True
            kept.append(r)
        self.ineq = tuple(kept)

    def split(self, f: Polynomial) -> Tuple[Optional["ConstraintSet"], Optional["ConstraintSet"]]:
        """(part where f = 0, part where f != 0); an empty side is None."""
        r = self.normal_form(f)
        if r.is_zero():
            return (self, None)
        if r.is_constant():
            return (None, self)
        zero = self.with_eq(r)
        nonzero = self.with_ineq(r)
        return (None if zero.empty else zero, None if nonzero.empty else nonzero)

    def nonvanishing(self, f: Polynomial) -> bool:
        """f has no zero on this part (adding f = 0 makes it empty)."""
        r = self.normal_form(f)
        if r.is_zero():
            return False
        if r.is_constant():
            return True
        return self.with_eq(r).empty

    def is_empty_strict(self) -> bool:
        """Emptiness via 1 in <eq, 1 - z * prod(ineq)>; slower but exact over the closure."""
        if self.empty:
            return True
        prod = Polynomial.const(1, self.char)
        for g in self.ineq:
            prod = prod * g
        z = Polynomial.var("_z", self.char)
        G = groebner_basis(list(self.basis) + [1 - z * prod], self.char)
        return len(G) == 1 and G[0].is_constant()

    def describe(self) -> Dict[str, List[str]]:
        return {"eq": [str(g) for g in self.basis], "ineq": [str(g) for g in self.ineq]}

    def __repr__(self):
        return f"ConstraintSet(eq={[str(g) for g in self.basis]}, ineq={[str(g) for g in self.ineq]})"


def normal_form(f: Polynomial, c: ConstraintSet) -> Polynomial:
    return c.normal_form(f)


def split(c: ConstraintSet, f: Polynomial):
    return c.split(f)
