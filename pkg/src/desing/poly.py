"""Sparse multivariate Laurent polynomials over Q or F_p.

A monomial is a tuple of (variable, exponent) pairs sorted by the natural
order of variable names, with zero exponents omitted.  Polynomials built from
different variable sets combine freely; only the characteristic has to agree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from gmpy2 import mpq

from .scalars import Field, ModP, Rational, Scalar, format_scalar, is_negative

Monomial = Tuple[Tuple[str, int], ...]
ONE: Monomial = ()


@lru_cache(maxsize=None)
def var_key(name: str) -> tuple:
    """Natural sort key: digit runs compare as integers (x2 < x10)."""
    parts = re.split(r"(\d+)", name)
    return tuple(int(p) if i % 2 else p for i, p in enumerate(parts))


def _norm(d: Dict[str, int]) -> Monomial:
    return tuple(sorted(((v, e) for v, e in d.items() if e), key=lambda t: var_key(t[0])))


def mono(**exps: int) -> Monomial:
    return _norm(exps)


def mono_from(pairs: Iterable[Tuple[str, int]]) -> Monomial:
    d: Dict[str, int] = {}
    for v, e in pairs:
        d[v] = d.get(v, 0) + e
    return _norm(d)


@lru_cache(maxsize=1 << 16)
def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return _norm(d)


def mono_pow(a: Monomial, k: int) -> Monomial:
    if k == 0:
        return ONE
    return tuple((v, e * k) for v, e in a)


def mono_inv(a: Monomial) -> Monomial:
    return tuple((v, -e) for v, e in a)


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """a | b for monomials with non-negative exponents."""
    db = dict(b)
    return all(db.get(v, 0) >= e for v, e in a)


def mono_degree(a: Monomial) -> int:
    return sum(e for _, e in a)


def mono_exp(a: Monomial, v: str) -> int:
    for w, e in a:
        if w == v:
            return e
    return 0


def display_key(a: Monomial) -> tuple:
    """Smaller total degree first, then lexicographic with earlier variables heavier."""
    return (mono_degree(a), tuple((var_key(v), -e) for v, e in a))


def grlex_key(a: Monomial) -> tuple:
    """Sorting by this key puts the graded-lex largest monomial first."""
    return (-mono_degree(a), tuple((var_key(v), -e) for v, e in a))


def format_monomial(a: Monomial) -> str:
    out = []
    for v, e in a:
        out.append(v if e == 1 else f"{v}^{e}")
    return "*".join(out)


Number = Union[int, Fraction, Rational, ModP]


class Polynomial:
    __slots__ = ("terms", "char", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Number]] = None, char: int = 0):
        fld = Field(char) if char else None
        clean: Dict[Monomial, Scalar] = {}
        for m, c in (terms or {}).items():
            if fld:
                c = fld(c)
            elif isinstance(c, ModP):
                raise ValueError("mixed characteristics")
            elif not isinstance(c, Rational):
                c = mpq(c)
            if c:
                m = _norm(dict(m)) if m else ONE
                if m in clean:
                    c = clean[m] + c
                    if not c:
                        del clean[m]
                        continue
                clean[m] = c
        self.terms = clean
        self.char = char
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Scalar], char: int) -> "Polynomial":
        p = cls.__new__(cls)
        p.terms = terms
        p.char = char
        p._hash = None
        return p

    @classmethod
    def var(cls, name: str, char: int = 0) -> "Polynomial":
        return cls({((name, 1),): 1}, char)

    @classmethod
    def const(cls, c: Number, char: int = 0) -> "Polynomial":
        return cls({ONE: c}, char)

    @classmethod
    def monomial(cls, m: Monomial, c: Number = 1, char: int = 0) -> "Polynomial":
        return cls({m: c}, char)

    def field(self) -> Field:
        return Field(self.char)

    def scalar(self, c: Number) -> Scalar:
        return Field(self.char)(c)

    # queries

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_term(self) -> Scalar:
        return self.terms.get(ONE, self.scalar(0))

    def coefficient(self, m: Monomial) -> Scalar:
        return self.terms.get(m, self.scalar(0))

    def variables(self) -> Tuple[str, ...]:
        vs = {v for m in self.terms for v, _ in m}
        return tuple(sorted(vs, key=var_key))

    def degree(self, v: Optional[str] = None) -> int:
        if v is None:
            return max((mono_degree(m) for m in self.terms), default=0)
        return max((mono_exp(m, v) for m in self.terms), default=0)

    def min_degree(self, v: str) -> int:
        return min((mono_exp(m, v) for m in self.terms), default=0)

    def is_laurent(self) -> bool:
        return any(e < 0 for m in self.terms for _, e in m)

    def support(self) -> List[Monomial]:
        return sorted(self.terms, key=display_key)

    def items(self) -> List[Tuple[Monomial, Scalar]]:
        return [(m, self.terms[m]) for m in self.support()]

    def leading(self) -> Tuple[Monomial, Scalar]:
        m = min(self.terms, key=grlex_key)
        return m, self.terms[m]

    # arithmetic

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.char != self.char:
                raise ValueError(f"ring mismatch: characteristic {self.char} vs {other.char}")
            return other
        if isinstance(other, (int, Fraction, Rational, ModP)):
            return Polynomial.const(other, self.char)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if len(o.terms) > len(self.terms):
            big, small = o.terms, self.terms
        else:
            big, small = self.terms, o.terms
        out = dict(big)
        for m, c in small.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial._raw(out, self.char)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self.terms.items()}, self.char)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out: Dict[Monomial, Scalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = mono_mul(m1, m2)
                c = c1 * c2
                s = out.get(m)
                if s is None:
                    out[m] = c
                else:
                    out[m] = s + c
        return Polynomial._raw({m: c for m, c in out.items() if c}, self.char)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if other.is_monomial():
                m, c = other.leading()
                return self.mul_term(mono_inv(m), 1 / c)
            q = exact_divide(self, other)
            if q is None:
                raise ValueError("inexact polynomial division")
            return q
        c = self.scalar(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        inv = 1 / c
        return Polynomial._raw({m: v * inv for m, v in self.terms.items()}, self.char)

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative power of a non-monomial")
            m, c = self.leading()
            return Polynomial._raw({mono_pow(m, k): c ** k}, self.char)
        result = Polynomial.const(1, self.char)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_term(self, m: Monomial, c: Number = 1) -> "Polynomial":
        c = self.scalar(c)
        return Polynomial._raw({mono_mul(k, m): v * c for k, v in self.terms.items() if v * c}, self.char)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.char == other.char and self.terms == other.terms
        if isinstance(other, (int, Fraction, Rational, ModP)):
            return self == Polynomial.const(other, self.char)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.char, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r}, char={self.char})"

    def __reduce__(self):
        return (Polynomial._raw, (self.terms, self.char))

    # structure

    def collect(self, vs: Iterable[str]) -> Dict[Monomial, "Polynomial"]:
        """Group by the monomial in `vs`; values are polynomials in the other variables."""
        vset = set(vs)
        groups: Dict[Monomial, Dict[Monomial, Scalar]] = {}
        for m, c in self.terms.items():
            inner = tuple(p for p in m if p[0] in vset)
            outer = tuple(p for p in m if p[0] not in vset)
            groups.setdefault(inner, {})[outer] = c
        return {k: Polynomial._raw(v, self.char) for k, v in groups.items()}

    def rename(self, mapping: Mapping[str, str]) -> "Polynomial":
        out: Dict[Monomial, Scalar] = {}
        for m, c in self.terms.items():
            out[mono_from((mapping.get(v, v), e) for v, e in m)] = c
        return Polynomial._raw(out, self.char)

    def truncate(self, vs: Sequence[str], n: int) -> "Polynomial":
        """Drop terms whose total degree in `vs` exceeds n."""
        vset = set(vs)
        return Polynomial._raw(
            {m: c for m, c in self.terms.items() if sum(e for v, e in m if v in vset) <= n},
            self.char,
        )


def format_polynomial(f: Polynomial) -> str:
    if f.is_zero():
        return "0"
    out: List[str] = []
    for i, (m, c) in enumerate(f.items()):
        neg = is_negative(c)
        mag = -c if neg else c
        ms = format_monomial(m)
        if not ms:
            body = format_scalar(mag)
        elif mag == 1:
            body = ms
        else:
            body = f"{format_scalar(mag)}*{ms}"
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


# ---------------------------------------------------------------- substitution

Image = Union[Polynomial, "RationalFunction"]


def _power_table(images: Mapping[str, Polynomial]):
    cache: Dict[Tuple[str, int], Polynomial] = {}

    def power(v: str, e: int) -> Polynomial:
        key = (v, e)
        if key not in cache:
            img = images[v]
            if e < 0:
                if not img.is_monomial():
                    raise ValueError(f"negative power of non-monomial image of {v}")
                cache[key] = img ** e
            elif e == 1:
                cache[key] = img
            elif e % 2 == 0:
                h = power(v, e // 2)
                cache[key] = h * h
            else:
                cache[key] = power(v, e - 1) * img
        return cache[key]

    return power


def substitute(f: Polynomial, images: Mapping[str, Image]) -> Polynomial:
    """Replace variables by polynomial images; unmapped variables stay put.

    Negative exponents are allowed when the corresponding image is a single term.
    """
    imgs: Dict[str, Polynomial] = {}
    for v, img in images.items():
        if isinstance(img, RationalFunction):
            img = img.as_polynomial()
        imgs[v] = f._coerce(img)
    power = _power_table(imgs)
    acc: Dict[Monomial, Scalar] = {}
    for m, c in f.terms.items():
        kept = tuple(p for p in m if p[0] not in imgs)
        term = Polynomial._raw({kept: c}, f.char)
        for v, e in m:
            if v in imgs:
                term = term * power(v, e)
        for k, val in term.terms.items():
            s = acc.get(k)
            acc[k] = val if s is None else s + val
    return Polynomial._raw({m: c for m, c in acc.items() if c}, f.char)


def monomial_content(f: Polynomial, vs: Optional[Iterable[str]] = None) -> Tuple[Monomial, Polynomial]:
    """Split f = m * g with g free of common monomial factors in `vs` (default all)."""
    if f.is_zero():
        raise ValueError("monomial content of the zero polynomial")
    names = f.variables() if vs is None else tuple(vs)
    low = {v: min(mono_exp(m, v) for m in f.terms) for v in names}
    m = _norm(low)
    g = f.mul_term(mono_inv(m)) if m else f
    return m, g


def coefficients_wrt(f: Polynomial, v: str) -> List[Polynomial]:
    """[c_0, ..., c_deg] with f = sum_j c_j v^j."""
    if f.min_degree(v) < 0:
        raise ValueError(f"{v} occurs with a negative exponent")
    n = f.degree(v)
    parts: List[Dict[Monomial, Scalar]] = [dict() for _ in range(n + 1)]
    for m, c in f.terms.items():
        e = mono_exp(m, v)
        parts[e][tuple(p for p in m if p[0] != v)] = c
    return [Polynomial._raw(p, f.char) for p in parts]


def from_coefficients(cs: Sequence[Polynomial], v: str, char: int = 0) -> Polynomial:
    out = Polynomial({}, char)
    for j, c in enumerate(cs):
        out = out + c.mul_term(((v, j),) if j else ONE)
    return out


def pth_power_decompose(f: Polynomial, p: Optional[int] = None) -> Optional[Polynomial]:
    """g with g^p = f in characteristic p, or None when f is not a p-th power."""
    p = f.char if p is None else p
    if p == 0 or f.char != p:
        raise ValueError("p-th roots need characteristic p")
    out: Dict[Monomial, Scalar] = {}
    for m, c in f.terms.items():
        if any(e % p for _, e in m):
            return None
        out[tuple((v, e // p) for v, e in m)] = c
    return Polynomial._raw(out, f.char)


def exact_divide(f: Polynomial, g: Polynomial) -> Optional[Polynomial]:
    """f / g when g divides f exactly (non-Laurent inputs), else None."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero():
        return Polynomial({}, f.char)
    lm, lc = g.leading()
    inv = 1 / lc
    q: Dict[Monomial, Scalar] = {}
    r = f
    while not r.is_zero():
        rm, rc = r.leading()
        if not mono_divides(lm, rm):
            return None
        t = mono_mul(rm, mono_inv(lm))
        c = rc * inv
        q[t] = c
        r = r - g.mul_term(t, c)
    return Polynomial._raw(q, f.char)


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic-normalized polynomial gcd (delegates to sympy)."""
    import sympy

    vs = sorted(set(f.variables()) | set(g.variables()), key=var_key)
    if not vs:
        return Polynomial.const(1, f.char)
    syms = sympy.symbols(vs)
    dom = sympy.GF(f.char) if f.char else sympy.QQ

    def to_sym(p: Polynomial):
        terms = {}
        for m, c in p.terms.items():
            d = dict(m)
            key = tuple(d.get(v, 0) for v in vs)
            terms[key] = dom.convert(c.value if isinstance(c, ModP) else c)
        return sympy.Poly.from_dict(terms, *syms, domain=dom)

    h = sympy.gcd(to_sym(f), to_sym(g))
    out: Dict[Monomial, Scalar] = {}
    for key, c in h.as_dict().items():
        val = int(c) % f.char if f.char else mpq(int(c.numerator), int(c.denominator))
        out[_norm(dict(zip(vs, key)))] = val
    res = Polynomial(out, f.char)
    if res.is_zero():
        return Polynomial.const(1, f.char)
    return res / res.leading()[1]


# -------------------------------------------------------- rational functions


class RationalFunction:
    """num/den with a canonical monomial-cleared, monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Optional[Polynomial] = None):
        if den is None:
            den = Polynomial.const(1, num.char)
        den = num._coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = num, Polynomial.const(1, num.char)
            return
        if den.is_monomial():
            m, c = den.leading()
            self.num = num.mul_term(mono_inv(m), 1 / c)
            self.den = Polynomial.const(1, num.char)
            return
        nm, ng = monomial_content(num)
        dm, dg = monomial_content(den)
        q = mono_mul(nm, mono_inv(dm))
        lc = dg.leading()[1]
        self.num = ng.mul_term(tuple(p for p in q if p[1] > 0), 1 / lc)
        self.den = (dg / lc).mul_term(tuple((v, -e) for v, e in q if e < 0))
        g = exact_divide(self.num, self.den)
        if g is not None:
            self.num, self.den = g, Polynomial.const(1, num.char)

    @property
    def char(self) -> int:
        return self.num.char

    def is_polynomial(self) -> bool:
        return self.den == 1

    def as_polynomial(self) -> Polynomial:
        if not self.is_polynomial():
            raise ValueError("not a (Laurent) polynomial")
        return self.num

    def _c(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        return RationalFunction(Polynomial.const(other, self.char))

    def __add__(self, other):
        o = self._c(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._c(other))

    def __rsub__(self, other):
        return self._c(other) - self

    def __mul__(self, other):
        o = self._c(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._c(other)
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._c(other) / self

    def __pow__(self, k: int):
        if k >= 0:
            return RationalFunction(self.num ** k, self.den ** k)
        return RationalFunction(self.den ** (-k), self.num ** (-k))

    def __eq__(self, other):
        o = self._c(other)
        return (self.num * o.den - o.num * self.den).is_zero()

    __hash__ = None

    def __str__(self):
        if self.is_polynomial():
            return str(self.num)
        n = str(self.num)
        if len(self.num.terms) > 1:
            n = f"({n})"
        return f"{n}/({self.den})"

    __repr__ = __str__

    def substitute(self, images: Mapping[str, Image]) -> "RationalFunction":
        return substitute_rational(self.num, images) / substitute_rational(self.den, images)


def substitute_rational(f: Polynomial, images: Mapping[str, Image]) -> RationalFunction:
    """Substitution with rational images, using one common denominator."""
    imgs: Dict[str, RationalFunction] = {}
    for v, img in images.items():
        imgs[v] = img if isinstance(img, RationalFunction) else RationalFunction(f._coerce(img))
    if all(r.is_polynomial() for r in imgs.values()):
        try:
            return RationalFunction(substitute(f, {v: r.num for v, r in imgs.items()}))
        except ValueError:
            pass
    hi = {v: max(0, f.degree(v)) for v in imgs}
    lo = {v: max(0, -f.min_degree(v)) for v in imgs}
    numer: Dict[str, Polynomial] = {v: r.num for v, r in imgs.items()}
    denom: Dict[str, Polynomial] = {v: r.den for v, r in imgs.items()}
    cache: Dict[Tuple[str, str, int], Polynomial] = {}

    def pw(kind: str, v: str, e: int) -> Polynomial:
        key = (kind, v, e)
        if key not in cache:
            base = numer[v] if kind == "n" else denom[v]
            cache[key] = base ** e
        return cache[key]

    total = Polynomial({}, f.char)
    for m, c in f.terms.items():
        kept = tuple(p for p in m if p[0] not in imgs)
        term = Polynomial._raw({kept: c}, f.char)
        used = dict(m)
        for v in imgs:
            e = used.get(v, 0)
            if e >= 0:
                term = term * pw("n", v, e + lo[v]) * pw("d", v, hi[v] - e)
            else:
                term = term * pw("d", v, -e + hi[v]) * pw("n", v, lo[v] + e)
        total = total + term
    den = Polynomial.const(1, f.char)
    for v in imgs:
        den = den * pw("d", v, hi[v]) * pw("n", v, lo[v])
    return RationalFunction(total, den)


# ------------------------------------------------------ monomial substitution


@dataclass(frozen=True)
class MonomialSubstitution:
    """x_i -> t_i + prod_j y_j^{E[i][j]} for source x and target y."""

    source: Tuple[str, ...]
    target: Tuple[str, ...]
    matrix: Tuple[Tuple[int, ...], ...]
    translation: Tuple[Polynomial, ...] = field(default=())
    char: int = 0

    def images(self) -> Dict[str, Polynomial]:
        out = {}
        for i, x in enumerate(self.source):
            m = mono_from(zip(self.target, self.matrix[i]))
            img = Polynomial.monomial(m, 1, self.char)
            if self.translation:
                img = img + self.translation[i]
            out[x] = img
        return out

    def apply(self, f: Polynomial) -> Polynomial:
        return substitute(f, self.images())
