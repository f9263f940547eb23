"""Multi-homogenization and the 2^(d+1) affine charts below the root."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .constraints import ConstraintSet
from .localize import generic_name
from .poly import Monomial, Polynomial, RationalFunction, monomial_content, substitute


@dataclass(frozen=True)
class ChartIndex:
    K: int
    n: int

    def __post_init__(self):
        if not 0 <= self.K < 2 ** self.n:
            raise ValueError(f"chart index {self.K} out of range for {self.n} variables")

    @property
    def bits(self) -> Tuple[int, ...]:
        return tuple((self.K >> j) & 1 for j in range(self.n))


def multi_homogenize(b: Polynomial, variables: Optional[Sequence[str]] = None) -> Polynomial:
    """b* in g_j, h_j: x_j -> g_j/h_j, cleared by prod h_j^deg_j(b)."""
    vs = tuple(variables) if variables is not None else b.variables()
    degs = [b.degree(v) for v in vs]
    out: Dict[Monomial, object] = {}
    for m, c in b.terms.items():
        e = dict(m)
        pairs = []
        for j, v in enumerate(vs):
            k = e.get(v, 0)
            pairs += [(f"g{j}", k), (f"h{j}", degs[j] - k)]
        pairs += [(v, k) for v, k in m if v not in vs]
        out[tuple(pairs)] = c
    return Polynomial(out, b.char)


@dataclass
class Chart:
    index: ChartIndex
    node_id: str
    vars: Tuple[str, ...]
    b: Polynomial
    factor: Monomial
    constraints: ConstraintSet
    phi: Dict[str, RationalFunction]
    psi: Dict[str, RationalFunction]
    empty: bool
    witness: Optional[str] = None


def chart_var(node_id: str, j: int) -> str:
    return f"x{node_id}_{j}"


def chart(b: Polynomial, K: ChartIndex, variables: Sequence[str], node_id: Optional[str] = None) -> Chart:
    vs = tuple(variables)
    node_id = str(K.K) if node_id is None else node_id
    new = tuple(chart_var(node_id, j) for j in range(len(vs)))
    bits = K.bits
    char = b.char
    phi = {}
    psi = {}
    for j, v in enumerate(vs):
        s = -1 if bits[j] else 1
        phi[v] = RationalFunction(Polynomial.var(new[j], char) ** s)
        psi[new[j]] = RationalFunction(Polynomial.var(v, char) ** s)
    image = substitute(b, {v: r.num for v, r in phi.items()})
    factor, bK = monomial_content(image, new)
    eq: List[Polynomial] = []
    coords = {x: Polynomial.var(generic_name(x), char) for x in new}
    for j, x in enumerate(new):
        if bits[j]:
            eq.append(coords[x])
    at_infinity = ConstraintSet(eq, (), char)
    const = at_infinity.normal_form(substitute(bK, coords))
    c = at_infinity.with_eq(substitute(bK, coords))
    witness = None
    if c.empty:
        if const.is_constant() and not const.is_zero():
            fixed = ", ".join(f"{generic_name(x)} = 0" for j, x in enumerate(new) if bits[j])
            witness = f"b_{node_id}(a) reduces to the nonzero constant {const} when {fixed}"
        else:
            witness = "1 lies in the EQ ideal"
    return Chart(K, node_id, new, bK, factor, c, phi, psi, c.empty, witness)


def all_charts(b: Polynomial, variables: Sequence[str], ids: Optional[Sequence[str]] = None) -> List[Chart]:
    n = len(variables)
    ids = [str(K) for K in range(2 ** n)] if ids is None else list(ids)
    return [chart(b, ChartIndex(K, n), variables, ids[K]) for K in range(2 ** n)]
