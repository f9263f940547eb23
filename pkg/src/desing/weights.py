"""Weight sequences, unimodular completion, and the monomial arc maps built from them."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .constraints import ConstraintSet
from .localize import Exps, generic_name, minimal_elements
from .poly import (
    Monomial,
    Polynomial,
    RationalFunction,
    mono_from,
    monomial_content,
    substitute,
    substitute_rational,
)

DEFAULT_BOUND = 16


@dataclass(frozen=True, order=True)
class WeightSequence:
    w: Tuple[int, ...]
    value: int = 0

    def __iter__(self):
        return iter(self.w)


def _vgcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def is_weight_sequence(w: Sequence[int], support: Iterable[Exps]) -> bool:
    """Non-negative w on which at least two minimal support monomials tie for the minimum."""
    mins = minimal_elements(support)
    if len(mins) < 2 or any(x < 0 for x in w):
        return False
    vals = [sum(a * b for a, b in zip(w, e)) for e in mins]
    low = min(vals)
    return vals.count(low) >= 2


def weight_bound(support: Iterable[Exps]) -> int:
    top = max((x for e in support for x in e), default=0)
    return max(DEFAULT_BOUND, 2 * top)


def newton_edge_normals(support: Iterable[Exps]) -> List[Tuple[int, int]]:
    """Primitive inner normals of the compact edges of a 2-variable Newton polygon."""
    pts = sorted(minimal_elements(support))
    hull: List[Exps] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            cross = (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1)
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    out = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        dx, dy = x2 - x1, y1 - y2
        g = gcd(dx, dy)
        out.append((dy // g, dx // g))
    return out


def _box(upper: Sequence[int], lower: int = 0) -> np.ndarray:
    axes = [np.arange(lower, u + 1, dtype=np.int64) for u in upper]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _tie_mask(V: np.ndarray, mins: Sequence[Exps]) -> np.ndarray:
    E = np.array(mins, dtype=np.int64)
    vals = V @ E.T
    low = vals.min(axis=1, keepdims=True)
    return (vals == low).sum(axis=1) >= 2


def valid_weight_sequences(support: Iterable[Exps], bound: Optional[int] = None) -> List[WeightSequence]:
    """All primitive positive weight sequences (exact polygon normals in two variables)."""
    support = list(support)
    if len(set(support)) < 2:
        raise ValueError("a weight sequence needs at least two support monomials")
    n = len(support[0])
    mins = minimal_elements(support)
    if len(mins) < 2:
        return []
    if n == 2:
        ws = newton_edge_normals(mins)
    else:
        bound = weight_bound(support) if bound is None else bound
        V = _box([bound] * n, lower=1)
        V = V[_tie_mask(V, mins)]
        ws = [tuple(int(x) for x in row) for row in V if _vgcd(row) == 1]
    out = []
    for w in sorted(set(ws)):
        val = min(sum(a * b for a, b in zip(w, e)) for e in mins)
        out.append(WeightSequence(tuple(w), val))
    return out


def minimal_weight_sequences(cands: Iterable[WeightSequence], support: Iterable[Exps]) -> List[WeightSequence]:
    """Drop every candidate that is a sum of two nonzero non-negative weight sequences."""
    cands = sorted(set(cands))
    if not cands:
        return []
    mins = minimal_elements(support)
    n = len(cands[0].w)
    top = [max(c.w[i] for c in cands) for i in range(n)]
    V = _box(top)
    valid = _tie_mask(V, mins)
    valid[0] = False
    radix = np.array([int(np.prod([t + 1 for t in top[i + 1:]])) for i in range(n)], dtype=np.int64)
    keep = []
    for c in cands:
        w = np.array(c.w, dtype=np.int64)
        below = valid & np.all(V <= w, axis=1)
        W1 = V[below]
        W2 = w - W1
        nz = W2.any(axis=1)
        idx = W2[nz] @ radix
        if not valid[idx].any():
            keep.append(c)
    return keep


# ----------------------------------------------------------- unimodular maps


@dataclass(frozen=True)
class UnimodularMap:
    matrix: Tuple[Tuple[int, ...], ...]
    inverse: Tuple[Tuple[int, ...], ...]
    column: int
    D: int = 1

    @property
    def size(self) -> int:
        return len(self.matrix)

    def det(self) -> int:
        return int(round(np.linalg.det(np.array(self.matrix, dtype=float)))) if self.size else 1

    def exact_det(self) -> int:
        return _int_det([list(r) for r in self.matrix])


def _int_det(A: List[List[int]]) -> int:
    """Bareiss fraction-free determinant."""
    n = len(A)
    if n == 0:
        return 1
    A = [row[:] for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def unimodular_extend(w: Sequence[int]) -> UnimodularMap:
    """Integer M with det +-1 whose last column is w/gcd(w).

    Euclidean row reduction of w/D (smallest nonzero pivot, lowest index on
    ties) gives U with U (w/D) = e_last; M = U^-1 is tracked by the inverse
    column operations.  The remaining columns are then sorted lexicographically.
    """
    w = [int(x) for x in w]
    m = len(w)
    if m == 0 or any(x < 0 for x in w) or not any(w):
        raise ValueError("weight vector must be non-negative and nonzero")
    D = _vgcd(w)
    v = [x // D for x in w]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    M = [[int(i == j) for j in range(m)] for i in range(m)]
    while sum(1 for x in v if x) > 1:
        p = min((i for i in range(m) if v[i]), key=lambda i: (v[i], i))
        for i in range(m):
            if i != p and v[i]:
                q = v[i] // v[p]
                v[i] -= q * v[p]
                U[i] = [a - q * b for a, b in zip(U[i], U[p])]
                for r in range(m):
                    M[r][p] += q * M[r][i]
    p = next(i for i in range(m) if v[i])
    last = m - 1
    U[p], U[last] = U[last], U[p]
    for r in range(m):
        M[r][p], M[r][last] = M[r][last], M[r][p]
    order = sorted(range(last), key=lambda j: tuple(M[r][j] for r in range(m))) + [last]
    M = [[row[j] for j in order] for row in M]
    U = [U[j] for j in order]
    return UnimodularMap(tuple(map(tuple, M)), tuple(map(tuple, U)), last, D)


# ---------------------------------------------------------- birational maps


@dataclass
class BirationalMap:
    """phi: source variables -> target expressions; psi the other way."""

    source: Tuple[str, ...]
    target: Tuple[str, ...]
    phi: Dict[str, RationalFunction]
    psi: Dict[str, RationalFunction]
    kind: str = "weight"
    weights: Optional[Tuple[int, ...]] = None
    matrix: Optional[Tuple[Tuple[int, ...], ...]] = None
    translation: Dict[str, Polynomial] = field(default_factory=dict)
    distinguished: Optional[str] = None
    unit: Optional[str] = None

    def round_trip(self) -> bool:
        """psi(phi(x)) = x for every source variable and phi(psi(y)) = y for every target."""
        for x in self.source:
            img = self.phi[x]
            back = img.substitute(self.psi)
            if not back == RationalFunction(Polynomial.var(x, img.char)):
                return False
        for y in self.target:
            img = self.psi[y]
            fwd = img.substitute(self.phi)
            if not fwd == RationalFunction(Polynomial.var(y, img.char)):
                return False
        return True


def build_arc_map(
    part: ConstraintSet,
    xvars: Sequence[str],
    new_vars: Sequence[str],
    w: Sequence[int],
    U: UnimodularMap,
    participating: Optional[Sequence[int]] = None,
    char: int = 0,
) -> BirationalMap:
    """x_{P_i} -> NF(a_{P_i}) + prod_j new_{P_j}^{M_ij}; other variables are renamed."""
    xvars, new_vars = tuple(xvars), tuple(new_vars)
    P = list(participating) if participating is not None else list(range(len(xvars)))
    if len(P) != U.size:
        raise ValueError("matrix size does not match the participating variables")
    phi: Dict[str, RationalFunction] = {}
    psi: Dict[str, RationalFunction] = {}
    trans: Dict[str, Polynomial] = {}
    for i, pi in enumerate(P):
        x = xvars[pi]
        t = part.normal_form(Polynomial.var(generic_name(x), char))
        trans[x] = t
        mono = mono_from((new_vars[pj], U.matrix[i][j]) for j, pj in enumerate(P))
        phi[x] = RationalFunction(Polynomial.monomial(mono, 1, char) + t)
    for j, pj in enumerate(P):
        img = RationalFunction(Polynomial.const(1, char))
        for i, pi in enumerate(P):
            k = U.inverse[j][i]
            if k:
                base = Polynomial.var(xvars[pi], char) - trans[xvars[pi]]
                img = img * RationalFunction(base) ** k
        psi[new_vars[pj]] = img
    for k, x in enumerate(xvars):
        if k not in P:
            phi[x] = RationalFunction(Polynomial.var(new_vars[k], char))
            psi[new_vars[k]] = RationalFunction(Polynomial.var(x, char))
    dist = new_vars[P[U.column]]
    unit = new_vars[P[0]] if len(P) == 2 else None
    return BirationalMap(xvars, new_vars, phi, psi, "weight", tuple(w), U.matrix, trans, dist, unit)


@dataclass
class ArcResult:
    factor: Monomial
    b: Polynomial
    constraints: ConstraintSet


def apply_arc(b_k: Polynomial, amap: BirationalMap, part: ConstraintSet) -> ArcResult:
    """phi(b_k) = factor * b_l modulo the part, plus the child's constraint set."""
    image = substitute(b_k, {x: r.as_polynomial() for x, r in amap.phi.items()})
    reduced = Polynomial({}, b_k.char)
    for m, coef in image.collect(amap.target).items():
        r = part.normal_form(coef)
        if not r.is_zero():
            reduced = reduced + r.mul_term(m)
    if reduced.is_zero():
        raise ValueError("image vanishes on the part")
    factor, b_l = monomial_content(reduced, amap.target)
    if b_l.is_constant():
        raise ValueError("cofactor is constant: part already resolved or weight sequence invalid")
    char = b_k.char
    coords = {y: Polynomial.var(generic_name(y), char) for y in amap.target}
    eq = []
    if amap.distinguished is not None:
        eq.append(coords[amap.distinguished])
    eq.append(substitute(b_l, coords))
    child = part.with_eq(*eq)
    if amap.unit is not None:
        child = child.with_ineq(coords[amap.unit])
    return ArcResult(factor, b_l, child)
