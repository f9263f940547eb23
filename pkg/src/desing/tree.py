"""The arc algorithm: breadth-first expansion of the desingularization tree."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .charts import ChartIndex, chart, chart_var
from .constraints import ConstraintSet
from .localize import generic_name, minimal_elements, partition_by_init, translate
from .poly import (
    Polynomial,
    RationalFunction,
    exact_divide,
    monomial_content,
    substitute,
    substitute_rational,
)
from .reduce import Hints, Reduction, reduction_step
from .resolved import (
    ResolvedDecomposition,
    ResolvedRewrite,
    TruncatedSeries,
    find_resolution,
    resolved_rewrite,
    unit_series,
)
from .weights import (
    apply_arc,
    build_arc_map,
    minimal_weight_sequences,
    unimodular_extend,
    valid_weight_sequences,
    weight_bound,
)

ROOT = "root"


@dataclass
class TreeConfig:
    max_depth: int = 16
    series_order: int = 12
    series_budget: Optional[int] = 2000
    weight_bound: int = 16
    jobs: int = 1
    at_origin: bool = False
    hints: Optional[Hints] = None


@dataclass
class Resolution:
    decomposition: ResolvedDecomposition
    series: Optional[TruncatedSeries]
    rewrite: ResolvedRewrite
    part: Optional[ConstraintSet] = None

    def to_dict(self) -> dict:
        d = self.decomposition.to_dict()
        if self.part is not None:
            d["part"] = self.part.describe()
        d["series"] = self.series.to_dict() if self.series is not None else None
        d["rewrite"] = self.rewrite.to_dict()
        return d


@dataclass
class TreeNode:
    id: str
    parent: Optional[str]
    depth: int
    b: Polynomial
    vars: Tuple[str, ...]
    constraints: ConstraintSet
    kind: str = "local"
    status: str = "open"
    globals: Tuple[str, ...] = ()
    resolution: Optional[Resolution] = None
    resolved_parts: List[Resolution] = field(default_factory=list)
    reductions: List[Reduction] = field(default_factory=list)
    witness: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        c = self.constraints
        d = {
            "id": self.id,
            "parent": self.parent,
            "depth": str(self.depth),
            "kind": self.kind,
            "status": self.status,
            "vars": list(self.vars),
            "globals": list(self.globals),
            "b": str(self.b),
            "eq": [str(g) for g in c.basis],
            "ineq": [str(g) for g in c.ineq],
        }
        if self.witness is not None:
            d["witness"] = self.witness
        if self.resolution is not None:
            d["resolution"] = self.resolution.to_dict()
        if self.resolved_parts:
            d["resolved_parts"] = [r.to_dict() for r in self.resolved_parts]
        if self.reductions:
            d["reductions"] = [r.to_dict() for r in self.reductions]
        if self.notes:
            d["notes"] = list(self.notes)
        return d


@dataclass
class Arc:
    source: str
    target: str
    kind: str
    phi: Dict[str, RationalFunction]
    psi: Dict[str, RationalFunction]
    factor: Polynomial
    power: int = 1
    multiplier: Optional[Polynomial] = None
    part: Optional[ConstraintSet] = None
    weights: Optional[Tuple[int, ...]] = None
    matrix: Optional[Tuple[Tuple[int, ...], ...]] = None

    def phi_strings(self) -> Dict[str, str]:
        return {k: str(v) for k, v in self.phi.items()}

    def to_dict(self) -> dict:
        d = {
            "from": self.source,
            "to": self.target,
            "kind": self.kind,
            "phi": self.phi_strings(),
            "psi": {k: str(v) for k, v in self.psi.items()},
            "factor": str(self.factor),
            "multiplier": str(self.multiplier) if self.multiplier is not None else "1",
            "power": str(self.power),
        }
        if self.part is not None:
            d["part"] = {"eq": [str(g) for g in self.part.basis], "ineq": [str(g) for g in self.part.ineq]}
        if self.weights is not None:
            d["weights"] = [str(x) for x in self.weights]
        if self.matrix is not None:
            d["matrix"] = [[str(x) for x in row] for row in self.matrix]
        return d


@dataclass
class DesingTree:
    problem: dict
    nodes: Dict[str, TreeNode]
    arcs: List[Arc]
    root: str = ROOT

    def children(self, node_id: str) -> List[str]:
        return [a.target for a in self.arcs if a.source == node_id]

    def arc_to(self, node_id: str) -> Optional[Arc]:
        return next((a for a in self.arcs if a.target == node_id), None)

    def leaves(self) -> List[TreeNode]:
        parents = {a.source for a in self.arcs}
        return [n for n in self.nodes.values() if n.id not in parents]

    def path(self, node_id: str) -> List[Arc]:
        if node_id not in self.nodes:
            raise KeyError(f"unknown node {node_id!r}")
        out = []
        cur = node_id
        while cur != self.root:
            a = self.arc_to(cur)
            out.append(a)
            cur = a.source
        return out[::-1]

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "nodes": [n.to_dict() for n in self.nodes.values()],
            "arcs": [a.to_dict() for a in self.arcs],
        }


# ------------------------------------------------------------ node helpers


def _resolve(b: Polynomial, vs: Sequence[str], c: Optional[ConstraintSet], cfg: TreeConfig,
             part: Optional[ConstraintSet] = None) -> Optional[Resolution]:
    dec = find_resolution(b, vs, c)
    if dec is None:
        return None
    order = cfg.series_order
    series = unit_series(dec, order, cfg.series_budget) if order >= 0 else None
    return Resolution(dec, series, resolved_rewrite(dec), part)


def _finish(node: TreeNode, cfg: TreeConfig) -> TreeNode:
    """Status at creation: empty, resolved, or open."""
    if node.constraints.empty:
        node.status = "empty"
        if node.witness is None:
            node.witness = "1 lies in the EQ ideal"
        return node
    # root-kind nodes carry no point; the default part is the generic point with dist = 0
    c = None if node.kind == "root" and not node.constraints.basis else node.constraints
    res = _resolve(node.b, node.vars, c, cfg)
    if res is not None:
        node.status = "resolved"
        node.resolution = res
    return node


def _origin(vs: Sequence[str], char: int) -> ConstraintSet:
    return ConstraintSet([Polynomial.var(generic_name(v), char) for v in vs], (), char)


@dataclass
class NodePlan:
    children: List[tuple] = field(default_factory=list)
    reductions: List[Reduction] = field(default_factory=list)
    resolved_parts: List[Resolution] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    terminal: Optional[str] = None


def _local_plan(node: TreeNode, cfg: TreeConfig, plan: NodePlan) -> None:
    L = translate(node.b, node.vars, node.constraints)
    for part, init in partition_by_init(L):
        res = _resolve(node.b, node.vars, part, cfg, part)
        if res is not None:
            plan.resolved_parts.append(res)
            continue
        support = [e for e, coef in L.coeffs.items() if not part.is_zero(coef)]
        mins = minimal_elements(support)
        if len(mins) < 2:
            plan.notes.append(f"part with a single initial monomial {list(mins)}: no weight sequence")
            continue
        bound = max(cfg.weight_bound, weight_bound(support))
        ws = minimal_weight_sequences(valid_weight_sequences(support, bound), support)
        if not ws:
            plan.notes.append("part without weight sequences within the bound")
        for w in ws:
            plan.children.append(("weight", part, w.w))


def plan_node(node: TreeNode, cfg: TreeConfig) -> NodePlan:
    """Everything about an expansion that does not depend on the ids of the children."""
    plan = NodePlan()
    if node.kind == "root":
        hints = cfg.hints if node.id == ROOT else None
        r = reduction_step(node.b, node.vars, hints)
        if r is not None:
            if r.kind == "linear-solve":
                plan.reductions.append(r)
                plan.terminal = "reduced-global"
            else:
                plan.children.append(("reduction",))
            return plan
        if cfg.at_origin:
            _local_plan(node, cfg, plan)
            return plan
        plan.children = [("chart", K) for K in range(2 ** len(node.vars))]
        return plan
    _local_plan(node, cfg, plan)
    return plan


def realize_child(node: TreeNode, spec: tuple, child_id: str, cfg: TreeConfig) -> Tuple[TreeNode, Arc]:
    char = node.b.char
    depth = node.depth + 1
    if spec[0] == "reduction":
        names = lambda vs: {v: chart_var(child_id, j) for j, v in enumerate(vs)}
        hints = cfg.hints if node.id == ROOT else None
        r = reduction_step(node.b, node.vars, hints, names)
        vs = tuple(v for v in r.target_vars if v not in r.globals)
        child = TreeNode(child_id, node.id, depth, r.reduced, vs,
                         ConstraintSet((), (), char), "root", "open", node.globals + r.globals)
        child.reductions.append(r)
        arc = Arc(node.id, child_id, "reduction:" + r.kind, r.phi, r.psi, r.factor, r.power,
                  weights=r.weights, matrix=r.matrix)
        return _finish(child, cfg), arc
    if spec[0] == "chart":
        K = spec[1]
        ch = chart(node.b, ChartIndex(K, len(node.vars)), node.vars, child_id)
        child = TreeNode(child_id, node.id, depth, ch.b, ch.vars, ch.constraints, "local", "open",
                         node.globals, witness=ch.witness)
        child.notes.append(f"chart K={K}")
        factor = Polynomial.monomial(ch.factor, 1, char)
        arc = Arc(node.id, child_id, "chart", ch.phi, ch.psi, factor)
        return _finish(child, cfg), arc
    _, part, w = spec
    new = tuple(chart_var(child_id, j) for j in range(len(node.vars)))
    U = unimodular_extend(w)
    amap = build_arc_map(part, node.vars, new, w, U, char=char)
    res = apply_arc(node.b, amap, part)
    child = TreeNode(child_id, node.id, depth, res.b, new, res.constraints, "local", "open", node.globals)
    factor = Polynomial.monomial(res.factor, 1, char)
    arc = Arc(node.id, child_id, "weight", amap.phi, amap.psi, factor, 1, part=part,
              weights=tuple(w), matrix=U.matrix)
    return _finish(child, cfg), arc


def _plan_job(args):
    return plan_node(*args)


def _realize_job(args):
    return realize_child(*args)


# --------------------------------------------------------------- the build


def make_root(b: Polynomial, vs: Sequence[str], cfg: TreeConfig) -> TreeNode:
    char = b.char
    c = _origin(vs, char) if cfg.at_origin else ConstraintSet((), (), char)
    root = TreeNode(ROOT, None, 0, b, tuple(vs), c, "root")
    if cfg.at_origin:
        if c.with_eq(substitute(b, {v: Polynomial.var(generic_name(v), char) for v in vs})).empty:
            raise ValueError("b does not vanish at the origin")
        root.notes.append("root localized at the origin; charts skipped")
    return _finish(root, cfg)


def build_tree(b: Polynomial, vs: Sequence[str], cfg: Optional[TreeConfig] = None,
               problem: Optional[dict] = None) -> DesingTree:
    """Breadth-first expansion; ids are assigned in creation order, so output is independent of jobs."""
    cfg = cfg or TreeConfig()
    root = make_root(b, vs, cfg)
    nodes: Dict[str, TreeNode] = {root.id: root}
    arcs: List[Arc] = []
    counter = 0
    frontier = [root]
    pool = ProcessPoolExecutor(cfg.jobs) if cfg.jobs > 1 else None
    mapper = pool.map if pool is not None else map
    try:
        while frontier:
            todo = []
            for n in frontier:
                if n.status != "open":
                    continue
                if n.depth >= cfg.max_depth:
                    n.status = "depth-limited"
                    continue
                todo.append(n)
            plans = list(mapper(_plan_job, [(n, cfg) for n in todo]))
            jobs = []
            for n, plan in zip(todo, plans):
                n.reductions.extend(plan.reductions)
                n.resolved_parts.extend(plan.resolved_parts)
                n.notes.extend(plan.notes)
                if plan.terminal is not None:
                    n.status = plan.terminal
                    for r in plan.reductions:
                        n.globals = n.globals + tuple(g for g in r.globals if g not in n.globals)
                    continue
                if plan.children:
                    n.status = "expanded"
                elif plan.resolved_parts:
                    n.status = "resolved"
                for spec in plan.children:
                    jobs.append((n, spec, str(counter), cfg))
                    counter += 1
            results = list(mapper(_realize_job, jobs))
            frontier = []
            for (parent, _, _, _), (child, arc) in zip(jobs, results):
                nodes[child.id] = child
                arcs.append(arc)
                frontier.append(child)
    finally:
        if pool is not None:
            pool.shutdown()
    problem = problem or {"char": str(b.char), "vars": list(vs), "b": str(b)}
    return DesingTree(problem, nodes, arcs)


# ----------------------------------------------------------- verification


def _zero_mod(diff: Polynomial, vs: Sequence[str], c: ConstraintSet) -> bool:
    if diff.is_zero():
        return True
    _, diff = monomial_content(diff)
    return all(c.vanishes(coef) for coef in diff.collect(vs).values())


def arc_identity(parent_b: Polynomial, child_b: Polynomial, arc: Arc,
                 child_vars: Sequence[str], c: ConstraintSet) -> bool:
    """mult*phi(b_parent) = factor*b_child^power on the child's part."""
    lhs = substitute_rational(parent_b, arc.phi)
    if arc.multiplier is not None:
        lhs = lhs * RationalFunction(arc.multiplier)
    rhs = RationalFunction(arc.factor) * RationalFunction(child_b) ** arc.power
    diff = lhs - rhs
    if diff.num.is_zero():
        return True
    vs = set(child_vars) | set(diff.num.variables())
    vs = [v for v in vs if not v.startswith("a")]
    return _zero_mod(diff.num, vs, c)


def verify_tree(tree: DesingTree) -> List[Tuple[str, str, bool]]:
    out = []
    for arc in tree.arcs:
        p, ch = tree.nodes[arc.source], tree.nodes[arc.target]
        out.append((arc.source, arc.target, arc_identity(p.b, ch.b, arc, ch.vars, ch.constraints)))
    return out


@dataclass
class ComposedMap:
    source: Tuple[str, ...]
    target: Tuple[str, ...]
    phi: Dict[str, RationalFunction]
    psi: Dict[str, RationalFunction]
    factor: RationalFunction
    round_trip: bool
    identity: bool


def compose_path(tree: DesingTree, leaf_id: str) -> ComposedMap:
    """Root-to-node composite (Phi, Psi) with its round trip and b-identity checked."""
    path = tree.path(leaf_id)
    root = tree.nodes[tree.root]
    leaf = tree.nodes[leaf_id]
    char = root.b.char
    Phi = {x: RationalFunction(Polynomial.var(x, char)) for x in root.vars}
    factor = RationalFunction(Polynomial.const(1, char))
    for arc in path:
        Phi = {x: r.substitute(arc.phi) for x, r in Phi.items()}
        factor = factor.substitute(arc.phi)
        if arc.power == 1:
            factor = factor * RationalFunction(arc.factor)
    Psi_vars = leaf.vars + tuple(g for g in leaf.globals if g not in leaf.vars)
    Psi = {y: RationalFunction(Polynomial.var(y, char)) for y in Psi_vars}
    for arc in reversed(path):
        Psi = {y: r.substitute(arc.psi) for y, r in Psi.items()}
    round_trip = True
    for x, r in Phi.items():
        back = r.substitute(Psi) - RationalFunction(Polynomial.var(x, char))
        if back.num.is_zero():
            continue
        _, num = monomial_content(back.num)
        if exact_divide(num, root.b) is None:
            round_trip = False
    identity = True
    if all(a.power == 1 for a in path):
        diff = substitute_rational(root.b, Phi) - factor * RationalFunction(leaf.b)
        if not diff.num.is_zero():
            vs = [v for v in diff.num.variables() if not v.startswith("a")]
            identity = _zero_mod(diff.num, vs, leaf.constraints)
    return ComposedMap(root.vars, Psi_vars, Phi, Psi, factor, round_trip, identity)


# ------------------------------------------------------ saved-tree checking


def verify_dict(data: dict) -> List[Tuple[str, str, bool, str]]:
    """Re-run every arc identity of a serialized tree; (from, to, ok, message)."""
    from .parse_io import parse_polynomial, parse_rational

    char = int(data["problem"]["char"])
    nodes = {n["id"]: n for n in data["nodes"]}
    out = []
    roots = [n for n in data["nodes"] if n["parent"] is None]
    if len(roots) != 1:
        return [("", "", False, "tree must have exactly one root")]
    for arc in data["arcs"]:
        src, dst = arc["from"], arc["to"]
        if src not in nodes or dst not in nodes or nodes[dst]["parent"] != src:
            out.append((src, dst, False, "arc does not join a parent to its child"))
            continue
        try:
            pb = parse_polynomial(nodes[src]["b"], char)
            cb = parse_polynomial(nodes[dst]["b"], char)
            phi = {k: parse_rational(v, char) for k, v in arc["phi"].items()}
            factor = parse_polynomial(arc["factor"], char)
            mult = parse_polynomial(arc.get("multiplier", "1"), char)
            eq = [parse_polynomial(s, char) for s in nodes[dst]["eq"]]
            ineq = [parse_polynomial(s, char) for s in nodes[dst].get("ineq", [])]
        except ValueError as e:
            out.append((src, dst, False, f"unparseable record: {e}"))
            continue
        a = Arc(src, dst, arc["kind"], phi, {}, factor, int(arc["power"]),
                None if mult == Polynomial.const(1, char) else mult)
        c = ConstraintSet(eq, ineq, char)
        ok = arc_identity(pb, cb, a, nodes[dst]["vars"], c)
        out.append((src, dst, ok, "ok" if ok else "identity fails"))
    seen = {roots[0]["id"]}
    for n in data["nodes"]:
        if n["parent"] is not None and n["parent"] not in nodes:
            out.append((n["parent"], n["id"], False, "dangling parent"))
        seen.add(n["id"])
    return out
