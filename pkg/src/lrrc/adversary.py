"""Constructive converse arguments: failure sequences that force small cuts.

Each builder drives a policy through a chosen sequence of failures and
unavailable sets and returns a :class:`Witness`.  A witness is self-contained:
its repair log replays to the same graph and the same cut value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Optional, Sequence

from .errors import ConstructionError, ParamError, SearchExhausted
from .families import family_index_vector, y_profile, profile_value
from .ifg import (
    FlowGraph,
    RepairRecord,
    grow_repair,
    min_cut,
    min_over_collectors,
    new_intact,
    replay,
    structure_check,
)
from .params import SystemParams, bhs_mincut_value, ceil_div
from .policies import (
    MfhsPolicy,
    ShsTable,
    checked,
    mfhs_build,
    unavailable_sets,
)


@dataclass(frozen=True)
class Witness:
    kind: str
    params: SystemParams
    records: tuple
    nodes: tuple            # the distinguished structure, in its natural order
    collector: tuple
    cut: Fraction
    alpha: Fraction
    beta: Fraction
    note: str = ""

    def graph(self) -> FlowGraph:
        return replay(self.params, self.records)

    def replay_cut(self) -> Fraction:
        return min_cut(self.graph(), self.collector, self.alpha, self.beta)

    def dumps(self) -> str:
        p = self.params
        head = [
            f"kind {self.kind}",
            f"params {p.n} {p.k} {p.d} {p.r}",
            f"point {self.alpha} {self.beta}",
            "nodes " + " ".join(map(str, self.nodes)),
            "collector " + " ".join(map(str, self.collector)),
            f"cut {self.cut}",
        ]
        if self.note:
            head.append(f"note {self.note}")
        return "\n".join(head + [r.line() for r in self.records]) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Witness":
        fields: dict = {}
        records = []
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, rest = line.partition(" ")
            if ";" in line:
                records.append(RepairRecord.parse(line))
            else:
                fields[key] = rest
        n, k, d, r = map(int, fields["params"].split())
        alpha, beta = map(Fraction, fields["point"].split())
        ints = lambda s: tuple(int(x) for x in s.split())  # noqa: E731
        return cls(
            kind=fields["kind"],
            params=SystemParams(n, k, d, r),
            records=tuple(records),
            nodes=ints(fields.get("nodes", "")),
            collector=ints(fields.get("collector", "")),
            cut=Fraction(fields["cut"]),
            alpha=alpha,
            beta=beta,
            note=fields.get("note", ""),
        )


def _point(params: SystemParams, alpha, beta) -> tuple:
    alpha = params.alpha if alpha is None else Fraction(alpha)
    beta = params.beta if beta is None else Fraction(beta)
    if alpha is None or beta is None:
        raise ValueError("alpha and beta must be set on params or passed explicitly")
    return alpha, beta


def _finish(kind, g: FlowGraph, nodes, collector, alpha, beta, note="") -> Witness:
    cut = min_cut(g, collector, alpha, beta)
    return Witness(kind, g.params, g.history, tuple(nodes), tuple(collector), cut, alpha, beta, note)


class _Driver:
    """Applies failures to a graph, asking ``policy`` for the helpers."""

    def __init__(self, params: SystemParams, policy, graph: Optional[FlowGraph] = None):
        self.policy = policy
        self.g = graph if graph is not None else new_intact(params)

    def fail(self, failed: int, unavailable: Iterable[int] = ()) -> tuple:
        helpers = checked(self.policy, self.g, failed, unavailable)
        self.g = grow_repair(self.g, failed, unavailable, helpers)
        return helpers

    def default_u(self, failed: int) -> frozenset:
        """The r nodes cyclically following ``failed``."""
        n, r = self.g.n, self.g.params.r
        return frozenset(((failed + j - 1) % n) + 1 for j in range(1, r + 1))

    def repair_all(self) -> None:
        for x in self.g.nodes():
            self.fail(x, self.default_u(x))


# -- m-sets -------------------------------------------------------------------


def m_set_size(n: int, d: int, r: int) -> int:
    return ceil_div(n - r, n - d - r)


def find_m_set(g: FlowGraph, group: Sequence[int], m: int) -> Optional[list]:
    """An m-set inside ``group``, oldest first, found by peeling off the
    youngest node and recursing into the group members that fed it."""
    if m == 0:
        return []
    if not group:
        return None
    y = g.by_age(group)[-1]
    if m == 1:
        return [y]
    fed = [x for x in group if x != y and g.has_edge(x, y)]
    sub = find_m_set(g, fed, m - 1)
    return None if sub is None else sub + [y]


def build_m_set_witness(params: SystemParams, policy, alpha=None, beta=None) -> Witness:
    """Hold V = {1..r} unavailable, fail r+1..n in order, locate an m-set
    with m = ceil((n - r) / (n - d - r)) among the other nodes."""
    alpha, beta = _point(params, alpha, beta)
    n, k, d, r = params.tuple
    drv = _Driver(params, policy)
    drv.repair_all()
    V = frozenset(range(1, r + 1))
    for x in range(r + 1, n + 1):
        drv.fail(x, V)
    g = drv.g
    m = m_set_size(n, d, r)
    found = find_m_set(g, [x for x in g.nodes() if x not in V], m)
    if found is None or not structure_check(g, found, "m-set"):
        raise ConstructionError(f"no {m}-set found; this contradicts the counting argument")
    collector = found[:k]
    return _finish("mset", g, found, collector, alpha, beta, note=f"m={m}")


# -- stationary tables on (5, k, 2, 1) ----------------------------------------


def _is_triangle(g: FlowGraph, x: int, y: int, z: int) -> bool:
    return (
        all(g.is_repaired(v) for v in (x, y, z))
        and g.has_edge(x, y)
        and g.has_edge(x, z)
        and g.has_edge(y, z)
    )


def find_triangle(g: FlowGraph) -> Optional[tuple]:
    for trio in permutations(g.nodes(), 3):
        if _is_triangle(g, *trio):
            return trio
    return None


def _extend_to_four(drv: _Driver, trio: tuple) -> tuple:
    """Fail the smaller outside node with the other one unavailable."""
    w, u = sorted(set(drv.g.nodes()) - set(trio))
    drv.fail(w, {u})
    return trio + (w,)


def _check_shs_params(table: ShsTable, k: int) -> SystemParams:
    if (table.n, table.d, table.r) != (5, 2, 1) or k not in (3, 4):
        raise ParamError("the stationary search covers (5,3,2,1) and (5,4,2,1) only")
    return SystemParams(5, k, 2, 1)


def _case_sequence(table: ShsTable) -> tuple:
    """Failure plan from the case split, in actual node labels.

    Labels are chosen so that ``D(1,{4}) = {2,3}`` reads true: node a=1 and
    u=4 stay, the two helpers become 2 and 3, the last node becomes 5.
    Returns (case, [(F, U) ...], triangle).
    """
    b, c = table(1, {4})
    e = next(x for x in (2, 3, 5) if x not in (b, c))
    lab = {1: 1, 2: b, 3: c, 4: 4, 5: e}
    inv = {v: k for k, v in lab.items()}

    def D(F, u):
        return {inv[x] for x in table(lab[F], {lab[u]})}

    if D(2, 1) != {4, 5}:
        case, plan, tri = "1.1", [(3, None), (2, 1), (1, 4)], (3, 2, 1)
    elif D(2, 4) != {1, 5}:
        case, plan, tri = "1.2", [(3, None), (2, 4), (1, 4)], (3, 2, 1)
    elif D(1, 3) != {4, 5}:
        v = next(iter(D(1, 3) - {2}))
        case, plan, tri = "2.1", [(v, None), (2, 1), (1, 3)], (v, 2, 1)
    else:
        case, plan, tri = "2.2", [(5, None), (1, 3), (2, 4)], (5, 1, 2)
    real = [(lab[F], None if u is None else lab[u]) for F, u in plan]
    return case, real, tuple(lab[x] for x in tri)


def _irrelevant_u(failed: int) -> frozenset:
    return frozenset({1 if failed != 1 else 2})


def shs_break_search(table: ShsTable, k: int = 3, alpha=2, beta=1,
                     fallback_depth: int = 4) -> Witness:
    params = _check_shs_params(table, k)
    alpha, beta = Fraction(alpha), Fraction(beta)
    case, plan, trio = _case_sequence(table)
    drv = _Driver(params, table)
    for F, u in plan:
        drv.fail(F, _irrelevant_u(F) if u is None else {u})
    if _is_triangle(drv.g, *trio):
        nodes = trio if k == 3 else _extend_to_four(drv, trio)
        return _finish("shs", drv.g, nodes, nodes, alpha, beta, note=f"case {case}")
    return _exhaustive_shs(table, params, alpha, beta, fallback_depth)


def _exhaustive_shs(table: ShsTable, params: SystemParams, alpha, beta, depth: int) -> Witness:
    """Breadth-first over (F, U) sequences up to ``depth`` failures."""
    moves = [(F, U) for F in range(1, 6) for U in unavailable_sets(5, 1, F)]
    frontier = [_Driver(params, table)]
    for _ in range(depth):
        nxt = []
        for drv in frontier:
            for F, U in moves:
                child = _Driver(params, table, drv.g)
                child.fail(F, U)
                trio = find_triangle(child.g)
                if trio is not None:
                    nodes = trio if params.k == 3 else _extend_to_four(child, trio)
                    return _finish("shs", child.g, nodes, nodes, alpha, beta, note="search")
                nxt.append(child)
        frontier = nxt
    raise SearchExhausted(f"no triangle within {depth} failures")


# -- dynamic policies on (5, k, 2, 1) -----------------------------------------


def dhs_newest_node_bound(policy, params: SystemParams, alpha=None, beta=None) -> Witness:
    """Repair every node once, then read the newest node z and its two
    helpers; for k = 4 also fail one outsider with the other unavailable."""
    if (params.n, params.d, params.r) != (5, 2, 1) or params.k not in (3, 4):
        raise ParamError("the newest-node bound covers (5,3,2,1) and (5,4,2,1) only")
    alpha, beta = _point(params, alpha, beta)
    drv = _Driver(params, policy)
    drv.repair_all()
    z = drv.g.history[-1].failed
    x, y = drv.g.helpers_of(z)
    nodes = (x, y, z)
    if params.k == 4:
        nodes = _extend_to_four(drv, nodes)
    return _finish("newest", drv.g, nodes, nodes, alpha, beta)


# -- trees for d = r = 1 ------------------------------------------------------


def _tree_params(params: SystemParams, m: int) -> None:
    if params.d != 1 or params.r not in (0, 1):
        raise ParamError("trees are built for d = 1 and r <= 1")
    if m not in (3, 4):
        raise ParamError("m must be 3 or 4")
    if params.r == 0 and (m == 4 or params.n % 2 == 0):
        # Without unavailability the last round cannot be forced.
        raise ConstructionError("with r = 0 only 3-trees for odd n are constructible")
    if m == 4 and params.n % 3 == 0:
        raise ConstructionError("a 4-tree needs n mod 3 != 0")
    if m > params.n:
        raise ConstructionError(f"n={params.n} is too small for a {m}-tree")


def _three_tree(drv: _Driver) -> list:
    drv.repair_all()
    pairs: list = []
    covered: set = set()
    while True:
        free = [x for x in drv.g.nodes() if x not in covered]
        if not free:
            raise ConstructionError("ran out of nodes without a 3-tree")
        w = free[0]
        U = {free[1]} if len(free) == 2 else set()
        (x,) = drv.fail(w, U)
        if x in covered:
            pair = next(p for p in pairs if x in p)
            return list(pair) + [w]
        pairs.append((x, w))
        covered |= {x, w}


def _four_tree(drv: _Driver) -> list:
    comps: list = []          # 2-sets and 3-trees, each in tree order

    def attach(newcomer: int, helper: int) -> Optional[list]:
        for i, comp in enumerate(comps):
            if helper in comp:
                if len(comp) == 3:
                    return comp + [newcomer]
                comps[i] = comp + [newcomer]
                return None
        comps.append([helper, newcomer])
        return None

    # Start from a fully repaired graph so the tree root is fed by one
    # helper edge rather than by the source.
    drv.repair_all()
    # Phase 1: every node ends up in a 2-set or a 3-tree.
    while True:
        used = {x for comp in comps for x in comp}
        free = [x for x in drv.g.nodes() if x not in used]
        if not free:
            break
        w = free[0]
        (x,) = drv.fail(w, ())
        tree = attach(w, x)
        if tree:
            return tree
    # Phase 2: dissolve 2-sets one at a time.
    while True:
        twos = [c for c in comps if len(c) == 2]
        if not twos:
            raise ConstructionError("no 2-set left; impossible when n mod 3 != 0")
        v, w = twos[0]
        comps.remove([v, w])
        (h,) = drv.fail(w, {v})
        tree = attach(w, h)
        if tree:
            return tree
        (h,) = drv.fail(v, ())
        tree = attach(v, h)
        if tree:
            return tree


def tree_witness(policy, params: SystemParams, m: int, alpha=None, beta=None) -> Witness:
    _tree_params(params, m)
    alpha, beta = _point(params, alpha, beta)
    drv = _Driver(params, policy)
    tree = _three_tree(drv) if m == 3 else _four_tree(drv)
    if not structure_check(drv.g, tree, "m-tree"):
        raise ConstructionError(f"constructed nodes {tree} do not form an {m}-tree")
    return _finish("tree", drv.g, tree, tree[: params.k] if params.k < m else tree,
                   alpha, beta, note=f"m={m}")


# -- family helper selection --------------------------------------------------


def node_sequence(n: int, d: int, r: int, pi: Sequence[int]) -> tuple:
    """Distinct nodes whose family labels read ``pi``, smallest index first."""
    fi = family_index_vector(n, d, r)
    if sorted(pi) != sorted(fi):
        raise ConstructionError(f"{tuple(pi)} is not a permutation of {fi}")
    used: set = set()
    out = []
    for label in pi:
        x = next(j for j in range(1, n + 1) if fi[j - 1] == label and j not in used)
        used.add(x)
        out.append(x)
    return tuple(out)


def fhs_upper_witness(params: SystemParams, pi: Sequence[int], alpha=None, beta=None) -> Witness:
    """Fail nodes in the order of ``pi``'s node sequence; each time the
    last r candidates (by sequence position) are unavailable.  The collector
    is the first k newcomers.

    With no alpha available the storage cap is lifted by using
    ``alpha = k*d*beta + beta``, which no min term can reach.
    """
    n, k, d, r = params.tuple
    beta = params.beta if beta is None else Fraction(beta)
    if beta is None:
        raise ValueError("beta is not set")
    if alpha is None:
        alpha = params.alpha if params.alpha is not None else k * d * beta + beta
    alpha = Fraction(alpha)
    p = node_sequence(n, d, r, pi)
    pos = {x: i for i, x in enumerate(p)}
    structure = mfhs_build(n, d, r)
    drv = _Driver(params, MfhsPolicy(structure))
    for x in p:
        ranked = sorted(structure.candidates[x], key=pos.__getitem__)
        drv.fail(x, ranked[len(ranked) - r:] if r else ())
    return _finish("fhs", drv.g, p, p[:k], alpha, beta, note="pi " + " ".join(map(str, pi)))


def fhs_formula(params: SystemParams, pi: Sequence[int], alpha, beta) -> Fraction:
    return profile_value(y_profile(pi, params.k), params.d, alpha, beta)


# -- bounded exploration of blind selection ------------------------------------


@dataclass
class Exploration:
    params: SystemParams
    points: tuple
    minima: dict = field(default_factory=dict)
    visited: int = 0
    complete: bool = False
    below: list = field(default_factory=list)     # (point, value, records)
    witness: dict = field(default_factory=dict)   # point -> records attaining the minimum

    def attains(self) -> bool:
        return not self.below and all(
            self.minima[pt] == bhs_mincut_value(self.params.with_point(*pt)) for pt in self.points
        )


def _moves(g: FlowGraph, d: int) -> list:
    """Every (F, helpers) move; never-repaired F first and youngest helpers
    first, so the first dive rebuilds the classical chain."""
    age = lambda x: (g.repair_time(x), -x)  # noqa: E731
    fails = sorted(g.nodes(), key=lambda x: (g.is_repaired(x), g.repair_time(x), x))
    out = []
    for F in fails:
        pool = sorted((x for x in g.nodes() if x != F), key=age, reverse=True)
        out.extend((F, tuple(sorted(h))) for h in combinations(pool, d))
    return out


def explore_bhs(params: SystemParams, points: Iterable[tuple], max_depth: Optional[int] = None,
                budget: int = 10_000, stop_when_attained: bool = True) -> Exploration:
    """Depth-first search over blind-selection graphs with full branching.

    Every visited graph is scored at every point.  With ``stop_when_attained``
    the search ends as soon as all points reach the closed form.
    """
    pts = tuple((Fraction(a), Fraction(b)) for a, b in points)
    depth = params.n + 2 if max_depth is None else max_depth
    targets = {pt: bhs_mincut_value(params.with_point(*pt)) for pt in pts}
    res = Exploration(params, pts)

    def visit(g: FlowGraph) -> bool:
        res.visited += 1
        for pt in pts:
            v = min_over_collectors(g, *pt)
            if v < targets[pt]:
                res.below.append((pt, v, g.history))
            if pt not in res.minima or v < res.minima[pt]:
                res.minima[pt] = v
                res.witness[pt] = g.history
        return stop_when_attained and all(res.minima[pt] <= targets[pt] for pt in pts)

    def dfs(g: FlowGraph, level: int) -> bool:
        if visit(g):
            return True
        if level == depth:
            return False
        for F, h in _moves(g, params.d):
            if res.visited >= budget:
                return False
            if dfs(grow_repair(g, F, (), h), level + 1):
                return True
        return False

    stopped = dfs(new_intact(params), 0)
    res.complete = not stopped and res.visited < budget
    return res
