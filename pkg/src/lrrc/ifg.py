"""Information flow graphs: growth under repairs and exact min-cut values.

A :class:`FlowGraph` is an append-only record of storage *instances*.  Every
physical node 1..n starts with an initial instance fed by the source; each
repair adds a new instance for the failed node whose input is wired to the
current instances of its helpers.  Instances that were replaced stay in the
graph (inactive) but never gain new out-edges.

Capacities are attached at evaluation time from ``params.alpha`` and
``params.beta`` (or explicit overrides), so one grown structure can be scored
at many operating points.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence

from .errors import ArityError, ProtocolError, UnsupportedError
from .params import SystemParams


@dataclass(frozen=True)
class RepairRecord:
    time: int
    failed: int
    unavailable: frozenset
    helpers: tuple

    def line(self) -> str:
        u = ",".join(map(str, sorted(self.unavailable)))
        h = ",".join(map(str, self.helpers))
        return f"{self.time};{self.failed};{u};{h}"

    @classmethod
    def parse(cls, line: str) -> "RepairRecord":
        time, failed, u, h = line.strip().split(";")
        ints = lambda s: tuple(int(x) for x in s.split(",") if x)  # noqa: E731
        return cls(int(time), int(failed), frozenset(ints(u)), ints(h))


@dataclass(frozen=True)
class FlowGraph:
    params: SystemParams
    owner: tuple            # instance -> physical node
    born: tuple             # instance -> repair time (0 for initial instances)
    feeds: tuple            # instance -> tuple of helper instances (empty: source-fed)
    active: tuple           # physical node - 1 -> current instance
    history: tuple = ()

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def time(self) -> int:
        return len(self.history)

    def nodes(self) -> range:
        return range(1, self.n + 1)

    def instance(self, node: int) -> int:
        return self.active[node - 1]

    def repair_time(self, node: int) -> int:
        return self.born[self.instance(node)]

    def is_repaired(self, node: int) -> bool:
        return self.repair_time(node) > 0

    def helpers_of(self, node: int) -> tuple:
        """Physical nodes whose *current* instance fed ``node``'s current instance."""
        inst = self.feeds[self.instance(node)]
        return tuple(x for x in self.nodes() if self.instance(x) in inst)

    def has_edge(self, x: int, y: int) -> bool:
        """Edge from x's current output to y's current input."""
        return self.instance(x) in self.feeds[self.instance(y)]

    def by_age(self, nodes: Iterable[int]) -> list:
        """Oldest first; initial instances tie-break by node index."""
        return sorted(nodes, key=lambda x: (self.repair_time(x), x))

    def edges(self) -> Iterator[tuple]:
        """(u, v, kind) over IFG vertices; kind is 'inf', 'alpha' or 'beta'."""
        for i, feeds in enumerate(self.feeds):
            if not feeds:
                yield ("s", ("in", i), "inf")
            for h in feeds:
                yield (("out", h), ("in", i), "beta")
            yield (("in", i), ("out", i), "alpha")


def new_intact(params: SystemParams) -> FlowGraph:
    n = params.n
    return FlowGraph(
        params=params,
        owner=tuple(range(1, n + 1)),
        born=(0,) * n,
        feeds=((),) * n,
        active=tuple(range(n)),
    )


def check_repair(g: FlowGraph, failed: int, unavailable: Iterable[int], helpers: Iterable[int]):
    p = g.params
    U = frozenset(unavailable)
    H = tuple(sorted(set(helpers)))
    if failed not in g.nodes():
        raise ProtocolError(f"failed node {failed} is not a node of the network")
    if failed in U:
        raise ProtocolError(f"failed node {failed} listed as unavailable")
    if len(U) > p.r:
        raise ProtocolError(f"{len(U)} unavailable nodes exceed r={p.r}")
    if not U <= set(g.nodes()):
        raise ProtocolError(f"unknown unavailable nodes {sorted(U)}")
    if len(H) != len(tuple(helpers)) or len(H) != p.d:
        raise ArityError(f"need {p.d} distinct helpers, got {tuple(helpers)}")
    if failed in H or U & set(H):
        raise ProtocolError(f"helpers {H} overlap failed node or unavailable set {sorted(U)}")
    if not set(H) <= set(g.nodes()):
        raise ProtocolError(f"unknown helpers {H}")
    return U, H


def grow_repair(g: FlowGraph, failed: int, unavailable: Iterable[int], helpers: Iterable[int]) -> FlowGraph:
    """Fail ``failed`` while ``unavailable`` is down and regenerate it from ``helpers``."""
    U, H = check_repair(g, failed, unavailable, helpers)
    new = len(g.owner)
    active = list(g.active)
    active[failed - 1] = new
    record = RepairRecord(g.time + 1, failed, U, H)
    return replace(
        g,
        owner=g.owner + (failed,),
        born=g.born + (g.time + 1,),
        feeds=g.feeds + (tuple(g.instance(h) for h in H),),
        active=tuple(active),
        history=g.history + (record,),
    )


def replay(params: SystemParams, records: Iterable[RepairRecord]) -> FlowGraph:
    g = new_intact(params)
    for rec in records:
        g = grow_repair(g, rec.failed, rec.unavailable, rec.helpers)
    return g


def max_flow(num_vertices: int, arcs: Iterable[tuple], s: int, t: int) -> int:
    """Edmonds-Karp on non-negative integer capacities."""
    cap: list[dict] = [dict() for _ in range(num_vertices)]
    for u, v, c in arcs:
        cap[u][v] = cap[u].get(v, 0) + c
        cap[v].setdefault(u, 0)
    flow = 0
    while True:
        prev = [-1] * num_vertices
        prev[s] = s
        queue = deque([s])
        while queue and prev[t] < 0:
            u = queue.popleft()
            for v, c in cap[u].items():
                if c > 0 and prev[v] < 0:
                    prev[v] = u
                    queue.append(v)
        if prev[t] < 0:
            return flow
        push = None
        v = t
        while v != s:
            u = prev[v]
            push = cap[u][v] if push is None else min(push, cap[u][v])
            v = u
        v = t
        while v != s:
            u = prev[v]
            cap[u][v] -= push
            cap[v][u] += push
            v = u
        flow += push


def _point(g: FlowGraph, alpha, beta) -> tuple[Fraction, Fraction]:
    alpha = g.params.alpha if alpha is None else Fraction(alpha)
    beta = g.params.beta if beta is None else Fraction(beta)
    if alpha is None or beta is None:
        raise ValueError("alpha and beta must be set on params or passed explicitly")
    return alpha, beta


def min_cut(g: FlowGraph, collector: Iterable[int], alpha=None, beta=None) -> Fraction:
    """Exact s-t min-cut value for a data collector attached to ``collector``."""
    nodes = sorted(set(collector))
    if len(nodes) > g.n or not set(nodes) <= set(g.nodes()):
        raise ValueError(f"invalid collector {nodes}")
    alpha, beta = _point(g, alpha, beta)
    scale = math.lcm(alpha.denominator, beta.denominator)
    a, b = int(alpha * scale), int(beta * scale)
    p = g.params
    inf = (p.k * a + p.n * p.d * b) + 1

    # Only ancestors of the collector can carry flow to it.
    keep: dict[int, int] = {}
    stack = [g.instance(x) for x in nodes]
    while stack:
        i = stack.pop()
        if i in keep:
            continue
        keep[i] = len(keep)
        stack.extend(g.feeds[i])
    s, t = 0, 2 * len(keep) + 1
    vin = lambda i: 2 * keep[i] + 1  # noqa: E731
    vout = lambda i: 2 * keep[i] + 2  # noqa: E731
    arcs = []
    for i in keep:
        arcs.append((vin(i), vout(i), a))
        if g.feeds[i]:
            arcs.extend((vout(h), vin(i), b) for h in g.feeds[i])
        else:
            arcs.append((s, vin(i), inf))
    arcs.extend((vout(g.instance(x)), t, inf) for x in nodes)
    return Fraction(max_flow(t + 1, arcs, s, t), scale)


def collectors(g: FlowGraph) -> Iterator[tuple]:
    return combinations(g.nodes(), g.params.k)


def min_over_collectors(g: FlowGraph, alpha=None, beta=None) -> Fraction:
    return min(min_cut(g, t, alpha, beta) for t in collectors(g))


def structure_check(g: FlowGraph, nodes: Sequence[int], kind: str) -> bool:
    """Check an ``"m-set"`` (clique of older->younger edges, all repaired)
    or an ``"m-tree"`` (d = 1; each later node fed by an earlier listed one).

    For an m-tree the nodes are taken in the given order, which must agree
    with their repair order.
    """
    nodes = list(nodes)
    if len(set(nodes)) != len(nodes) or not set(nodes) <= set(g.nodes()):
        return False
    if kind == "m-set":
        if not all(g.is_repaired(x) for x in nodes):
            return False
        ordered = g.by_age(nodes)
        return all(
            g.has_edge(x, y) for i, y in enumerate(ordered) for x in ordered[:i]
        )
    if kind == "m-tree":
        if g.params.d != 1:
            raise UnsupportedError("m-trees are defined for d = 1 only")
        times = [g.repair_time(x) for x in nodes]
        if any(t1 >= t2 and t2 > 0 for t1, t2 in zip(times, times[1:])):
            return False
        if any(t == 0 for t in times[1:]):
            return False
        return all(
            any(g.has_edge(x, nodes[i]) for x in nodes[:i]) for i in range(1, len(nodes))
        )
    raise ValueError(f"unknown structure kind {kind!r}")


def _label(g: FlowGraph, v) -> str:
    if v == "s":
        return "s"
    side, i = v
    return f"{side}:{g.owner[i]}@{g.born[i]}"


def dump_edges(g: FlowGraph) -> str:
    """One ``u v num den`` line per edge; an infinite capacity is ``1 0``."""
    lines = []
    for u, v, kind in g.edges():
        if kind == "inf":
            num, den = 1, 0
        else:
            c = getattr(g.params, kind)
            if c is None:
                raise ValueError(f"{kind} is not set on params")
            num, den = c.numerator, c.denominator
        lines.append(f"{_label(g, u)} {_label(g, v)} {num} {den}")
    return "\n".join(lines) + "\n"
