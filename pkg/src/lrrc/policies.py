"""Helper-selection policies.

A policy is any object with ``decide(graph, failed, unavailable)`` returning a
sorted tuple of ``d`` helpers drawn from the available survivors.  The graph
carries the whole repair history, so stationary policies simply ignore it and
dynamic ones inspect it.  Blind selection is not a policy here: it is the
closure over *all* helper choices and lives in the adversary module.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Optional, Protocol

from . import gf2
from .errors import ConstructionError, ProtocolError, UnsupportedError
from .ifg import FlowGraph
from .params import validate_params


class HelperPolicy(Protocol):
    def decide(self, graph: FlowGraph, failed: int, unavailable: frozenset) -> tuple: ...


def available(n: int, failed: int, unavailable: Iterable[int]) -> list:
    blocked = {failed, *unavailable}
    return [x for x in range(1, n + 1) if x not in blocked]


def unavailable_sets(n: int, r: int, failed: int) -> list:
    """All |U| = r sets not containing ``failed``, lexicographic order."""
    others = [x for x in range(1, n + 1) if x != failed]
    return [frozenset(c) for c in combinations(others, r)]


def checked(policy: HelperPolicy, graph: FlowGraph, failed: int, unavailable) -> tuple:
    """Call ``policy.decide`` and enforce the interface contract."""
    U = frozenset(unavailable)
    helpers = tuple(policy.decide(graph, failed, U))
    d = graph.params.d
    if len(set(helpers)) != d or failed in helpers or U & set(helpers):
        raise ProtocolError(
            f"{type(policy).__name__} returned {helpers} for F={failed}, U={sorted(U)}"
        )
    return tuple(sorted(helpers))


# -- stationary tables -------------------------------------------------------


@dataclass(frozen=True)
class ShsTable:
    """Stationary map (F, U) -> helpers over every F and every |U| = r.

    Lookups with |U| < r (or, for candidate-set tables, U outside the
    candidate set) go through ``fallback``; the default completes U with the
    smallest-index other nodes and reads the table.
    """

    n: int
    d: int
    r: int
    entries: Mapping
    candidates: Optional[Mapping] = None

    def __post_init__(self):
        for F in range(1, self.n + 1):
            for U in unavailable_sets(self.n, self.r, F):
                h = self.entries.get((F, U))
                if h is None:
                    raise ConstructionError(f"table missing D({F},{sorted(U)})")
                if len(set(h)) != self.d or F in h or U & set(h):
                    raise ConstructionError(f"bad entry D({F},{sorted(U)}) = {h}")

    def __call__(self, failed: int, unavailable: Iterable[int]) -> tuple:
        U = frozenset(unavailable)
        if self.candidates is not None:
            cand = self.candidates[failed]
            if len(U) == self.r and U <= cand:
                return self.entries[(failed, U)]
            return tuple(x for x in sorted(cand) if x not in U)[: self.d]
        if len(U) == self.r:
            return self.entries[(failed, U)]
        fill = [x for x in range(1, self.n + 1) if x != failed and x not in U]
        return self.entries[(failed, U | frozenset(fill[: self.r - len(U)]))]

    def decide(self, graph, failed, unavailable) -> tuple:
        return self(failed, unavailable)

    def lines(self) -> list:
        """``F;U-list;helper-list`` with sorted indices, one per entry."""
        out = []
        for (F, U), h in sorted(self.entries.items(), key=lambda kv: (kv[0][0], sorted(kv[0][1]))):
            out.append(f"{F};{','.join(map(str, sorted(U)))};{','.join(map(str, sorted(h)))}")
        return out

    def dumps(self) -> str:
        return "\n".join(self.lines()) + "\n"

    @classmethod
    def loads(cls, text: str, n: int, d: int, r: int) -> "ShsTable":
        entries = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            F, U, H = line.strip().split(";")
            ints = [int(x) for x in U.split(",") if x]
            entries[(int(F), frozenset(ints))] = tuple(sorted(int(x) for x in H.split(",") if x))
        return cls(n, d, r, entries)


def shs_from_candidate_sets(candidates: Mapping, n: int, d: int, r: int) -> ShsTable:
    """D(F, U) = cand(F) minus U when U lies inside cand(F); otherwise the
    first d available candidates by index."""
    cand = {}
    for F in range(1, n + 1):
        c = frozenset(candidates.get(F, ()))
        if len(c) != d + r or F in c or not c <= set(range(1, n + 1)):
            raise ConstructionError(f"candidate set of {F} must be {d + r} other nodes, got {sorted(c)}")
        cand[F] = c
    entries = {}
    for F in range(1, n + 1):
        for U in unavailable_sets(n, r, F):
            if U <= cand[F]:
                entries[(F, U)] = tuple(sorted(cand[F] - U))
            else:
                entries[(F, U)] = tuple(x for x in sorted(cand[F]) if x not in U)[:d]
    return ShsTable(n, d, r, entries, cand)


def random_shs_table(n: int, d: int, r: int, rng: random.Random) -> ShsTable:
    entries = {}
    for F in range(1, n + 1):
        for U in unavailable_sets(n, r, F):
            pool = available(n, F, U)
            entries[(F, U)] = tuple(sorted(rng.sample(pool, d)))
    return ShsTable(n, d, r, entries)


def all_shs_tables(n: int, d: int, r: int) -> Iterator[ShsTable]:
    """Every stationary table (3**20 of them for (5, *, 2, 1))."""
    keys = [(F, U) for F in range(1, n + 1) for U in unavailable_sets(n, r, F)]
    choices = [list(combinations(available(n, F, U), d)) for F, U in keys]

    def rec(i, acc):
        if i == len(keys):
            yield ShsTable(n, d, r, dict(zip(keys, acc)))
            return
        for c in choices[i]:
            yield from rec(i + 1, acc + [c])

    yield from rec(0, [])


# -- modified family helper selection ----------------------------------------


@dataclass(frozen=True)
class FamilyStructure:
    n: int
    d: int
    r: int
    families: tuple          # complete families, in index order
    incomplete: tuple        # possibly empty
    candidates: Mapping = field(compare=False)

    @property
    def family_size(self) -> int:
        return self.n - self.d - self.r

    def family_of(self, node: int) -> int:
        """1..c for complete families, 0 for the incomplete one."""
        for i, fam in enumerate(self.families, start=1):
            if node in fam:
                return i
        return 0

    def table(self) -> ShsTable:
        return shs_from_candidate_sets(self.candidates, self.n, self.d, self.r)


def mfhs_build(n: int, d: int, r: int) -> FamilyStructure:
    bad = [v for v in validate_params(n, 1, d, r) if "k" not in v]
    if bad:
        raise ConstructionError(f"(n,d,r)=({n},{d},{r}) violates: " + ", ".join(bad))
    size = n - d - r
    c = n // size
    families = tuple(tuple(range(i * size + 1, (i + 1) * size + 1)) for i in range(c))
    incomplete = tuple(range(c * size + 1, n + 1))
    cand = {}
    for fam in families:
        outside = frozenset(range(1, n + 1)) - set(fam)
        for F in fam:
            cand[F] = outside
    for F in incomplete:
        cand[F] = frozenset(range(1, d + r + 1))
    return FamilyStructure(n, d, r, families, incomplete, cand)


class MfhsPolicy:
    def __init__(self, structure: FamilyStructure):
        self.structure = structure
        self.table = structure.table()

    def decide(self, graph, failed, unavailable) -> tuple:
        return self.table(failed, unavailable)


# -- clique-avoiding dynamic selection ---------------------------------------


def parent_pairs(graph: FlowGraph, artificial: Iterable = ()) -> set:
    """(parent, child) pairs among current instances.

    ``artificial`` pairs hold while both endpoints are still on their
    initial instances.
    """
    pairs = {(x, y) for y in graph.nodes() for x in graph.helpers_of(y)}
    for x, y in artificial:
        if not graph.is_repaired(x) and not graph.is_repaired(y):
            pairs.add((x, y))
    return pairs


def age_key(graph: FlowGraph, artificial: Iterable = ()):
    """Sort key oldest-first; artificial parents count as older than children."""
    parents = {x for x, _ in artificial}

    def key(x):
        t = graph.repair_time(x)
        if t == 0:
            return (-1 if x in parents and not graph.is_repaired(x) else 0, x)
        return (t, x)

    return key


def has_triangle(graph: FlowGraph, artificial: Iterable = ()) -> Optional[tuple]:
    """An ordered (x, y, z) with x parent of y and z and y parent of z, if any."""
    pairs = parent_pairs(graph, artificial)
    for x, y in pairs:
        for z in graph.nodes():
            if (x, z) in pairs and (y, z) in pairs:
                return (x, y, z)
    return None


@dataclass
class CliqueAvoidingPolicy:
    """Pick the lexicographically smallest available helper pair that is not
    a parent/child pair, so no parent triangle ever forms."""

    artificial: frozenset = frozenset()

    def decide(self, graph, failed, unavailable) -> tuple:
        p = graph.params
        if p.d != 2:
            raise UnsupportedError("clique-avoiding selection needs d = 2")
        pool = available(p.n, failed, unavailable)
        pairs = parent_pairs(graph, self.artificial)
        for x, y in combinations(pool, 2):
            if (x, y) not in pairs and (y, x) not in pairs:
                return (x, y)
        # Unreachable while the no-triangle invariant holds and |pool| >= 3.
        raise ProtocolError(f"no parent-free pair among {pool}")


CA_ARTIFICIAL_PARENTS = frozenset((p, c) for p in (1, 2) for c in (3, 4, 5))


def ca_select(graph: FlowGraph, failed: int, unavailable, artificial=CA_ARTIFICIAL_PARENTS) -> tuple:
    return CliqueAvoidingPolicy(frozenset(artificial)).decide(graph, failed, frozenset(unavailable))


# -- seeded random dynamic policies ------------------------------------------


@dataclass
class RandomDynamicPolicy:
    """History-dependent random choice, reproducible from (seed, history)."""

    seed: int

    def decide(self, graph, failed, unavailable) -> tuple:
        key = "|".join([str(self.seed), *(r.line() for r in graph.history), str(failed),
                        ",".join(map(str, sorted(unavailable)))])
        rng = random.Random(key)
        pool = available(graph.params.n, failed, unavailable)
        return tuple(sorted(rng.sample(pool, graph.params.d)))


# -- duplication scheme for d = r = 1 ----------------------------------------


@dataclass(frozen=True)
class DuplicationScheme:
    """Replicated two-packet file: each group stores one coded packet."""

    n: int
    k: int
    groups: tuple
    group_packets: tuple      # GF(2)^2 vectors, one per group
    table: ShsTable

    dim = 2

    def group_of(self, node: int) -> int:
        for i, g in enumerate(self.groups):
            if node in g:
                return i
        raise KeyError(node)

    def packets(self, node: int) -> tuple:
        return (self.group_packets[self.group_of(node)],)

    def node_packets(self) -> dict:
        return {x: self.packets(x) for x in range(1, self.n + 1)}

    def reconstructs(self, nodes: Iterable[int]) -> bool:
        return gf2.rank([v for x in nodes for v in self.packets(x)], self.dim) == self.dim


XOR_PACKETS = (gf2.vec("10"), gf2.vec("01"), gf2.vec("11"))


def duplication_scheme_build(n: int, k: int) -> DuplicationScheme:
    d = r = 1
    bad = validate_params(n, k, d, r)
    if bad:
        raise ConstructionError(f"({n},{k},1,1) violates: " + ", ".join(bad))
    if not ((k == 4 and n % 3 == 0) or k >= 5):
        raise ConstructionError("needs k = 4 with n divisible by 3, or k >= 5")
    fours = n % 3
    threes = n // 3 - fours
    if threes < 0 or n // 3 < 2:
        raise ConstructionError(f"n={n} cannot be split into at least two groups")
    if n // 3 > len(XOR_PACKETS):
        raise UnsupportedError(
            f"{n // 3} groups need a non-binary MDS layer; XOR parity covers at most 3"
        )
    sizes = [3] * threes + [4] * fours
    groups, start = [], 1
    for s in sizes:
        groups.append(tuple(range(start, start + s)))
        start += s
    entries = {}
    for g in groups:
        for F in g:
            for U in unavailable_sets(n, r, F):
                mate = min(x for x in g if x != F and x not in U)
                entries[(F, U)] = (mate,)
    table = ShsTable(n, d, r, entries)
    return DuplicationScheme(n, k, tuple(groups), XOR_PACKETS[: len(groups)], table)
