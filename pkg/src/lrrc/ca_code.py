"""Explicit binary (alpha, beta, M) = (2, 1, 4) code under clique-avoiding repair.

Five nodes each hold two coded packets of a four-symbol file.  Helpers come
from :func:`lrrc.policies.ca_select`; the packet each helper forwards is
chosen so that every parent/child pair keeps rank 3 and every other pair
keeps rank 4, which makes any three nodes sufficient to decode.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from . import gf2
from .errors import InvariantViolation, ProtocolError, ReconstructionError
from .gf2 import Subspace, sum_space
from .ifg import FlowGraph, grow_repair, new_intact
from .params import SystemParams
from .policies import CA_ARTIFICIAL_PARENTS, ca_select, has_triangle, parent_pairs

DIM = 4
X1, X2, X3, X4 = (gf2.unit(i, DIM) for i in range(1, 5))
NODES = (1, 2, 3, 4, 5)
# Tradeoff reached under clique-avoiding repair: 2 * min(2 beta, alpha) >= M.
CA_CUT_COEFFS = (2, 2)


@dataclass(frozen=True)
class CAState:
    packets: tuple          # node - 1 -> (v1, v2)
    graph: FlowGraph

    @property
    def tau(self) -> int:
        return self.graph.time

    def span(self, node: int) -> Subspace:
        return Subspace.span(self.packets[node - 1], DIM)

    def parents(self) -> set:
        return parent_pairs(self.graph, CA_ARTIFICIAL_PARENTS)

    def dump(self) -> str:
        """Five ``node: v1 v2`` lines followed by ``parent child`` edges."""
        lines = [
            f"{x}: {gf2.fmt(a, DIM)} {gf2.fmt(b, DIM)}" for x, (a, b) in zip(NODES, self.packets)
        ]
        lines += [f"{p} {c}" for p, c in sorted(self.parents())]
        return "\n".join(lines) + "\n"


def ca_init(k: int = 3) -> CAState:
    params = SystemParams(5, k, 2, 1, alpha=2, beta=1, file_size=4)
    packets = (
        (X1, X2),
        (X3, X4),
        (X1, X3),
        (X2, X4),
        (X1 ^ X2, X3 ^ X4),
    )
    return CAState(packets, new_intact(params))


def choose_packets(state: CAState, b: int, c: int, d: int, e: int) -> tuple:
    """(v_b, v_c) for helpers b, c with non-helpers d, e."""
    B, C, D, E = (state.span(x) for x in (b, c, d, e))
    CD, CE = sum_space(C, D), sum_space(C, E)
    S1 = D if CD.rank == DIM else CD
    S2 = E if CE.rank == DIM else CE
    vb = next((v for v in B.nonzero() if v not in S1 and v not in S2), None)
    if vb is None:
        raise InvariantViolation(f"no admissible packet at helper {b}")
    if vb in D or vb in E:
        raise InvariantViolation(f"packet {gf2.fmt(vb, DIM)} from {b} is already on {d} or {e}")
    Vb = Subspace.span([vb], DIM)
    bD, bE = sum_space(Vb, D), sum_space(Vb, E)
    vc = next((v for v in C.nonzero() if v not in bD and v not in bE), None)
    if vc is None:
        raise InvariantViolation(f"no admissible packet at helper {c}")
    return vb, vc


def ca_repair(state: CAState, failed: int, unavailable: Iterable[int] = ()) -> CAState:
    U = frozenset(unavailable)
    if len(U) > 1 or failed in U:
        raise ProtocolError(f"bad repair request F={failed}, U={sorted(U)}")
    b, c = ca_select(state.graph, failed, U)
    d, e = (x for x in NODES if x not in (failed, b, c))
    vb, vc = choose_packets(state, b, c, d, e)
    packets = list(state.packets)
    packets[failed - 1] = (vb, vc)
    new = CAState(tuple(packets), grow_repair(state.graph, failed, U, (b, c)))
    audit(new)
    return new


def pair_ranks(state: CAState) -> dict:
    return {
        (x, y): gf2.rank(state.packets[x - 1] + state.packets[y - 1], DIM)
        for x, y in combinations(NODES, 2)
    }


def audit(state: CAState) -> None:
    """Raise unless the rank dichotomy, decodability of every triple and the
    no-triangle property all hold."""
    parents = state.parents()
    for (x, y), rk in pair_ranks(state).items():
        related = (x, y) in parents or (y, x) in parents
        want = 3 if related else 4
        if rk != want:
            raise InvariantViolation(f"pair ({x},{y}) has rank {rk}, expected {want}")
    for triple in combinations(NODES, 3):
        if gf2.rank([v for x in triple for v in state.packets[x - 1]], DIM) != DIM:
            raise InvariantViolation(f"triple {triple} cannot decode")
    tri = has_triangle(state.graph, CA_ARTIFICIAL_PARENTS)
    if tri:
        raise InvariantViolation(f"parent triangle {tri}")


def ca_reconstruct(state: CAState, nodes: Sequence[int]) -> tuple:
    """Decoding recipe for X1..X4 from the packets on ``nodes``.

    Returns one selection mask per file symbol over the stored packets of
    ``nodes`` (listed node by node, two packets each).
    """
    stored = [v for x in nodes for v in state.packets[x - 1]]
    masks = tuple(gf2.solve(u, stored, DIM) for u in (X1, X2, X3, X4))
    if any(m is None for m in masks):
        raise ReconstructionError(
            f"nodes {tuple(nodes)} span rank {gf2.rank(stored, DIM)} < {DIM}"
        )
    return masks


def encode(vector: int, symbols: Sequence[bytes]) -> bytes:
    out = bytes(len(symbols[0]))
    for i, sym in enumerate(symbols):
        if (vector >> (DIM - 1 - i)) & 1:
            out = bytes(a ^ b for a, b in zip(out, sym))
    return out


def recover_file(state: CAState, nodes: Sequence[int], symbols: Sequence[bytes]) -> list:
    """Encode ``symbols`` with the stored vectors, then decode from ``nodes``."""
    stored = [encode(v, symbols) for x in nodes for v in state.packets[x - 1]]
    out = []
    for mask in ca_reconstruct(state, nodes):
        acc = bytes(len(symbols[0]))
        for j, payload in enumerate(stored):
            if (mask >> j) & 1:
                acc = bytes(a ^ b for a, b in zip(acc, payload))
        out.append(acc)
    return out


def actual_k_star(node_packets: dict, dim: int) -> int:
    """Smallest k for which every k-subset of nodes spans the whole file."""
    nodes = sorted(node_packets)
    for k in range(1, len(nodes) + 1):
        if all(
            gf2.rank([v for x in sub for v in node_packets[x]], dim) == dim
            for sub in combinations(nodes, k)
        ):
            return k
    raise ReconstructionError("even all nodes together cannot decode")


def state_packets(state: CAState) -> dict:
    return {x: state.packets[x - 1] for x in NODES}


def candidate_unavailable(state: CAState, failed: int) -> list:
    return [frozenset()] + [frozenset({u}) for u in NODES if u != failed]


def _badness(state: CAState) -> tuple:
    # More parent pairs means more rank-3 pairs; smaller minimum triple
    # rank would be a violation.
    ranks = pair_ranks(state)
    low = sum(1 for v in ranks.values() if v < DIM)
    return (low, -min(ranks.values()))


def worst_case_repair(state: CAState, failed: int) -> tuple:
    """Try every admissible U and keep the outcome that stresses the code most.

    An invariant violation under any U propagates immediately.
    """
    best = None
    for U in candidate_unavailable(state, failed):
        nxt = ca_repair(state, failed, U)
        score = _badness(nxt)
        if best is None or score > best[0]:
            best = (score, U, nxt)
    return best[1], best[2]


def simulate(steps: int, seed: int, adversarial_u: bool = False, k: int = 3,
             on_step=None) -> CAState:
    """Random failures with random or worst-case unavailability; audits every step."""
    rng = random.Random(seed)
    state = ca_init(k)
    audit(state)
    for _ in range(steps):
        failed = rng.choice(NODES)
        if adversarial_u:
            U, state = worst_case_repair(state, failed)
        else:
            U = rng.choice(candidate_unavailable(state, failed))
            state = ca_repair(state, failed, U)
        if on_step is not None:
            on_step(state, failed, U)
    return state
