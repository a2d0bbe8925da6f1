"""GF(2) linear algebra on packet vectors stored as int bitsets.

A packet vector of dimension ``dim`` is an int in ``[0, 2**dim)``.  Coordinate
``X1`` is the most significant bit, so ``vec("1100", ...)`` is ``X1 + X2`` and
integer order coincides with lexicographic order of the coordinate tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import DimensionError


def vec(bits: str) -> int:
    """Parse a coordinate string such as ``"1010"``."""
    return int(bits, 2)


def unit(i: int, dim: int) -> int:
    """Unit vector X_i (1-based)."""
    if not 1 <= i <= dim:
        raise DimensionError(f"X{i} outside dimension {dim}")
    return 1 << (dim - i)


def fmt(v: int, dim: int) -> str:
    return format(v, f"0{dim}b")


def _check(vectors: Iterable[int], dim: int) -> list[int]:
    out = list(vectors)
    for v in out:
        if v < 0 or v >> dim:
            raise DimensionError(f"vector {v:#x} does not fit dimension {dim}")
    return out


def reduce_basis(vectors: Iterable[int], dim: int) -> tuple[int, ...]:
    """Reduced row-echelon basis, sorted by decreasing pivot bit."""
    rows: list[int] = []
    for v in _check(vectors, dim):
        for b in rows:
            if v ^ b < v:
                v ^= b
        if v:
            top = v.bit_length() - 1
            rows = [b ^ v if (b >> top) & 1 else b for b in rows]
            rows.append(v)
    return tuple(sorted(rows, reverse=True))


def rank(vectors: Iterable[int], dim: int) -> int:
    return len(reduce_basis(vectors, dim))


@dataclass(frozen=True)
class Subspace:
    """Subspace of GF(2)^dim held as a canonical reduced echelon basis."""

    dim: int
    basis: tuple[int, ...]

    @classmethod
    def span(cls, vectors: Iterable[int], dim: int) -> "Subspace":
        return cls(dim, reduce_basis(vectors, dim))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __contains__(self, v: int) -> bool:
        return in_span(v, self)

    def elements(self) -> list[int]:
        """All 2**rank members in increasing order."""
        out = [0]
        for b in self.basis:
            out += [x ^ b for x in out]
        return sorted(out)

    def nonzero(self) -> list[int]:
        return self.elements()[1:]


def _same_dim(*spaces: Subspace) -> int:
    dims = {s.dim for s in spaces}
    if len(dims) != 1:
        raise DimensionError(f"mixed dimensions {sorted(dims)}")
    return dims.pop()


def in_span(v: int, s: Subspace) -> bool:
    _check([v], s.dim)
    for b in s.basis:
        if v ^ b < v:
            v ^= b
    return v == 0


def sum_space(a: Subspace, b: Subspace) -> Subspace:
    dim = _same_dim(a, b)
    return Subspace.span(a.basis + b.basis, dim)


def intersection_rank(a: Subspace, b: Subspace) -> int:
    return a.rank + b.rank - sum_space(a, b).rank


def solve(target: int, vectors: Sequence[int], dim: int) -> Optional[int]:
    """Express ``target`` as an XOR of ``vectors``.

    Returns a selection mask (bit j set means ``vectors[j]`` is used), or None
    when ``target`` is outside their span.
    """
    _check(list(vectors) + [target], dim)
    # Each row carries (vector, mask of original vectors combined into it).
    rows: list[tuple[int, int]] = []
    for j, v in enumerate(vectors):
        m = 1 << j
        for b, bm in rows:
            if v ^ b < v:
                v, m = v ^ b, m ^ bm
        if v:
            rows.append((v, m))
            rows.sort(reverse=True)
    mask = 0
    for b, bm in rows:
        if target ^ b < target:
            target, mask = target ^ b, mask ^ bm
    return mask if target == 0 else None
