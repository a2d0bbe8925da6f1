"""Decide whether a parameter tuple is indifferent to helper selection."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Iterable, Iterator

from .errors import ParamError
from .params import ceil_div, validate_params


class Verdict(str, Enum):
    INDIFFERENT = "Indifferent"
    IMPROVABLE_BY_SHS = "ImprovableBySHS"
    IMPROVABLE_BY_DHS = "ImprovableByDHS"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class Classification:
    n: int
    k: int
    d: int
    r: int
    verdict: Verdict
    rule: str

    def row(self) -> dict:
        out = asdict(self)
        out["verdict"] = self.verdict.value
        return out


def blind_is_optimal(n: int, k: int, d: int, r: int) -> bool:
    """k <= ceil((n - r) / (n - d - r))."""
    return k <= ceil_div(n - r, n - d - r)


def stationary_beats_blind(n: int, k: int, d: int, r: int) -> bool:
    """min(d + 1, k) > ceil(n / (n - d - r))."""
    return min(d + 1, k) > ceil_div(n, n - d - r)


def classify(n: int, k: int, d: int, r: int) -> Classification:
    bad = validate_params(n, k, d, r)
    if bad:
        raise ParamError(f"({n},{k},{d},{r}) violates: " + ", ".join(bad))

    def out(verdict, rule):
        return Classification(n, k, d, r, verdict, rule)

    if blind_is_optimal(n, k, d, r):
        return out(Verdict.INDIFFERENT, "k <= ceil((n-r)/(n-d-r))")
    if stationary_beats_blind(n, k, d, r):
        return out(Verdict.IMPROVABLE_BY_SHS, "min(d+1,k) > ceil(n/(n-d-r))")
    if r == 0:
        if d == 1 and k == 3 and n % 2 == 1:
            return out(Verdict.INDIFFERENT, "r=0: d=1, k=3, n odd")
        return out(Verdict.IMPROVABLE_BY_SHS, "r=0: neither optimality condition holds")
    if r == 1 and d == 1:
        if k == 3:
            return out(Verdict.INDIFFERENT, "r=d=1: k=3 (3-tree)")
        if k == 4 and n % 3 != 0:
            return out(Verdict.INDIFFERENT, "r=d=1: k=4, n mod 3 != 0 (4-tree)")
        return out(Verdict.IMPROVABLE_BY_SHS, "r=d=1: duplication scheme")
    if r == 1 and d == 2:
        return out(Verdict.IMPROVABLE_BY_DHS, "r=1, d=2: clique-avoiding scheme")
    return out(Verdict.UNDECIDED, "no condition applies")


def valid_tuples(ns: Iterable[int], ks: Iterable[int], ds: Iterable[int],
                 rs: Iterable[int]) -> Iterator[tuple]:
    ks, ds, rs = list(ks), list(ds), list(rs)
    for n in ns:
        for r in rs:
            for d in ds:
                for k in ks:
                    if not validate_params(n, k, d, r):
                        yield (n, k, d, r)


def scan(ns: Iterable[int], ks: Iterable[int], ds: Iterable[int], rs: Iterable[int]) -> list:
    """Classify every valid tuple in the product of the ranges."""
    return [classify(*t) for t in valid_tuples(ns, ks, ds, rs)]


def undecided(rows: Iterable[Classification]) -> set:
    return {(c.n, c.k, c.d, c.r) for c in rows if c.verdict is Verdict.UNDECIDED}


def gap_tuples(rows: Iterable[Classification]) -> set:
    """Tuples where neither general inequality decides."""
    return {
        (c.n, c.k, c.d, c.r)
        for c in rows
        if not blind_is_optimal(c.n, c.k, c.d, c.r) and not stationary_beats_blind(c.n, c.k, c.d, c.r)
    }


FIELDS = ("n", "k", "d", "r", "verdict", "rule")


def to_csv(rows: Iterable[Classification]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, FIELDS, lineterminator="\n")
    w.writeheader()
    for c in rows:
        w.writerow(c.row())
    return buf.getvalue()


def to_json(rows: Iterable[Classification]) -> str:
    return json.dumps([c.row() for c in rows], indent=1) + "\n"
