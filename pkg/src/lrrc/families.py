"""Family index vectors and the MFHS min-cut expressions.

A family index vector labels node j with its family number (1..c for complete
families, 0 for the incomplete one).  Members of the last complete family
that are *not* candidate helpers of the incomplete family carry a negative
label.  Permutations of that vector drive the ``y`` profile, whose sum of
``min((d - y_i)^+ beta, alpha)`` terms is the MFHS min-cut.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from fractions import Fraction
from itertools import product
from math import factorial, prod
from typing import Iterable, Iterator, Optional, Sequence

from .errors import BudgetError, ConstructionError, UnprotectableError
from .params import SystemParams, cut_value, min_beta, validate_params
from .policies import FamilyStructure, mfhs_build

DEFAULT_CAP = 2_000_000


def family_index_vector(n: int, d: int, r: int) -> tuple:
    bad = [v for v in validate_params(n, 1, d, r) if "k" not in v]
    if bad:
        raise ConstructionError(f"(n,d,r)=({n},{d},{r}) violates: " + ", ".join(bad))
    fs = mfhs_build(n, d, r)
    helpers_of_incomplete = set(range(1, d + r + 1))
    c = len(fs.families)
    out = []
    for x in range(1, n + 1):
        fam = fs.family_of(x)
        if fam == c and fs.incomplete and x not in helpers_of_incomplete:
            out.append(-fam)
        else:
            out.append(fam)
    return tuple(out)


def rfip(n: int, d: int, r: int) -> tuple:
    """Rotating family index permutation: fill a (n-d-r)-row table column by
    column with the family index vector, then read it row by row."""
    fi = family_index_vector(n, d, r)
    rows = n - d - r
    cols = -(-n // rows)
    table = [[None] * cols for _ in range(rows)]
    for j, label in enumerate(fi):
        table[j % rows][j // rows] = label
    return tuple(x for row in table for x in row if x is not None)


def y_value(pi: Sequence[int], i: int) -> int:
    """Number of earlier positions counted against position ``i`` (1-based)."""
    if not 1 <= i <= len(pi):
        raise IndexError(f"position {i} outside 1..{len(pi)}")
    cur = pi[i - 1]
    if cur == 0:
        return sum(1 for x in pi[: i - 1] if x > 0)
    return sum(1 for x in pi[: i - 1] if abs(x) != abs(cur))


def y_profile(pi: Sequence[int], k: int) -> tuple:
    return tuple(y_value(pi, i) for i in range(1, k + 1))


def z_value(p: Sequence[int], i: int, structure) -> int:
    """Distinct earlier entries of ``p`` inside the candidate set of ``p_i``.

    ``structure`` is a :class:`FamilyStructure` or any mapping node -> set.
    """
    if not 1 <= i <= len(p):
        raise IndexError(f"position {i} outside 1..{len(p)}")
    cands = structure.candidates if isinstance(structure, FamilyStructure) else structure
    if any(x not in cands for x in p):
        raise IndexError(f"node index in {tuple(p)} has no candidate set")
    cand = cands[p[i - 1]]
    return len({x for x in p[: i - 1] if x in cand})


def z_profile(p: Sequence[int], k: int, structure) -> tuple:
    return tuple(z_value(p, i, structure) for i in range(1, k + 1))


def profile_value(profile: Sequence[int], d: int, alpha, beta) -> Fraction:
    return cut_value([max(d - y, 0) for y in profile], alpha, beta)


# -- enumeration --------------------------------------------------------------


def multiset_arrangements(items: Sequence[int], length: int) -> Iterator[tuple]:
    """Distinct length-``length`` arrangements of a multiset, sorted order."""
    counts = Counter(items)
    keys = sorted(counts)
    acc: list = []

    def rec():
        if len(acc) == length:
            yield tuple(acc)
            return
        for key in keys:
            if counts[key]:
                counts[key] -= 1
                acc.append(key)
                yield from rec()
                acc.pop()
                counts[key] += 1

    yield from rec()


def count_multiset_permutations(items: Sequence[int]) -> int:
    counts = Counter(items)
    return factorial(len(items)) // prod(factorial(c) for c in counts.values())


def y_profiles(n: int, k: int, d: int, r: int, cap: int = DEFAULT_CAP) -> set:
    """All distinct y profiles over every family index permutation.

    Only the first k positions influence the profile, so distinct k-prefixes
    of the multiset are enumerated; ``cap`` bounds the full permutation count.
    """
    fi = family_index_vector(n, d, r)
    total = count_multiset_permutations(fi)
    if total > cap:
        raise BudgetError(f"{total} family index permutations exceed cap {cap}")
    return {y_profile(prefix, k) for prefix in multiset_arrangements(fi, k)}


def z_profiles(n: int, k: int, d: int, r: int, cap: int = DEFAULT_CAP) -> set:
    if n**k > cap:
        raise BudgetError(f"{n}^{k} node vectors exceed cap {cap}")
    fs = mfhs_build(n, d, r)
    cand = [None] + [fs.candidates[x] for x in range(1, n + 1)]
    out = set()
    for p in product(range(1, n + 1), repeat=k):
        seen: set = set()
        prof = []
        for x in p:
            prof.append(len(seen & cand[x]))
            seen.add(x)
        out.add(tuple(prof))
    return out


def mfhs_tradeoff_value(params: SystemParams, mode: str = "exhaustive", cap: int = DEFAULT_CAP,
                        alpha=None, beta=None) -> Fraction:
    """Min over family index permutations (``exhaustive``) or the value at
    the RFIP (``rfip``) of sum min((d - y_i)^+ beta, alpha).

    ``alpha``/``beta`` override the params; storage stays uncapped when
    neither supplies alpha.
    """
    n, k, d, r = params.tuple
    alpha = params.alpha if alpha is None else Fraction(alpha)
    beta = params.beta if beta is None else Fraction(beta)
    if beta is None:
        raise ValueError("beta is not set")
    if mode == "rfip":
        profiles = {y_profile(rfip(n, d, r), k)}
    elif mode == "exhaustive":
        profiles = y_profiles(n, k, d, r, cap)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return min(profile_value(y, d, alpha, beta) for y in profiles)


def minimizing_permutation(params: SystemParams, cap: int = DEFAULT_CAP, alpha=None, beta=None) -> tuple:
    """A full family index permutation attaining the exhaustive minimum
    (first in sorted enumeration order)."""
    n, k, d, r = params.tuple
    alpha = params.alpha if alpha is None else Fraction(alpha)
    beta = params.beta if beta is None else Fraction(beta)
    fi = family_index_vector(n, d, r)
    if count_multiset_permutations(fi) > cap:
        raise BudgetError("family index permutations exceed cap")
    best = None
    for prefix in multiset_arrangements(fi, k):
        v = profile_value(y_profile(prefix, k), d, alpha, beta)
        if best is None or v < best[0]:
            best = (v, prefix)
    prefix = best[1]
    rest = Counter(fi) - Counter(prefix)
    return prefix + tuple(sorted(rest.elements()))


def zp_lower_bound(params: SystemParams, cap: int = DEFAULT_CAP, alpha=None, beta=None) -> Fraction:
    """Brute-force min over p in [n]^k of sum min((d - z_i(p))^+ beta, alpha)."""
    n, k, d, r = params.tuple
    alpha = params.alpha if alpha is None else Fraction(alpha)
    beta = params.beta if beta is None else Fraction(beta)
    if beta is None:
        raise ValueError("beta is not set")
    return min(profile_value(z, d, alpha, beta) for z in z_profiles(n, k, d, r, cap))


def mbr_denominator(n: int, k: int, d: int, r: int) -> int:
    return sum(max(d - y, 0) for y in y_profile(rfip(n, d, r), k))


def mfhs_mbr_point(params: SystemParams) -> tuple:
    """(alpha, beta) with alpha = d*beta = d*M / sum (d - y_i(RFIP))^+."""
    denom = mbr_denominator(*params.tuple)
    if denom == 0:
        raise UnprotectableError("zero MBR denominator")
    if params.file_size is None:
        raise ValueError("file_size is not set")
    beta = params.file_size / denom
    return params.d * beta, beta


def rfip_monotonicity(n: int, k: int, d: int, r: int) -> str:
    """Direction of y_i along the RFIP: 'nondecreasing', 'nonincreasing',
    'constant' or 'mixed'."""
    ys = y_profile(rfip(n, d, r), k)
    up = all(a <= b for a, b in zip(ys, ys[1:]))
    down = all(a >= b for a, b in zip(ys, ys[1:]))
    if up and down:
        return "constant"
    return "nondecreasing" if up else "nonincreasing" if down else "mixed"


def tradeoff_min_beta(profiles: Iterable[Sequence[int]], d: int, alpha, file_size) -> Fraction:
    """Smallest beta making every profile's cut reach ``file_size``."""
    return max(min_beta([max(d - y, 0) for y in prof], alpha, file_size) for prof in profiles)


def tradeoff_csv(params: SystemParams, grid: Iterable[tuple], mode: str = "exhaustive",
                 cap: int = DEFAULT_CAP) -> str:
    """CSV rows ``alpha, beta, value`` (each as num, den columns)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha_num", "alpha_den", "beta_num", "beta_den", "value_num", "value_den"])
    for a, b in grid:
        a, b = Fraction(a), Fraction(b)
        v = mfhs_tradeoff_value(params, mode, cap, alpha=a, beta=b)
        w.writerow([a.numerator, a.denominator, b.numerator, b.denominator, v.numerator, v.denominator])
    return buf.getvalue()
