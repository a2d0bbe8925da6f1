"""System parameters and closed-form storage/bandwidth tradeoffs.

All quantities are exact :class:`fractions.Fraction` values.  Storage ``alpha``
may be passed as ``None`` wherever a cut value is evaluated; that means
storage is unconstrained and the ``min(., alpha)`` cap is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .errors import ParamError, UnprotectableError

Rational = Union[int, Fraction, str]


def as_fraction(x: Optional[Rational]) -> Optional[Fraction]:
    if x is None:
        return None
    value = Fraction(x)
    if value < 0:
        raise ParamError(f"negative quantity {x!r}")
    return value


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def validate_params(n: int, k: int, d: int, r: int) -> list[str]:
    """Return the violated range conditions; an empty list means admissible."""
    violations = []
    if not 2 <= n:
        violations.append("2 <= n")
    if not 1 <= k:
        violations.append("1 <= k")
    if not k <= n - 1:
        violations.append("k <= n-1")
    if not 1 <= d:
        violations.append("1 <= d")
    if not d <= n - 1 - r:
        violations.append("d <= n-1-r")
    if r < 0:
        violations.append("0 <= r")
    return violations


@dataclass(frozen=True)
class SystemParams:
    n: int
    k: int
    d: int
    r: int = 0
    alpha: Optional[Fraction] = field(default=None)
    beta: Optional[Fraction] = field(default=None)
    file_size: Optional[Fraction] = field(default=None)

    def __post_init__(self):
        bad = validate_params(self.n, self.k, self.d, self.r)
        if bad:
            raise ParamError(
                f"({self.n},{self.k},{self.d},{self.r}) violates: " + ", ".join(bad)
            )
        for name in ("alpha", "beta", "file_size"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))

    @property
    def gamma(self) -> Fraction:
        """Total repair bandwidth d * beta."""
        return self.d * self._need("beta")

    @property
    def tuple(self) -> tuple[int, int, int, int]:
        return (self.n, self.k, self.d, self.r)

    def with_point(self, alpha=None, beta=None, file_size=None) -> "SystemParams":
        changes = {}
        if alpha is not None:
            changes["alpha"] = alpha
        if beta is not None:
            changes["beta"] = beta
        if file_size is not None:
            changes["file_size"] = file_size
        return replace(self, **changes)

    def _need(self, name: str) -> Fraction:
        value = getattr(self, name)
        if value is None:
            raise ParamError(f"{name} is not set")
        return value


class CutCoefficients(tuple):
    """Multipliers c_1..c_k of beta in each min-term of a cut expression."""

    def __new__(cls, coeffs: Iterable[int], d: Optional[int] = None):
        coeffs = tuple(int(c) for c in coeffs)
        if any(c < 0 for c in coeffs):
            raise ParamError("cut coefficients must be non-negative")
        if d is not None and any(c > d for c in coeffs):
            raise ParamError(f"cut coefficient exceeds d={d}")
        return super().__new__(cls, coeffs)


class ExtremePoints(NamedTuple):
    alpha_mbr: Fraction
    beta_mbr: Fraction
    alpha_msr: Fraction
    beta_msr: Fraction


def bhs_coefficients(k: int, d: int) -> CutCoefficients:
    """(d-i)^+ for i = 0..k-1."""
    return CutCoefficients((max(d - i, 0) for i in range(k)), d)


def cut_value(coeffs: Sequence[int], alpha: Optional[Rational], beta: Rational) -> Fraction:
    """Sum of min(c_i * beta, alpha); ``alpha=None`` drops the cap."""
    beta = Fraction(beta)
    if alpha is None:
        return sum((c * beta for c in coeffs), Fraction(0))
    alpha = Fraction(alpha)
    return sum((min(c * beta, alpha) for c in coeffs), Fraction(0))


def bhs_mincut_value(params: SystemParams) -> Fraction:
    """Worst-case min-cut over all blindly grown flow graphs."""
    return cut_value(bhs_coefficients(params.k, params.d), params.alpha, params._need("beta"))


def min_beta(coeffs: Sequence[int], alpha: Optional[Rational], file_size: Rational) -> Fraction:
    """Smallest beta with ``cut_value(coeffs, alpha, beta) >= file_size``.

    Solved exactly on the piecewise-linear curve.  Raises
    :class:`UnprotectableError` when no finite beta suffices.
    """
    M = Fraction(file_size)
    positive = sorted(c for c in coeffs if c > 0)
    if M <= 0:
        return Fraction(0)
    if not positive:
        raise UnprotectableError("all cut coefficients are zero")
    if alpha is None:
        return M / sum(positive)
    alpha = Fraction(alpha)
    if alpha * len(positive) < M:
        raise UnprotectableError(f"alpha={alpha} cannot carry file size {M}")
    # Breakpoints alpha/c in increasing beta: the largest c saturates first.
    lo = Fraction(0)
    saturated = 0
    active = sum(positive)
    for c in sorted(positive, reverse=True):
        hi = alpha / c
        # On [lo, hi] the value is saturated*alpha + active*beta.
        beta = (M - saturated * alpha) / active
        if beta <= hi:
            return max(beta, lo)
        lo = hi
        saturated += 1
        active -= c
    return lo


def extreme_points(coeffs: Sequence[int], file_size: Rational, d: Optional[int] = None) -> ExtremePoints:
    """MBR and MSR corners of the tradeoff ``sum min(c_i beta, alpha) >= M``."""
    coeffs = CutCoefficients(coeffs, d)
    M = Fraction(file_size)
    total = sum(coeffs)
    if total == 0:
        raise UnprotectableError("all cut coefficients are zero")
    beta_mbr = M / total
    alpha_mbr = max(coeffs) * beta_mbr
    alpha_msr = M / sum(1 for c in coeffs if c > 0)
    beta_msr = min_beta(coeffs, alpha_msr, M)
    return ExtremePoints(alpha_mbr, beta_mbr, alpha_msr, beta_msr)


def bhs_mbr_point(params: SystemParams) -> tuple[Fraction, Fraction]:
    """(alpha, beta) with alpha = d*beta = d*M / sum (d-(i-1))^+."""
    denom = sum(bhs_coefficients(params.k, params.d))
    if denom == 0:
        raise UnprotectableError("zero MBR denominator")
    beta = params._need("file_size") / denom
    return params.d * beta, beta


def tradeoff_curve(coeff_sets: Iterable[Sequence[int]], file_size: Rational, steps: int = 12) -> list:
    """Points (alpha, beta) on the lower envelope of several cut expressions.

    ``beta`` is the smallest value making every expression reach the file
    size; alpha runs over ``steps + 1`` evenly spaced values from the MSR
    storage to the MBR storage.
    """
    sets = [CutCoefficients(c) for c in coeff_sets]
    if not sets:
        raise ValueError("no cut expressions given")
    M = Fraction(file_size)
    if any(sum(c) == 0 for c in sets):
        raise UnprotectableError("an expression has all-zero coefficients")
    beta_mbr = max(M / sum(c) for c in sets)
    alpha_mbr = max(max(c) for c in sets) * beta_mbr
    alpha_msr = max(M / sum(1 for x in c if x > 0) for c in sets)
    steps = max(steps, 1)
    out = []
    for i in range(steps + 1):
        a = alpha_msr + (alpha_mbr - alpha_msr) * Fraction(i, steps)
        b = max(min_beta(c, a, M) for c in sets)
        if out and out[-1] == (a, b):
            continue
        out.append((a, b))
    return out
