"""Exact evaluation of the upper-bound expressions for agreement probability.

For an injection f: G -> H and r >= 1 the agreement probability is at most a
constant times ``base ** alpha`` where::

    base  = min(|r.G| |K_{H,r}|, |r.H| |K_{G,r}|) / |G|
    alpha = max(1/(5r+1), 1/(18 floor(log2 r) + 7))

Everything here is exact.  Quantities of the form ``coef * log2(arg)`` are
kept as :class:`LogRational` and compared by integer cross-powering.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable

from sympy import perfect_power, primerange

from . import group_core as gc
from .group_core import GroupSpec


def floor_log2(r: int) -> int:
    if r < 1:
        raise ValueError(f"floor_log2 needs r >= 1, got {r}")
    return r.bit_length() - 1


def theorem_alpha(r: int) -> Fraction:
    if r < 1:
        raise ValueError(f"r must be a positive integer, got {r}")
    return max(Fraction(1, 5 * r + 1), Fraction(1, 18 * floor_log2(r) + 7))


def theorem_terms(G: GroupSpec, H: GroupSpec, r: int) -> tuple[int, int]:
    """(|r.G| |K_{H,r}|, |r.H| |K_{G,r}|)."""
    if r < 1:
        raise ValueError(f"r must be a positive integer, got {r}")
    G.require_finite()
    H.require_finite()
    return (gc.dilate_size(G, r) * gc.kernel_size(H, r),
            gc.dilate_size(H, r) * gc.kernel_size(G, r))


def theorem_base(G: GroupSpec, H: GroupSpec, r: int) -> Fraction:
    return Fraction(min(theorem_terms(G, H, r)), G.order())


def compare_powers(a: Fraction, alpha: Fraction, b: Fraction, beta: Fraction) -> int:
    """Sign of a**alpha - b**beta for positive rationals a, b and alpha, beta >= 0."""
    # a^alpha ? b^beta  <=>  a^(alpha*D) ? b^(beta*D) with D clearing both denominators
    d = alpha.denominator * beta.denominator
    ea, eb = int(alpha * d), int(beta * d)
    lhs = a.numerator**ea * b.denominator**eb
    rhs = b.numerator**eb * a.denominator**ea
    return (lhs > rhs) - (lhs < rhs)


def _display(x: Fraction, alpha: Fraction, digits: int = 12) -> str:
    """x**alpha rendered with ``digits`` significant digits (display only)."""
    with decimal.localcontext() as ctx:
        ctx.prec = digits + 20
        val = (decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator)) ** (
            decimal.Decimal(alpha.numerator) / decimal.Decimal(alpha.denominator))
        return f"{val:.{digits}g}"


@dataclass(frozen=True)
class BoundReport:
    r: int
    alpha: Fraction
    base: Fraction
    side_used: str
    terms: tuple[int, int]

    @property
    def bound_value(self) -> str:
        return _display(self.base, self.alpha)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "alpha": _q(self.alpha),
            "base": _q(self.base),
            "bound_value": self.bound_value,
            "side_used": self.side_used,
            "terms": list(self.terms),
            "note": "bound_value = base**alpha; the theorem carries an unspecified O(1) constant",
        }


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def theorem_bound(G: GroupSpec, H: GroupSpec, r: int) -> BoundReport:
    terms = theorem_terms(G, H, r)
    side = "G" if terms[0] <= terms[1] else "H"
    return BoundReport(r, theorem_alpha(r), Fraction(min(terms), G.order()), side, terms)


def best_bound(G: GroupSpec, H: GroupSpec, rs: Iterable[int] = range(2, 65)) -> BoundReport:
    """The r giving the smallest base**alpha (ties go to the smaller r)."""
    best: BoundReport | None = None
    for r in rs:
        rep = theorem_bound(G, H, r)
        if best is None or compare_powers(rep.base, rep.alpha, best.base, best.alpha) < 0:
            best = rep
    if best is None:
        raise ValueError("empty r range")
    return best


@total_ordering
@dataclass(frozen=True)
class LogRational:
    """The real number ``coef * log2(arg)`` with arg >= 1 and coef >= 0."""

    arg: int
    coef: Fraction

    def __post_init__(self):
        if self.arg < 1 or self.coef < 0:
            raise ValueError(f"LogRational needs arg >= 1 and coef >= 0, got {self.arg}, {self.coef}")

    def _cmp(self, other: "LogRational") -> int:
        # a log x vs b log y  <=>  x^(p1 q2) vs y^(p2 q1)
        a, b = self.coef, other.coef
        if self.arg == other.arg or a == 0 or b == 0:
            x = a if self.arg > 1 else Fraction(0)
            y = b if other.arg > 1 else Fraction(0)
            return (x > y) - (x < y)
        # float screen; the exact test below only runs when the values are close
        gap = float(self) - float(other)
        if abs(gap) > 1e-9 * (1 + abs(float(self))):
            return 1 if gap > 0 else -1
        lhs = self.arg ** (a.numerator * b.denominator)
        rhs = other.arg ** (b.numerator * a.denominator)
        return (lhs > rhs) - (lhs < rhs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogRational):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other: "LogRational") -> bool:
        return self._cmp(other) < 0

    def __hash__(self) -> int:
        # equal values must hash equal: write arg = b**e with b not a perfect power
        if self.arg == 1 or self.coef == 0:
            return hash(0)
        pp = perfect_power(self.arg)
        b, e = pp if pp else (self.arg, 1)
        return hash((int(b), self.coef * e))

    def __float__(self) -> float:
        return float(self.coef) * math.log2(self.arg)

    def __str__(self) -> str:
        if self.arg == 2:
            return _q(self.coef)
        return f"log2({self.arg})*{_q(self.coef)}"


def c_of_r(r: int) -> LogRational:
    """max(log2 r/(5r+1), log2 r/(18 floor(log2 r)+7)) = log2(r) * theorem_alpha(r)."""
    if r < 2:
        raise ValueError(f"c(r) needs r >= 2, got {r}")
    terms = [LogRational(r, Fraction(1, 5 * r + 1)), LogRational(r, Fraction(1, 18 * floor_log2(r) + 7))]
    return max(terms)


def minimize_c_over_primes(limit: int) -> tuple[int, LogRational]:
    """Prime p <= limit minimising c(p), smallest prime on ties."""
    best: tuple[int, LogRational] | None = None
    for p in primerange(2, limit + 1):
        c = c_of_r(int(p))
        if best is None or c < best[1]:
            best = (int(p), c)
    if best is None:
        raise ValueError(f"no primes <= {limit}")
    return best


def power_chain_holds() -> bool:
    """2^(-1/11) < 17^(-1/79) < 2^(-1/20), checked by integer powers."""
    left = compare_powers(Fraction(1, 2), Fraction(1, 11), Fraction(1, 17), Fraction(1, 79)) < 0
    right = compare_powers(Fraction(1, 17), Fraction(1, 79), Fraction(1, 2), Fraction(1, 20)) < 0
    return left and right
