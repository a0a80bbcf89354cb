"""Maps between groups, their graphs, and exact agreement counting.

The agreement of ``f: G -> H`` is the number of ordered pairs (a, b) in G x G
with f(a + b) = f(a) + f(b).  It always equals the triple correlation of the
graph of f, which the test-suite checks as an identity.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from sympy import isprime

from . import group_core as gc
from .group_core import GroupElement, GroupError, GroupSpec
from .setops import ElementSet

# agreement counting works on blocks of at most this many (pair, coordinate) cells
_CELLS = 1 << 22
_SMALL = 1 << 40


class PointMap:
    """A total map from a finite group to a codomain group, stored by rank."""

    __slots__ = ("domain", "codomain", "table", "injective", "provenance", "_values")

    def __init__(self, domain: GroupSpec, codomain: GroupSpec, table: Iterable[Sequence[int]],
                 provenance: tuple[str, tuple] | None = None):
        domain.require_finite()
        self.domain = domain
        self.codomain = codomain
        self.table: tuple[GroupElement, ...] = tuple(gc.reduce(codomain, tuple(v)) for v in table)
        if len(self.table) != domain.order():
            raise GroupError(f"table has {len(self.table)} entries, domain {domain} has order {domain.order()}")
        self.injective = len(set(self.table)) == len(self.table)
        self.provenance = provenance
        self._values: np.ndarray | None = None

    def __call__(self, x: GroupElement) -> GroupElement:
        return self.table[gc.rank(self.domain, x)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointMap):
            return NotImplemented
        return (self.domain, self.codomain, self.table) == (other.domain, other.codomain, other.table)

    def __hash__(self) -> int:
        return hash((self.domain, self.codomain, self.table))

    def __repr__(self) -> str:
        tag = f", {self.provenance[0]}" if self.provenance else ""
        return f"PointMap({self.domain} -> {self.codomain}{tag})"

    @property
    def construction(self) -> str | None:
        return self.provenance[0] if self.provenance else None

    def param(self, name: str):
        return dict(self.provenance[1])[name]

    def value_array(self) -> np.ndarray | None:
        """Codomain coordinates as an (|G|, k) int64 array, None if too large."""
        if self._values is None:
            if any(abs(c) >= _SMALL for v in self.table for c in v):
                return None
            self._values = np.array(self.table, dtype=np.int64).reshape(len(self.table), len(self.codomain))
        return self._values


@dataclass(frozen=True)
class AgreementReport:
    good_pairs: int
    total_pairs: int

    @property
    def probability(self) -> Fraction:
        return Fraction(self.good_pairs, self.total_pairs)

    @property
    def as_float(self) -> float:
        return self.good_pairs / self.total_pairs

    def to_json(self) -> dict:
        q = self.probability
        return {
            "good_pairs": self.good_pairs,
            "total": self.total_pairs,
            "probability": f"{q.numerator}/{q.denominator}",
            "decimal": f"{self.as_float:.12g}",
        }


class Projection:
    """Coordinatewise reduction from ``source`` onto ``target`` (e.g. Z -> Z/qZ)."""

    def __init__(self, source: GroupSpec, target: GroupSpec):
        if len(source) != len(target):
            raise GroupError(f"cannot project {source} onto {target}")
        for s, t in zip(source.moduli, target.moduli):
            if s and (t == 0 or s % t):
                raise GroupError(f"Z/{s}Z does not project onto {'Z' if t == 0 else f'Z/{t}Z'}")
        self.domain = source
        self.codomain = target

    def __call__(self, x: GroupElement) -> GroupElement:
        return gc.reduce(self.codomain, x)


# --- counting ----------------------------------------------------------------

def _count_block(f: PointMap, values: np.ndarray, lo: int, hi: int) -> int:
    G, H = f.domain, f.codomain
    n = G.order()
    a = np.arange(lo, hi, dtype=np.int64)
    b = np.arange(n, dtype=np.int64)
    s = G.add_ranks(a[:, None], b[None, :])
    lhs = values[s]
    rhs = values[a][:, None, :] + values[None, :, :]
    for i, m in enumerate(H.moduli):
        if m:
            rhs[..., i] %= m
    return int(np.count_nonzero(np.all(lhs == rhs, axis=-1)))


def agreement_probability(f: PointMap, threads: int = 1) -> AgreementReport:
    """Exact count of pairs (a, b) with f(a+b) = f(a) + f(b).

    Rows of the pair grid are split into rank blocks; the blocks may run on a
    thread pool, and the total does not depend on ``threads``.
    """
    G, H = f.domain, f.codomain
    n = G.order()
    if len(H) == 0:
        return AgreementReport(n * n, n * n)
    values = f.value_array()
    if values is None:
        good = 0
        for a in G.elements():
            fa = f(a)
            for b in G.elements():
                good += f(gc.add(G, a, b)) == gc.add(H, fa, f(b))
        return AgreementReport(good, n * n)
    step = max(1, _CELLS // (n * max(1, len(H))))
    bounds = [(lo, min(n, lo + step)) for lo in range(0, n, step)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            good = sum(pool.map(lambda lh: _count_block(f, values, *lh), bounds))
    else:
        good = sum(_count_block(f, values, lo, hi) for lo, hi in bounds)
    return AgreementReport(good, n * n)


def graph_of(f: PointMap) -> ElementSet:
    """{(x, f(x))} inside domain x codomain."""
    spec = gc.direct_product(f.domain, f.codomain)
    return ElementSet.from_elements(spec, (x + f.table[i] for i, x in enumerate(f.domain.elements())))


def swap_graph(f: PointMap) -> ElementSet:
    """{(f(x), x)} inside codomain x domain; needs f injective."""
    if not f.injective:
        raise GroupError(f"swap_graph needs an injective map, {f!r} is not")
    spec = gc.direct_product(f.codomain, f.domain)
    return ElementSet.from_elements(spec, (f.table[i] + x for i, x in enumerate(f.domain.elements())))


def compose(f: PointMap, g: "PointMap | Projection") -> PointMap:
    """g after f."""
    if f.codomain != g.domain:
        raise GroupError(f"cannot compose: codomain {f.codomain} != domain {g.domain}")
    return PointMap(f.domain, g.codomain, (g(v) for v in f.table))


# --- maps and constructions ------------------------------------------------

def from_function(domain: GroupSpec, codomain: GroupSpec, fn: Callable[[GroupElement], Sequence[int]]) -> PointMap:
    return PointMap(domain, codomain, (fn(x) for x in domain.elements()))


def identity_map(spec: GroupSpec) -> PointMap:
    return PointMap(spec, spec, spec.elements(), ("identity", ()))


def homomorphism(domain: GroupSpec, codomain: GroupSpec, images: Sequence[GroupElement]) -> PointMap:
    """The homomorphism sending the i-th generator of ``domain`` to ``images[i]``."""
    if len(images) != len(domain):
        raise GroupError(f"need {len(domain)} generator images, got {len(images)}")
    images = [gc.reduce(codomain, h) for h in images]
    for d, h in zip(domain.moduli, images):
        if gc.scalar_mul(codomain, d, h) != codomain.identity():
            raise GroupError(f"image {h} has order not dividing {d}")

    def fn(x):
        out = codomain.identity()
        for xi, h in zip(x, images):
            out = gc.add(codomain, out, gc.scalar_mul(codomain, xi, h))
        return out

    return PointMap(domain, codomain, (fn(x) for x in domain.elements()), ("homomorphism", ()))


def binary_embedding(n: int, p: int) -> PointMap:
    """(x_1, ..., x_n) -> x_1 + 2 x_2 + ... + 2^(n-1) x_n  in Z/pZ."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not isprime(p):
        raise ValueError(f"p={p} is not prime")
    if p <= 2**n:
        raise ValueError(f"binary embedding of (Z/2Z)^{n} is injective only for p > {2**n}, got p={p}")
    domain = GroupSpec([2] * n)
    table = ((sum(xi << i for i, xi in enumerate(x)) % p,) for x in domain.elements())
    return PointMap(domain, GroupSpec([p]), table, ("binary_embedding", (("n", n), ("p", p))))


def carry_defect(f: PointMap, x: GroupElement, y: GroupElement) -> GroupElement:
    """f(x) + f(y) - f(x + y) for a binary embedding."""
    if f.construction != "binary_embedding":
        raise GroupError(f"carry_defect needs a binary_embedding map, got {f.construction!r}")
    H = f.codomain
    return gc.sub(H, gc.add(H, f(x), f(y)), f(gc.add(f.domain, x, y)))


def carry_formula(p: int, x: GroupElement, y: GroupElement) -> int:
    """2 x_1 y_1 + 4 x_2 y_2 + ... + 2^n x_n y_n  mod p."""
    return sum(xi * yi << (i + 1) for i, (xi, yi) in enumerate(zip(x, y))) % p


def centered_lift(p: int) -> PointMap:
    """Z/pZ -> Z sending each class to its representative in (-p/2, p/2]."""
    if p < 3 or p % 2 == 0:
        raise ValueError(f"p must be an odd number >= 3, got {p}")
    half = p // 2
    return PointMap(GroupSpec([p]), GroupSpec([0]),
                    ((x if x <= half else x - p,) for (x,) in GroupSpec([p]).elements()),
                    ("centered_lift", (("p", p),)))


def centered_unwrap(p: int, q: int) -> PointMap:
    """The centred lift Z/pZ -> Z followed by reduction Z -> Z/qZ."""
    if not isprime(p) or p == 2:
        raise ValueError(f"p={p} must be an odd prime")
    if q <= p:
        raise ValueError(f"q must exceed p for injectivity, got p={p}, q={q}")
    if not isprime(q):
        raise ValueError(f"q={q} is not prime")
    lift = centered_lift(p)
    f = compose(lift, Projection(lift.codomain, GroupSpec([q])))
    f.provenance = ("centered_unwrap", (("p", p), ("q", q)))
    return f


def centered_good_pairs(p: int) -> int:
    """3k^2 + 3k + 1 where p = 2k + 1."""
    k = (p - 1) // 2
    return 3 * k * k + 3 * k + 1


def random_injection(domain: GroupSpec, codomain: GroupSpec, rng: np.random.Generator) -> PointMap:
    n, m = domain.order(), codomain.order()
    if n > m:
        raise GroupError(f"no injection from order {n} into order {m}")
    picks = rng.choice(m, size=n, replace=False)
    return PointMap(domain, codomain, (gc.unrank(codomain, int(k)) for k in picks))


def is_subgroup(A: ElementSet) -> bool:
    """A nonempty subset closed under subtraction."""
    from .setops import difference

    return len(A) > 0 and difference(A, A) == A

