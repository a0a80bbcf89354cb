"""Finitely generated Abelian groups presented as direct sums of cyclic groups.

A group is described by a tuple of moduli: an entry ``d >= 2`` stands for the
cyclic factor Z/dZ and an entry ``0`` stands for an infinite cyclic factor Z.
Elements are plain tuples of Python ints, always kept reduced.

>>> G = GroupSpec((4, 0))
>>> add(G, (3, 2), (2, -1))
(1, 1)
>>> rank(GroupSpec((2, 2)), (1, 0))
1
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

import numpy as np
from sympy import factorint

if TYPE_CHECKING:
    from .setops import ElementSet

GroupElement = tuple[int, ...]


class GroupError(ValueError):
    """Raised for malformed specs, mismatched elements, or unsupported groups."""


@dataclass(frozen=True)
class GroupSpec:
    moduli: tuple[int, ...]

    def __init__(self, moduli: Iterable[int] = ()):
        mods = tuple(int(m) for m in moduli)
        for i, m in enumerate(mods):
            if m < 0 or m == 1:
                raise GroupError(f"modulus {m} at position {i} is not allowed (need 0 or >= 2)")
        object.__setattr__(self, "moduli", mods)

    def __len__(self) -> int:
        return len(self.moduli)

    def __str__(self) -> str:
        from .serialize import render_spec

        return render_spec(self)

    @property
    def is_finite(self) -> bool:
        return 0 not in self.moduli

    def order(self) -> int:
        if not self.is_finite:
            raise GroupError(f"group {self} is infinite")
        return math.prod(self.moduli)

    def exponent(self) -> int:
        if not self.is_finite:
            raise GroupError(f"group {self} is infinite")
        return math.lcm(*self.moduli) if self.moduli else 1

    def identity(self) -> GroupElement:
        return (0,) * len(self.moduli)

    def require_finite(self) -> None:
        if not self.is_finite:
            raise GroupError(f"operation needs a finite group, got {self}")

    def elements(self) -> Iterator[GroupElement]:
        """All elements in rank order (first coordinate varies fastest)."""
        self.require_finite()
        for rev in product(*(range(m) for m in reversed(self.moduli))):
            yield tuple(reversed(rev))

    # --- vectorised helpers on rank arrays (finite specs only) -------------

    def unrank_array(self, ranks) -> np.ndarray:
        """Rank array of shape (N,) -> coordinate array of shape (N, len)."""
        self.require_finite()
        ranks = np.asarray(ranks, dtype=np.int64)
        out = np.empty(ranks.shape + (len(self.moduli),), dtype=np.int64)
        rest = ranks.copy()
        for i, m in enumerate(self.moduli):
            out[..., i] = rest % m
            rest //= m
        return out

    def rank_array(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        out = np.zeros(coords.shape[:-1], dtype=np.int64)
        for i in reversed(range(len(self.moduli))):
            out = out * self.moduli[i] + coords[..., i] % self.moduli[i]
        return out

    def add_ranks(self, a, b) -> np.ndarray:
        """Broadcasting group addition on rank arrays."""
        self.require_finite()
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
        place = 1
        for m in self.moduli:
            out += ((a // place % m + b // place % m) % m) * place
            place *= m
        return out

    def scale_ranks(self, r: int, a) -> np.ndarray:
        self.require_finite()
        a = np.asarray(a, dtype=np.int64)
        out = np.zeros_like(a)
        place = 1
        for m in self.moduli:
            out += ((a // place % m) * (r % m) % m) * place
            place *= m
        return out


def _check(spec: GroupSpec, x: Sequence[int]) -> None:
    if len(x) != len(spec.moduli):
        raise GroupError(f"element {tuple(x)} has length {len(x)}, spec {spec} needs {len(spec.moduli)}")


def reduce(spec: GroupSpec, coords: Sequence[int]) -> GroupElement:
    """Canonical representative of an arbitrary integer vector."""
    _check(spec, coords)
    return tuple(int(c) % m if m else int(c) for c, m in zip(coords, spec.moduli))


def add(spec: GroupSpec, x: GroupElement, y: GroupElement) -> GroupElement:
    _check(spec, x)
    _check(spec, y)
    return tuple((a + b) % m if m else a + b for a, b, m in zip(x, y, spec.moduli))


def neg(spec: GroupSpec, x: GroupElement) -> GroupElement:
    _check(spec, x)
    return tuple(-a % m if m else -a for a, m in zip(x, spec.moduli))


def sub(spec: GroupSpec, x: GroupElement, y: GroupElement) -> GroupElement:
    return add(spec, x, neg(spec, y))


def scalar_mul(spec: GroupSpec, r: int, x: GroupElement) -> GroupElement:
    _check(spec, x)
    return tuple(r * a % m if m else r * a for a, m in zip(x, spec.moduli))


def rank(spec: GroupSpec, x: GroupElement) -> int:
    """Mixed-radix index of ``x``, little-endian (first modulus fastest)."""
    spec.require_finite()
    _check(spec, x)
    k = 0
    for a, m in zip(reversed(x), reversed(spec.moduli)):
        if not 0 <= a < m:
            raise GroupError(f"element {x} is not canonical for {spec}")
        k = k * m + a
    return k


def unrank(spec: GroupSpec, k: int) -> GroupElement:
    n = spec.order()
    if not 0 <= k < n:
        raise GroupError(f"rank {k} out of range [0, {n})")
    out = []
    for m in spec.moduli:
        k, a = divmod(k, m)
        out.append(a)
    return tuple(out)


def direct_product(a: GroupSpec, b: GroupSpec) -> GroupSpec:
    return GroupSpec(a.moduli + b.moduli)


def kernel_size(spec: GroupSpec, r: int) -> int:
    """|K_{G,r}|, the number of x with rx = 0."""
    if r == 0:
        return spec.order()
    return math.prod(math.gcd(r, m) for m in spec.moduli if m)


def dilate_size(spec: GroupSpec, r: int) -> int:
    """|r.G| for a finite group."""
    spec.require_finite()
    return math.prod(m // math.gcd(r, m) for m in spec.moduli)


def _cyclic_product(spec: GroupSpec, per_factor: list[list[int]]) -> "ElementSet":
    from .setops import ElementSet

    return ElementSet.from_elements(spec, product(*per_factor))


def kernel_subgroup(spec: GroupSpec, r: int) -> "ElementSet":
    """The subgroup {x : rx = 0}."""
    if r == 0:
        if not spec.is_finite:
            raise GroupError(f"kernel of multiplication by 0 on {spec} is infinite")
        return _cyclic_product(spec, [list(range(m)) for m in spec.moduli])
    factors = []
    for m in spec.moduli:
        if m == 0:
            factors.append([0])
        else:
            step = m // math.gcd(r, m)
            factors.append(list(range(0, m, step)))
    return _cyclic_product(spec, factors)


def dilate_image(spec: GroupSpec, r: int) -> "ElementSet":
    """The subgroup r.G of a finite group."""
    spec.require_finite()
    return _cyclic_product(spec, [list(range(0, m, math.gcd(r, m))) for m in spec.moduli])


def invariant_factors(spec: GroupSpec) -> GroupSpec:
    """Isomorphic spec whose finite moduli form a divisibility chain.

    Each finite factor is split into prime powers, then the largest powers of
    every prime are multiplied together to give the top factor, and so on.
    Infinite factors are kept and moved to the end.
    """
    powers: dict[int, list[int]] = defaultdict(list)
    for m in spec.moduli:
        if m:
            for p, e in factorint(m).items():
                powers[p].append(p**e)
    n = max((len(v) for v in powers.values()), default=0)
    chain = [1] * n
    for v in powers.values():
        v.sort(reverse=True)
        for i, q in enumerate(v):
            chain[i] *= q
    chain.reverse()
    return GroupSpec(chain + [0] * spec.moduli.count(0))
