"""Finite subsets of a group and the additive operations on them.

Two storages are supported.  ``dense`` keeps a boolean mask indexed by rank
and is only available for finite groups of order at most ``DENSE_LIMIT``;
``sparse`` keeps a sorted tuple of canonical coordinate tuples and works for
any spec, including ones with infinite cyclic factors.  Both give identical
answers for every operation; the storage is picked automatically unless the
caller asks for one.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Iterator, Literal

import numpy as np

from . import group_core as gc
from .group_core import GroupElement, GroupError, GroupSpec

DENSE_LIMIT = 1 << 24
# pairwise rank sums are materialised in blocks of at most this many entries
_BLOCK = 1 << 21
# the int64 fast path for sparse sets is used while coordinates stay below this
_SMALL_COORD = 1 << 40

Storage = Literal["dense", "sparse"]


def _default_storage(spec: GroupSpec) -> Storage:
    return "dense" if spec.is_finite and spec.order() <= DENSE_LIMIT else "sparse"


class ElementSet:
    """An immutable finite subset of the group described by ``spec``."""

    __slots__ = ("spec", "_mask", "_coords", "_ranks", "_fs")

    def __init__(self, spec: GroupSpec, *, mask: np.ndarray | None = None,
                 coords: tuple[GroupElement, ...] | None = None):
        if (mask is None) == (coords is None):
            raise ValueError("exactly one of mask / coords must be given")
        self.spec = spec
        self._mask = mask
        self._coords = coords
        self._ranks: np.ndarray | None = None
        self._fs: frozenset | None = None
        if mask is not None:
            mask.flags.writeable = False

    # --- construction -----------------------------------------------------

    @classmethod
    def from_elements(cls, spec: GroupSpec, elements: Iterable[Iterable[int]],
                      storage: Storage | None = None) -> "ElementSet":
        storage = storage or _default_storage(spec)
        elems = {gc.reduce(spec, tuple(e)) for e in elements}
        if storage == "dense":
            _require_dense(spec)
            mask = np.zeros(spec.order(), dtype=bool)
            if elems:
                mask[spec.rank_array(np.array(sorted(elems), dtype=np.int64).reshape(len(elems), len(spec)))] = True
            return cls(spec, mask=mask)
        return cls(spec, coords=tuple(sorted(elems)))

    @classmethod
    def from_ranks(cls, spec: GroupSpec, ranks, storage: Storage | None = None) -> "ElementSet":
        storage = storage or _default_storage(spec)
        ranks = np.unique(np.asarray(ranks, dtype=np.int64))
        if storage == "dense":
            _require_dense(spec)
            mask = np.zeros(spec.order(), dtype=bool)
            mask[ranks] = True
            return cls(spec, mask=mask)
        coords = spec.unrank_array(ranks)
        return cls(spec, coords=tuple(sorted(tuple(int(c) for c in row) for row in coords)))

    @classmethod
    def empty(cls, spec: GroupSpec, storage: Storage | None = None) -> "ElementSet":
        return cls.from_elements(spec, (), storage)

    @classmethod
    def whole(cls, spec: GroupSpec, storage: Storage | None = None) -> "ElementSet":
        return cls.from_ranks(spec, np.arange(spec.order()), storage)

    def _rebuild(self, ranks=None, elements=None) -> "ElementSet":
        """New set in the same spec and storage as ``self``."""
        if ranks is not None:
            return ElementSet.from_ranks(self.spec, ranks, self.storage)
        return ElementSet.from_elements(self.spec, elements, self.storage)

    # --- storage ----------------------------------------------------------

    @property
    def storage(self) -> Storage:
        return "dense" if self._mask is not None else "sparse"

    def to_dense(self) -> "ElementSet":
        if self._mask is not None:
            return self
        return ElementSet.from_elements(self.spec, self._coords, "dense")

    def to_sparse(self) -> "ElementSet":
        if self._coords is not None:
            return self
        return ElementSet.from_ranks(self.spec, self.ranks(), "sparse")

    def ranks(self) -> np.ndarray:
        """Sorted rank array (finite specs only)."""
        if self._ranks is None:
            if self._mask is not None:
                r = np.flatnonzero(self._mask)
            else:
                self.spec.require_finite()
                r = np.sort(np.array([gc.rank(self.spec, x) for x in self._coords], dtype=np.int64))
            r.flags.writeable = False
            self._ranks = r
        return self._ranks

    @property
    def mask(self) -> np.ndarray:
        return self.to_dense()._mask

    def elements(self) -> list[GroupElement]:
        """Elements in rank order (dense) or lexicographic order (sparse)."""
        if self._coords is not None:
            return list(self._coords)
        return [tuple(int(c) for c in row) for row in self.spec.unrank_array(self.ranks())]

    def _coord_array(self) -> np.ndarray | None:
        """int64 coordinate array, or None if coordinates are too large."""
        if self._coords is None:
            return self.spec.unrank_array(self.ranks())
        if not self._coords:
            return np.zeros((0, len(self.spec)), dtype=np.int64)
        if max(abs(c) for x in self._coords for c in x) >= _SMALL_COORD:
            return None
        return np.array(self._coords, dtype=np.int64).reshape(len(self._coords), len(self.spec))

    # --- container protocol -----------------------------------------------

    def __len__(self) -> int:
        if self._mask is not None:
            return len(self.ranks())
        return len(self._coords)

    @property
    def size(self) -> int:
        return len(self)

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(self.elements())

    def __contains__(self, x) -> bool:
        x = gc.reduce(self.spec, tuple(x))
        if self._mask is not None:
            return bool(self._mask[gc.rank(self.spec, x)])
        return x in self._frozen()

    def _frozen(self) -> frozenset:
        if self._fs is None:
            self._fs = frozenset(self.elements())
        return self._fs

    def __eq__(self, other) -> bool:
        if not isinstance(other, ElementSet):
            return NotImplemented
        if self.spec != other.spec or len(self) != len(other):
            return False
        if self._mask is not None and other._mask is not None:
            return bool(np.array_equal(self._mask, other._mask))
        return self._frozen() == other._frozen()

    def __hash__(self) -> int:
        return hash((self.spec, self._frozen()))

    def __repr__(self) -> str:
        body = ", ".join(str(list(x)) for x in self.elements()[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"ElementSet({self.spec}, {{{body}{more}}}, n={len(self)}, {self.storage})"

    # --- plain set algebra ------------------------------------------------

    def issubset(self, other: "ElementSet") -> bool:
        _same_spec(self, other)
        if self._mask is not None and other._mask is not None:
            return not bool(np.any(self._mask & ~other._mask))
        return self._frozen() <= other._frozen()

    def union(self, other: "ElementSet") -> "ElementSet":
        _same_spec(self, other)
        if self._mask is not None and other._mask is not None:
            return ElementSet(self.spec, mask=self._mask | other._mask)
        return self._rebuild(elements=self._frozen() | other._frozen())

    def intersection(self, other: "ElementSet") -> "ElementSet":
        _same_spec(self, other)
        if self._mask is not None and other._mask is not None:
            return ElementSet(self.spec, mask=self._mask & other._mask)
        return self._rebuild(elements=self._frozen() & other._frozen())

    def translate(self, x: GroupElement) -> "ElementSet":
        return sumset(self, ElementSet.from_elements(self.spec, [x], self.storage))


def _require_dense(spec: GroupSpec) -> None:
    if not spec.is_finite or spec.order() > DENSE_LIMIT:
        raise GroupError(f"dense storage needs a finite group of order <= {DENSE_LIMIT}, got {spec}")


def _same_spec(a: ElementSet, b: ElementSet) -> None:
    if a.spec != b.spec:
        raise GroupError(f"spec mismatch: {a.spec} vs {b.spec}")


def _pairwise_rank_sums(spec: GroupSpec, ra: np.ndarray, rb: np.ndarray) -> Iterator[np.ndarray]:
    """Yield blocks of all sums a+b for a in ``ra``, b in ``rb`` (as ranks)."""
    if len(ra) == 0 or len(rb) == 0:
        return
    step = max(1, _BLOCK // len(rb))
    for lo in range(0, len(ra), step):
        yield spec.add_ranks(ra[lo:lo + step, None], rb[None, :]).ravel()


def _pairwise_coord_sums(spec: GroupSpec, ca: np.ndarray, cb: np.ndarray) -> Iterator[np.ndarray]:
    """Yield blocks of coordinate sums, reduced modulo the finite moduli."""
    if len(ca) == 0 or len(cb) == 0:
        return
    mods = np.array(spec.moduli, dtype=np.int64)
    finite = mods > 0
    safe = np.where(finite, mods, 1)
    step = max(1, _BLOCK // len(cb))
    for lo in range(0, len(ca), step):
        s = (ca[lo:lo + step, None, :] + cb[None, :, :]).reshape(-1, len(spec.moduli))
        s = np.where(finite, s % safe, s)
        yield s


def _rows_to_tuples(rows: np.ndarray) -> list[GroupElement]:
    return [tuple(int(c) for c in row) for row in rows]


# --- sumsets ---------------------------------------------------------------

def sumset(A: ElementSet, B: ElementSet) -> ElementSet:
    """A + B = {a + b}."""
    _same_spec(A, B)
    spec = A.spec
    if A.storage == "dense" or B.storage == "dense":
        mask = np.zeros(spec.order(), dtype=bool)
        for block in _pairwise_rank_sums(spec, A.ranks(), B.ranks()):
            mask[block] = True
        out = ElementSet(spec, mask=mask)
        return out if A.storage == "dense" else out.to_sparse()
    ca, cb = A._coord_array(), B._coord_array()
    if ca is not None and cb is not None:
        if len(spec) == 0:
            rows = np.zeros((1 if len(ca) and len(cb) else 0, 0), dtype=np.int64)
        else:
            blocks = [np.unique(b, axis=0) for b in _pairwise_coord_sums(spec, ca, cb)]
            rows = np.unique(np.concatenate(blocks), axis=0) if blocks else np.zeros((0, len(spec)), dtype=np.int64)
        return ElementSet(spec, coords=tuple(sorted(_rows_to_tuples(rows))))
    return ElementSet.from_elements(spec, {gc.add(spec, a, b) for a in A.elements() for b in B.elements()}, "sparse")


def negate(A: ElementSet) -> ElementSet:
    """-A."""
    if A.storage == "dense":
        return A._rebuild(ranks=A.spec.scale_ranks(-1, A.ranks()))
    return A._rebuild(elements=(gc.neg(A.spec, a) for a in A.elements()))


def difference(A: ElementSet, B: ElementSet) -> ElementSet:
    """A - B = {a - b}."""
    return sumset(A, negate(B))


def dilate(r: int, A: ElementSet) -> ElementSet:
    """r.A = {ra : a in A}; not to be confused with ``iterated_sumset``."""
    if A.storage == "dense":
        return A._rebuild(ranks=A.spec.scale_ranks(r, A.ranks()))
    return A._rebuild(elements=(gc.scalar_mul(A.spec, r, a) for a in A.elements()))


def iterated_sumset(k: int, B: ElementSet) -> ElementSet:
    """kB = B + ... + B with k summands, k >= 1."""
    if k < 1:
        raise ValueError(f"iterated_sumset needs k >= 1, got {k}")
    out = B
    for _ in range(k - 1):
        out = sumset(out, B)
    return out


def sumset_many(*sets: ElementSet) -> ElementSet:
    out = sets[0]
    for s in sets[1:]:
        out = sumset(out, s)
    return out


# --- counting --------------------------------------------------------------

def sum_histogram(A: ElementSet, B: ElementSet) -> Counter:
    """The convolution 1_A * 1_B as a Counter from elements to counts."""
    _same_spec(A, B)
    spec = A.spec
    hist: Counter = Counter()
    if spec.is_finite and spec.order() <= DENSE_LIMIT:
        blocks = list(_pairwise_rank_sums(spec, A.ranks(), B.ranks()))
        if not blocks:
            return hist
        keys, counts = np.unique(np.concatenate(blocks), return_counts=True)
        for x, c in zip(_rows_to_tuples(spec.unrank_array(keys)), counts):
            hist[x] = int(c)
        return hist
    ca, cb = A._coord_array(), B._coord_array()
    if ca is not None and cb is not None and len(spec):
        blocks = list(_pairwise_coord_sums(spec, ca, cb))
        if not blocks:
            return hist
        keys, counts = np.unique(np.concatenate(blocks), axis=0, return_counts=True)
        for x, c in zip(_rows_to_tuples(keys), counts):
            hist[x] = int(c)
        return hist
    for a in A.elements():
        for b in B.elements():
            hist[gc.add(spec, a, b)] += 1
    return hist


def triple_correlation(A: ElementSet) -> int:
    """Number of ordered pairs (a, b) in A x A with a + b in A."""
    spec = A.spec
    if A.storage == "dense":
        mask = A._mask
        return int(sum(int(np.count_nonzero(mask[block])) for block in _pairwise_rank_sums(spec, A.ranks(), A.ranks())))
    members = A._frozen()
    elems = A.elements()
    return sum(1 for a in elems for b in elems if gc.add(spec, a, b) in members)


def additive_energy(X: ElementSet, B: ElementSet) -> int:
    """Number of (x, y, z, w) in X x B x X x B with x + y = z + w."""
    _same_spec(X, B)
    return sum(c * c for c in sum_histogram(X, B).values())
