"""Searching for injections G -> H with as many agreeing pairs as possible.

Two strategies: an exhaustive branch-and-bound over injections (with value
symmetry removed through automorphisms of H where we can generate them), and
a seeded hill climber with restarts.  Both report exact probabilities.  The
search reports observed maxima only; it does not claim optimality beyond the
instance it was run on.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from sympy import isprime

from . import group_core as gc
from .bounds import BoundReport, theorem_bound
from .group_core import GroupError, GroupSpec
from .maps import PointMap, agreement_probability

MAX_CANDIDATES = 10**8
AUT_LIMIT = 50_000


@dataclass
class SearchResult:
    best_probability: Fraction
    witness: PointMap
    visited: int
    method: str
    bound_context: list[BoundReport] = field(default_factory=list)

    @property
    def good_pairs(self) -> int:
        return int(self.best_probability * self.witness.domain.order() ** 2)

    def to_json(self) -> dict:
        from .serialize import map_to_json

        q = self.best_probability
        return {
            "method": self.method,
            "best_probability": f"{q.numerator}/{q.denominator}",
            "decimal": f"{float(q):.12g}",
            "visited": self.visited,
            "witness": map_to_json(self.witness),
            "bound_context": [b.to_json() for b in self.bound_context],
        }


# --- automorphisms -----------------------------------------------------------------

def automorphisms(spec: GroupSpec, limit: int = AUT_LIMIT) -> list[np.ndarray] | None:
    """Automorphisms as rank permutations, for cyclic and elementary-Abelian specs.

    Returns None when the spec is of another shape or the group has more than
    ``limit`` automorphisms; callers then fall back to plain enumeration.
    """
    spec.require_finite()
    n = spec.order()
    ranks = np.arange(n, dtype=np.int64)
    if len(spec) == 0:
        return [ranks]
    if len(spec) == 1:
        m = spec.moduli[0]
        units = [u for u in range(1, m) if math.gcd(u, m) == 1]
        if len(units) > limit:
            return None
        return [ranks * u % m for u in units]
    p = spec.moduli[0]
    k = len(spec)
    if any(m != p for m in spec.moduli) or not isprime(p):
        return None
    size = math.prod(p**k - p**i for i in range(k))
    if size > limit:
        return None
    coords = spec.unrank_array(ranks)  # (n, k)
    perms = []
    for entries in itertools.product(range(p), repeat=k * k):
        M = np.array(entries, dtype=np.int64).reshape(k, k)
        image = spec.rank_array(coords @ M.T % p)
        if len(np.unique(image)) == n:
            perms.append(image)
    return perms


def _add_table(spec: GroupSpec) -> np.ndarray:
    r = np.arange(spec.order(), dtype=np.int64)
    return spec.add_ranks(r[:, None], r[None, :])


def _injection_count(n: int, m: int) -> int:
    return math.perm(m, n)


# --- exhaustive -------------------------------------------------------------------

def exhaustive_max_agreement(G: GroupSpec, H: GroupSpec, use_symmetry: bool = True,
                             max_candidates: int = MAX_CANDIDATES) -> SearchResult:
    """Global maximum of the agreement count over all injections G -> H.

    Points of G are assigned in rank order.  A pair (a, b) is decided once a,
    b and a+b all have values; the bound used for pruning is the current good
    count plus every still-undecided pair.  When Aut(H) is available, the
    value of each point is restricted to orbit representatives of the
    stabiliser of the values already placed, which is sound because
    post-composing with an automorphism preserves the agreement count.
    """
    n, m = G.order(), H.order()
    if n > m:
        raise GroupError(f"no injection from {G} (order {n}) into {H} (order {m})")
    auts = automorphisms(H) if use_symmetry else None
    estimate = _injection_count(n, m) // (len(auts) if auts else 1)
    if estimate > max_candidates:
        raise GroupError(f"instance too large: about {estimate} candidate injections (limit {max_candidates})")
    sG = _add_table(G)
    sH = _add_table(H).tolist()
    perms = [p.tolist() for p in auts] if auts else None
    decided_at: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            s = int(sG[a, b])
            decided_at[max(a, b, s)].append((a, b, s))
    decided_before = np.cumsum([0] + [len(d) for d in decided_at])
    total = n * n

    f = [-1] * n
    used = [False] * m
    best = {"good": -1, "table": None}
    visited = 0

    def dfs(j: int, good: int, stab: list[list[int]] | None) -> None:
        nonlocal visited
        if j == n:
            visited += 1
            if good > best["good"]:
                best["good"], best["table"] = good, list(f)
            return
        undecided = total - int(decided_before[j])
        if good + undecided <= best["good"]:
            return
        for v in range(m):
            if used[v]:
                continue
            if stab is not None and len(stab) > 1 and any(p[v] < v for p in stab):
                continue
            f[j] = v
            used[v] = True
            gain = 0
            for a, b, s in decided_at[j]:
                if f[s] == sH[f[a]][f[b]]:
                    gain += 1
            next_stab = [p for p in stab if p[v] == v] if stab is not None and len(stab) > 1 else stab
            dfs(j + 1, good + gain, next_stab)
            used[v] = False
            f[j] = -1

    dfs(0, 0, perms)
    witness = PointMap(G, H, (gc.unrank(H, v) for v in best["table"]))
    prob = agreement_probability(witness).probability
    if prob != Fraction(best["good"], total):
        raise AssertionError("incremental count disagrees with full recount")
    return SearchResult(prob, witness, visited, "exhaustive")


# --- local search ------------------------------------------------------------------

class _Climber:
    """Hill-climbing state over rank tables with incremental recount."""

    def __init__(self, G: GroupSpec, H: GroupSpec):
        self.G, self.H = G, H
        self.n, self.m = G.order(), H.order()
        self.sG = _add_table(G)
        self._touch: dict[int, np.ndarray] = {}

    def pairs_touching(self, x: int) -> np.ndarray:
        """Flat indices a*n + b of all pairs with x in {a, b, a+b}."""
        if x not in self._touch:
            n = self.n
            r = np.arange(n, dtype=np.int64)
            as_sum = np.flatnonzero(self.sG.ravel() == x)
            self._touch[x] = np.unique(np.concatenate([x * n + r, r * n + x, as_sum]))
        return self._touch[x]

    def good_on(self, table: np.ndarray, pairs: np.ndarray) -> int:
        a, b = np.divmod(pairs, self.n)
        lhs = table[self.sG[a, b]]
        rhs = self.H.add_ranks(table[a], table[b])
        return int(np.count_nonzero(lhs == rhs))

    def full_count(self, table: np.ndarray) -> int:
        return self.good_on(table, np.arange(self.n * self.n, dtype=np.int64))

    def swap_delta(self, table: np.ndarray, x: int, y: int) -> int:
        pairs = np.union1d(self.pairs_touching(x), self.pairs_touching(y))
        before = self.good_on(table, pairs)
        table[x], table[y] = table[y], table[x]
        after = self.good_on(table, pairs)
        table[x], table[y] = table[y], table[x]
        return after - before

    def reassign_delta(self, table: np.ndarray, x: int, v: int) -> int:
        pairs = self.pairs_touching(x)
        before = self.good_on(table, pairs)
        old = table[x]
        table[x] = v
        after = self.good_on(table, pairs)
        table[x] = old
        return after - before

    def run(self, start: np.ndarray, steps: int, rng: np.random.Generator, patience: int):
        table = start.copy()
        used = np.zeros(self.m, dtype=bool)
        used[table] = True
        good = self.full_count(table)
        best_good, best_table = good, table.copy()
        stale = 0
        for _ in range(steps):
            free = self.m - self.n
            if free and (self.n < 2 or rng.random() < 0.5):
                x = int(rng.integers(self.n))
                v = int(np.flatnonzero(~used)[rng.integers(free)])
                delta = self.reassign_delta(table, x, v)
                if delta >= 0:
                    used[table[x]] = False
                    used[v] = True
                    table[x] = v
            elif self.n >= 2:
                x, y = (int(t) for t in rng.choice(self.n, size=2, replace=False))
                delta = self.swap_delta(table, x, y)
                if delta >= 0:
                    table[x], table[y] = table[y], table[x]
            else:
                break
            if delta >= 0:
                good += delta
            if good > best_good:
                best_good, best_table, stale = good, table.copy(), 0
            else:
                stale += 1
                if stale >= patience:
                    break
        return best_good, best_table


def local_search_max_agreement(G: GroupSpec, H: GroupSpec, iterations: int = 10_000, seed: int = 0,
                               restarts: int = 8, warm_start: PointMap | None = None,
                               patience: int | None = None, threads: int = 1) -> SearchResult:
    """Seeded hill climbing over injections with swap and reassign moves.

    The iteration budget is split evenly across ``restarts`` runs; run i uses
    the generator seeded with (seed, i), and run 0 starts from ``warm_start``
    if given.  Moves that do not decrease the count are accepted.  The best
    table is picked by count, then by the lexicographically smallest table,
    so the result does not depend on ``threads``.
    """
    n, m = G.order(), H.order()
    if n > m:
        raise GroupError(f"no injection from {G} (order {n}) into {H} (order {m})")
    climber = _Climber(G, H)
    per_run = max(1, iterations // max(1, restarts))
    patience = patience or max(200, 4 * n * m)

    def one(i: int):
        rng = np.random.default_rng([seed, i])
        if i == 0 and warm_start is not None:
            if warm_start.domain != G or warm_start.codomain != H or not warm_start.injective:
                raise GroupError("warm start must be an injection between the searched groups")
            start = np.array([gc.rank(H, v) for v in warm_start.table], dtype=np.int64)
        else:
            start = rng.choice(m, size=n, replace=False).astype(np.int64)
        return climber.run(start, per_run, rng, patience)

    runs = range(max(1, restarts))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, runs))
    else:
        results = [one(i) for i in runs]
    good, table = max(results, key=lambda gt: (gt[0], [-int(v) for v in gt[1]]))
    witness = PointMap(G, H, (gc.unrank(H, int(v)) for v in table))
    prob = agreement_probability(witness).probability
    if prob != Fraction(good, n * n):
        raise AssertionError("incremental count disagrees with full recount")
    return SearchResult(prob, witness, per_run * len(runs), "local")


# --- bound context -----------------------------------------------------------------

def bound_comparison_table(G: GroupSpec, H: GroupSpec, r_range: Sequence[int],
                           observed: Fraction | None = None) -> list[dict]:
    """Rows (r, alpha, base, base**alpha) beside an observed best probability.

    The theorem's bound carries an unspecified constant factor, so these rows
    are context for the observed value and are never asserted against it.
    """
    rows = []
    for r in r_range:
        rep = theorem_bound(G, H, r)
        rows.append({
            "r": r,
            "alpha": rep.alpha,
            "base": rep.base,
            "base_pow_alpha": rep.bound_value,
            "side_used": rep.side_used,
            "observed_best": observed,
            "note": "context only; bound holds up to an unspecified constant",
        })
    return rows


def attach_bounds(result: SearchResult, r_range: Sequence[int]) -> SearchResult:
    G, H = result.witness.domain, result.witness.codomain
    result.bound_context = [theorem_bound(G, H, r) for r in r_range]
    return result
