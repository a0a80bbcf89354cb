from fractions import Fraction

import numpy as np
import pytest

import oracles
from apxhom import maps
from apxhom import search as srch
from apxhom.group_core import GroupError, GroupSpec


def _table(f, H):
    return np.array([H.rank_array(np.array([v]))[0] for v in f.table], dtype=np.int64)


def test_exhaustive_small_examples():
    res = srch.exhaustive_max_agreement(GroupSpec([2]), GroupSpec([3]))
    assert res.best_probability == Fraction(3, 4)
    assert maps.agreement_probability(res.witness).probability == Fraction(3, 4)
    res = srch.exhaustive_max_agreement(GroupSpec([7]), GroupSpec([7]))
    assert res.best_probability == 1


@pytest.mark.parametrize("G,H", [([2], [3]), ([2, 2], [5]), ([3], [7]), ([2], [2, 2]), ([4], [2, 3])])
def test_exhaustive_matches_bruteforce(G, H):
    best = oracles.max_agreement_bruteforce(tuple(G), tuple(H))
    n = GroupSpec(G).order()
    for sym in (True, False):
        res = srch.exhaustive_max_agreement(GroupSpec(G), GroupSpec(H), use_symmetry=sym)
        assert res.best_probability == Fraction(best, n * n)
        assert res.witness.injective


def test_symmetry_prunes_leaves():
    G, H = GroupSpec([2, 2]), GroupSpec([5])
    a = srch.exhaustive_max_agreement(G, H, use_symmetry=True)
    b = srch.exhaustive_max_agreement(G, H, use_symmetry=False)
    assert a.best_probability == b.best_probability
    assert a.visited < b.visited


def test_binary_embedding_below_optimum():
    res = srch.exhaustive_max_agreement(GroupSpec([2, 2]), GroupSpec([5]))
    assert maps.agreement_probability(maps.binary_embedding(2, 5)).probability <= res.best_probability


def test_exhaustive_rejects_bad_instances():
    with pytest.raises(GroupError):
        srch.exhaustive_max_agreement(GroupSpec([5]), GroupSpec([3]))
    with pytest.raises(GroupError):
        srch.exhaustive_max_agreement(GroupSpec([2] * 4), GroupSpec([37]), max_candidates=1000)


@pytest.mark.parametrize("spec,count", [([7], 6), ([9], 6), ([2, 2], 6), ([3, 3], 48), ([2, 2, 2], 168)])
def test_automorphism_counts(spec, count):
    auts = srch.automorphisms(GroupSpec(spec))
    assert len(auts) == count
    assert len({tuple(a) for a in auts}) == count


def test_automorphisms_unsupported_shape():
    assert srch.automorphisms(GroupSpec([2, 4])) is None


def test_agreement_invariant_under_automorphisms():
    G, H = GroupSpec([2, 2]), GroupSpec([3, 3])
    rng = np.random.default_rng(3)
    Gels, Hels = list(G.elements()), list(H.elements())
    autG, autH = srch.automorphisms(G), srch.automorphisms(H)
    for _ in range(20):
        f = maps.random_injection(G, H, rng)
        base = maps.agreement_probability(f).good_pairs
        sigma = autG[int(rng.integers(len(autG)))]
        tau = autH[int(rng.integers(len(autH)))]
        ranks = _table(f, H)
        # tau o f o sigma
        table = [Hels[int(tau[ranks[int(sigma[i])]])] for i in range(len(Gels))]
        g = maps.PointMap(G, H, table)
        assert maps.agreement_probability(g).good_pairs == base


def test_incremental_recount_matches_full_count():
    G, H = GroupSpec([2, 2, 2]), GroupSpec([11])
    climber = srch._Climber(G, H)
    rng = np.random.default_rng(11)
    table = rng.choice(11, size=8, replace=False).astype(np.int64)
    current = climber.full_count(table)
    for _ in range(10_000):
        if rng.random() < 0.5:
            x, y = (int(t) for t in rng.choice(8, size=2, replace=False))
            delta = climber.swap_delta(table, x, y)
            table[x], table[y] = table[y], table[x]
        else:
            x = int(rng.integers(8))
            free = np.setdiff1d(np.arange(11), table)
            v = int(free[rng.integers(len(free))])
            delta = climber.reassign_delta(table, x, v)
            table[x] = v
        full = climber.full_count(table)
        assert full == current + delta
        current = full


def test_local_search_reaches_exhaustive_on_small_space():
    G, H = GroupSpec([3]), GroupSpec([7])
    exact = srch.exhaustive_max_agreement(G, H).best_probability
    res = srch.local_search_max_agreement(G, H, iterations=4000, seed=0)
    assert res.best_probability == exact == Fraction(7, 9)


def test_local_search_deterministic_and_thread_independent():
    G, H = GroupSpec([2, 2, 2]), GroupSpec([11])
    a = srch.local_search_max_agreement(G, H, iterations=20_000, seed=1)
    b = srch.local_search_max_agreement(G, H, iterations=20_000, seed=1)
    c = srch.local_search_max_agreement(G, H, iterations=20_000, seed=1, threads=4)
    assert a.witness == b.witness == c.witness
    assert a.best_probability == b.best_probability == c.best_probability


def test_warm_start_lower_bound():
    G, H = GroupSpec([2, 2, 2]), GroupSpec([11])
    warm = maps.binary_embedding(3, 11)
    res = srch.local_search_max_agreement(G, H, iterations=200, seed=4, restarts=1, warm_start=warm)
    assert res.best_probability >= Fraction(27, 64)
    with pytest.raises(GroupError):
        srch.local_search_max_agreement(GroupSpec([2]), H, warm_start=warm)


def test_bound_table_rows():
    rows = srch.bound_comparison_table(GroupSpec([2] * 3), GroupSpec([11]), [1, 2], Fraction(27, 64))
    assert [r["r"] for r in rows] == [1, 2]
    assert rows[0]["base"] == 1
    assert rows[1]["base"] == Fraction(1, 8) and rows[1]["alpha"] == Fraction(1, 11)
    assert all(r["observed_best"] == Fraction(27, 64) for r in rows)
    # (Z/2)^(2n) -> (Z/4)^n at r = 2
    row = srch.bound_comparison_table(GroupSpec([2] * 4), GroupSpec([4, 4]), [2])[0]
    assert row["base"] == Fraction(1, 4) and row["alpha"] == Fraction(1, 11)


def test_search_result_json():
    res = srch.attach_bounds(srch.exhaustive_max_agreement(GroupSpec([2]), GroupSpec([3])), range(1, 3))
    js = res.to_json()
    assert js["best_probability"] == "3/4" and len(js["bound_context"]) == 2
    assert res.good_pairs == 3
