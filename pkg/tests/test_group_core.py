import math
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from apxhom import group_core as gc
from apxhom.group_core import GroupError, GroupSpec
from conftest import finite_specs


def test_add_examples():
    assert gc.add(GroupSpec([5]), (3,), (4,)) == (2,)
    assert gc.add(GroupSpec([2, 2]), (1, 0), (1, 1)) == (0, 1)
    assert gc.add(GroupSpec([4, 0]), (3, 2), (2, -1)) == (1, 1)


def test_add_length_mismatch():
    with pytest.raises(GroupError):
        gc.add(GroupSpec([5]), (1,), (1, 2))


def test_scalar_mul_examples():
    assert gc.scalar_mul(GroupSpec([5]), 2, (3,)) == (1,)
    G = GroupSpec([2] * 6)
    for x in G.elements():
        assert gc.scalar_mul(G, 2, x) == G.identity()
    assert gc.scalar_mul(GroupSpec([3, 0]), 3, (1, 2)) == (0, 6)
    assert gc.scalar_mul(GroupSpec([7, 0]), -1, (3, 2)) == (4, -2)


def test_modulus_one_rejected():
    with pytest.raises(GroupError):
        GroupSpec([1])
    with pytest.raises(GroupError):
        GroupSpec([-3])


@pytest.mark.parametrize("p", [3, 5, 7, 101])
def test_kernel_of_two_trivial_for_odd_p(p):
    assert gc.kernel_subgroup(GroupSpec([p]), 2).elements() == [(0,)]


def test_kernel_examples():
    # oracle: x in Z/4 with 2x = 0
    expected = {(x,) for x in range(4) if 2 * x % 4 == 0}
    assert set(gc.kernel_subgroup(GroupSpec([4]), 2).elements()) == expected == {(0,), (2,)}
    assert gc.kernel_subgroup(GroupSpec([3, 4]), 1).elements() == [(0, 0)]
    assert gc.kernel_subgroup(GroupSpec([4, 0]), 2).elements() == [(0, 0), (2, 0)]
    with pytest.raises(GroupError):
        gc.kernel_subgroup(GroupSpec([4, 0]), 0)


def test_dilate_image_examples():
    assert gc.dilate_image(GroupSpec([2] * 5), 2).elements() == [(0,) * 5]
    expected = {(2 * x % 6,) for x in range(6)}
    assert set(gc.dilate_image(GroupSpec([6]), 2).elements()) == expected == {(0,), (2,), (4,)}
    G = GroupSpec([3, 4])
    assert len(gc.dilate_image(G, 1)) == 12
    with pytest.raises(GroupError):
        gc.dilate_image(GroupSpec([0]), 2)


def test_invariant_factors_examples():
    assert gc.invariant_factors(GroupSpec([2, 3])).moduli == (6,)
    assert gc.invariant_factors(GroupSpec([4, 2])).moduli == (2, 4)
    assert gc.invariant_factors(GroupSpec([5])).moduli == (5,)
    assert gc.invariant_factors(GroupSpec([0, 6, 4])).moduli == (2, 12, 0)
    assert gc.invariant_factors(GroupSpec([])).moduli == ()


def test_rank_examples():
    G = GroupSpec([2, 2])
    assert gc.rank(G, (1, 0)) == 1
    assert gc.unrank(G, 3) == (1, 1)
    assert gc.rank(GroupSpec([5]), (4,)) == 4
    with pytest.raises(GroupError):
        gc.unrank(G, 4)
    with pytest.raises(GroupError):
        gc.rank(GroupSpec([3, 0]), (0, 0))


def test_direct_product_examples():
    assert gc.direct_product(GroupSpec([2, 2]), GroupSpec([5])).moduli == (2, 2, 5)
    assert gc.direct_product(GroupSpec([]), GroupSpec([3])).moduli == (3,)
    assert gc.direct_product(GroupSpec([4]), GroupSpec([0])).moduli == (4, 0)


@settings(max_examples=200)
@given(finite_specs(max_order=400, max_len=4), st.integers(-20, 20))
def test_kernel_times_image_is_order(G, r):
    K = gc.kernel_subgroup(G, r)
    D = gc.dilate_image(G, r)
    assert len(K) * len(D) == G.order()
    assert len(K) == gc.kernel_size(G, r)
    assert len(D) == gc.dilate_size(G, r)
    # brute force
    els = oracles.elements(G.moduli)
    assert set(K.elements()) == {x for x in els if oracles.times(G.moduli, r, x) == G.identity()}
    assert set(D.elements()) == {oracles.times(G.moduli, r, x) for x in els}


@settings(max_examples=200)
@given(st.lists(st.sampled_from([0, 2, 3, 4, 5, 6, 8, 9, 10, 12, 16, 25, 27]), max_size=5))
def test_invariant_factors_properties(mods):
    G = GroupSpec(mods)
    C = gc.invariant_factors(G)
    finite = [m for m in C.moduli if m]
    assert all(b % a == 0 for a, b in zip(finite, finite[1:]))
    assert C.moduli[len(finite):] == (0,) * mods.count(0)
    assert gc.invariant_factors(C) == C
    Gf = GroupSpec([m for m in mods if m])
    Cf = GroupSpec(finite)
    assert Gf.order() == Cf.order()
    assert Gf.exponent() == Cf.exponent()
    # same number of elements of each order-dividing-k means isomorphic for finite Abelian groups
    for k in range(1, 13):
        assert gc.kernel_size(Gf, k) == gc.kernel_size(Cf, k)


@settings(max_examples=100)
@given(finite_specs(max_order=500, max_len=4))
def test_rank_unrank_bijection(G):
    ranks = [gc.rank(G, x) for x in G.elements()]
    assert ranks == list(range(G.order()))
    assert all(gc.unrank(G, k) == x for k, x in enumerate(G.elements()))
    arr = G.unrank_array(range(G.order()))
    assert G.rank_array(arr).tolist() == ranks


@pytest.mark.parametrize("mods", [[5], [2, 2, 2], [4, 6], [3, 0], [0, 0, 7], [2, 9, 4]])
def test_group_axioms_random_triples(mods):
    G = GroupSpec(mods)
    rnd = random.Random(7)

    def draw():
        return gc.reduce(G, [rnd.randrange(-50, 50) for _ in mods])

    e = G.identity()
    for _ in range(10_000):
        x, y, z = draw(), draw(), draw()
        assert gc.add(G, x, y) == gc.add(G, y, x)
        assert gc.add(G, gc.add(G, x, y), z) == gc.add(G, x, gc.add(G, y, z))
        assert gc.add(G, x, e) == x
        assert gc.add(G, x, gc.neg(G, x)) == e
        r = rnd.randrange(-9, 10)
        assert gc.scalar_mul(G, r, gc.add(G, x, y)) == gc.add(G, gc.scalar_mul(G, r, x), gc.scalar_mul(G, r, y))
    assert gc.scalar_mul(G, 1, x) == x


def test_vectorised_add_matches_scalar():
    G = GroupSpec([3, 4, 5])
    n = G.order()
    import numpy as np

    table = G.add_ranks(np.arange(n)[:, None], np.arange(n)[None, :])
    for a in range(n):
        for b in range(0, n, 7):
            assert table[a, b] == gc.rank(G, gc.add(G, gc.unrank(G, a), gc.unrank(G, b)))
    assert G.scale_ranks(-1, np.arange(n)).tolist() == [gc.rank(G, gc.neg(G, x)) for x in G.elements()]


def test_order_and_exponent():
    assert GroupSpec([4, 6]).order() == 24
    assert GroupSpec([4, 6]).exponent() == math.lcm(4, 6)
    assert GroupSpec([]).order() == 1
    with pytest.raises(GroupError):
        GroupSpec([0]).order()
