from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from apxhom import maps
from apxhom.group_core import GroupError, GroupSpec
from apxhom.setops import triple_correlation
from conftest import finite_specs


def test_binary_embedding_small_example():
    f = maps.binary_embedding(2, 5)
    rep = maps.agreement_probability(f)
    assert (rep.good_pairs, rep.total_pairs) == (9, 16)
    assert str(rep.probability) == "9/16"
    assert triple_correlation(maps.graph_of(f)) == 9


@pytest.mark.parametrize("n,p", [(1, 3), (2, 5), (3, 11), (4, 17), (5, 37), (6, 67)])
def test_binary_embedding_matches_oracle(n, p):
    f = maps.binary_embedding(n, p)
    table = {x: f(x) for x in f.domain.elements()}
    assert maps.agreement_probability(f).good_pairs == oracles.agreement(f.domain.moduli, (p,), table) == 3**n


def test_binary_embedding_rejects_bad_parameters():
    with pytest.raises(ValueError):
        maps.binary_embedding(3, 7)
    with pytest.raises(ValueError):
        maps.binary_embedding(2, 9)


def test_carry_defect_exhaustive_n4():
    f = maps.binary_embedding(4, 17)
    for x in f.domain.elements():
        for y in f.domain.elements():
            (d,) = maps.carry_defect(f, x, y)
            assert d == maps.carry_formula(17, x, y)
            assert (d == 0) == all(a * b == 0 for a, b in zip(x, y))


def test_carry_defect_requires_binary_map():
    with pytest.raises(GroupError):
        maps.carry_defect(maps.identity_map(GroupSpec([2])), (0,), (1,))


@pytest.mark.parametrize("p,q", [(3, 5), (5, 7), (5, 11), (7, 11), (13, 17)])
def test_centered_unwrap_matches_oracle(p, q):
    f = maps.centered_unwrap(p, q)
    assert f.injective
    good = maps.agreement_probability(f).good_pairs
    assert good == oracles.centered_agreement(p, q) == maps.centered_good_pairs(p)


def test_centered_unwrap_example():


    assert maps.agreement_probability(maps.centered_unwrap(5, 11)).probability == Fraction(19, 25)
    with pytest.raises(ValueError):
        maps.centered_unwrap(5, 5)
    with pytest.raises(ValueError):
        maps.centered_unwrap(9, 11)


def test_centered_lift_is_two_step():
    lift = maps.centered_lift(5)
    assert lift.codomain == GroupSpec([0])
    assert [v[0] for v in lift.table] == [0, 1, 2, -2, -1]


@settings(max_examples=80, deadline=None)
@given(finite_specs(max_order=24), finite_specs(max_order=40), st.integers(0, 2**31))
def test_agreement_equals_triple_correlation(G, H, seed):
    rng = np.random.default_rng(seed)
    n, m = G.order(), H.order()
    els = list(H.elements())
    table = [els[int(k)] for k in rng.integers(m, size=n)]
    f = maps.PointMap(G, H, table)
    good = maps.agreement_probability(f).good_pairs
    assert good == triple_correlation(maps.graph_of(f))
    assert good == oracles.agreement(G.moduli, H.moduli, dict(zip(G.elements(), table)))
    assert maps.agreement_probability(f, threads=3).good_pairs == good
    if f.injective:
        assert triple_correlation(maps.swap_graph(f)) == good


@settings(max_examples=60, deadline=None)
@given(finite_specs(max_order=30, max_len=2), finite_specs(max_order=30, max_len=2), st.data())
def test_homomorphisms_have_probability_one(G, H, data):
    images = []
    for d in G.moduli:
        cands = [h for h in H.elements() if all((d * c) % m == 0 for c, m in zip(h, H.moduli))]
        images.append(data.draw(st.sampled_from(cands)))
    f = maps.homomorphism(G, H, images)
    assert maps.agreement_probability(f).probability == 1


def test_compose_and_projection():
    f = maps.centered_lift(7)
    g = maps.compose(f, maps.Projection(GroupSpec([0]), GroupSpec([11])))
    assert g.table == tuple(((x if x <= 3 else x - 7) % 11,) for x in range(7))
    with pytest.raises(GroupError):
        maps.Projection(GroupSpec([6]), GroupSpec([4]))
    with pytest.raises(GroupError):
        maps.compose(maps.identity_map(GroupSpec([3])), maps.identity_map(GroupSpec([5])))


def test_swap_graph_needs_injective():
    f = maps.PointMap(GroupSpec([2]), GroupSpec([3]), [(0,), (0,)])
    with pytest.raises(GroupError):
        maps.swap_graph(f)


def test_report_json():
    rep = maps.agreement_probability(maps.binary_embedding(2, 5))
    assert rep.to_json() == {"good_pairs": 9, "total": 16, "probability": "9/16", "decimal": "0.5625"}


def test_is_subgroup():
    f = maps.identity_map(GroupSpec([4]))
    assert maps.is_subgroup(maps.graph_of(f))
    assert not maps.is_subgroup(maps.graph_of(maps.binary_embedding(2, 5)))


def test_graph_examples():
    f = maps.binary_embedding(1, 3)
    assert maps.graph_of(f).elements() == [(0, 0), (1, 1)]
    assert maps.swap_graph(f).spec == GroupSpec([3, 2])
    assert maps.swap_graph(f).elements() == [(0, 0), (1, 1)]
    const = maps.PointMap(GroupSpec([2]), GroupSpec([2]), [(0,), (0,)])
    assert maps.graph_of(const).elements() == [(0, 0), (1, 0)] and not const.injective
    assert len(maps.graph_of(maps.identity_map(GroupSpec([3])))) == 3
    assert maps.agreement_probability(maps.identity_map(GroupSpec([5]))).probability == 1


def test_carry_examples():
    f = maps.binary_embedding(2, 5)
    assert maps.carry_defect(f, (1, 0), (1, 0)) == (2,)
    assert maps.carry_defect(f, (1, 0), (0, 1)) == (0,)
    assert maps.carry_defect(f, (0, 0), (0, 0)) == (0,)
