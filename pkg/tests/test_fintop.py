import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gentop import fintop
from gentop.errors import (BudgetExceeded, EmptyList, NotAPartition, NotContinuous,
                           NotReflexive, NotTransitive, UnknownPoint)
from gentop.fintop import (POINT, closure, components, continuous_maps, disjoint_union,
                           enumerate_maps, find_homeomorphism, indiscrete, discrete,
                           is_continuous, make_space, probe_catalog, product, quotient_space,
                           random_space, subspace)
from gentop.fixtures import K5, LINE3, P9, P25, SIERP

import oracles


def fs(*xs):
    return frozenset(xs)


def test_fixture_spaces_valid():
    assert SIERP.minopen(0) == fs(0, 1)
    assert SIERP.minopen(1) == fs(1)
    assert LINE3.minopen("m") == fs("l", "m", "r")
    assert len(P9) == 9 and len(P25) == 25


def test_make_space_rejects():
    with pytest.raises(NotReflexive):
        make_space([0, 1], {0: [1], 1: [1]})
    with pytest.raises(NotTransitive):
        make_space([0, 1, 2], {0: [0, 1], 1: [1, 2], 2: [2, 0]})
    with pytest.raises(UnknownPoint):
        make_space([0], {0: [0, 7]})
    with pytest.raises(UnknownPoint):
        make_space([0, 1], {0: [0]})


def test_closure_examples():
    assert closure(SIERP, {1}) == fs(0, 1)
    assert closure(LINE3, {"m"}) == fs("m")
    assert closure(LINE3, set()) == fs()


def test_components_examples():
    assert sorted(map(sorted, components(LINE3, {"l", "r"}))) == [["l"], ["r"]]
    assert len(components(LINE3, {"l", "m", "r"})) == 1
    assert len(components(SIERP, {0, 1})) == 1


def test_subspace_examples():
    S = subspace(LINE3, {"l", "m"})
    assert S.minopen("l") == fs("l") and S.minopen("m") == fs("l", "m")
    assert subspace(LINE3, LINE3.points) == LINE3
    assert len(subspace(LINE3, set())) == 0


def test_disjoint_union_examples():
    h = disjoint_union([SIERP, SIERP])
    assert len(h.space) == 4 and len(h.injections) == 2
    h = disjoint_union([SIERP, LINE3])
    assert len(h.space) == 5
    for inj in h.injections:
        assert h.space.is_open_mask(inj.image_mask(inj.dom.full))
    h = disjoint_union([LINE3])
    assert find_homeomorphism(h.space, LINE3) is not None
    with pytest.raises(EmptyList):
        disjoint_union([])


def test_quotient_space_examples():
    assert len(quotient_space(SIERP, [{0, 1}]).space) == 1
    q = quotient_space(LINE3, [{"l", "r"}, {"m"}]).space
    assert find_homeomorphism(q, SIERP) is not None
    q = quotient_space(LINE3, [{p} for p in LINE3.points]).space
    assert find_homeomorphism(q, LINE3) is not None
    with pytest.raises(NotAPartition):
        quotient_space(LINE3, [{"l"}, {"m"}])
    with pytest.raises(NotAPartition):
        quotient_space(LINE3, [{"l", "m"}, {"m", "r"}])


def test_quotient_is_finest_continuous_topology():
    # oracle: a set is open in the quotient iff its preimage is open
    rng = np.random.default_rng(3)
    for _ in range(20):
        X = random_space(5, rng)
        labels = rng.integers(0, 3, size=5)
        blocks = [{p for p, c in zip(X.points, labels) if c == k} for k in set(labels.tolist())]
        h = quotient_space(X, blocks)
        q = h.projection
        got = {frozenset(U) for U in fintop.open_sets(h.space)}
        want = set()
        for S in oracles.subsets(h.space.points):
            if oracles.is_open(X, frozenset(p for p in X.points if q(p) in S)):
                want.add(S)
        assert got == want


def test_product_examples():
    assert len(P9) == 9
    assert K5.minopen(2) == fs(1, 2, 3) and K5.minopen(1) == fs(1)
    assert K5.minopen(0) == fs(0, 1) and K5.minopen(4) == fs(3, 4)
    assert P25.minopen((2, 2)) == frozenset(itertools.product([1, 2, 3], repeat=2))
    assert find_homeomorphism(product(LINE3, POINT), LINE3) is not None


def test_is_continuous_examples():
    assert is_continuous(P9, P9, {p: p for p in P9.points})
    assert is_continuous(LINE3, SIERP, {"l": 1, "m": 0, "r": 1})
    v = is_continuous(SIERP, SIERP, {0: 1, 1: 0})
    assert not v and v.witness == 0
    with pytest.raises(NotContinuous):
        fintop.ContinuousMap(SIERP, SIERP, {0: 1, 1: 0})


def test_enumerate_maps_examples():
    assert len(enumerate_maps(POINT, SIERP, "continuous")) == 2
    maps = enumerate_maps(SIERP, SIERP, "continuous")
    assert maps == [{0: 0, 1: 0}, {0: 0, 1: 1}, {0: 1, 1: 1}]
    # f(1) must lie in U_f(0): 1 + 3 + 1 choices (the oracle below agrees)
    assert len(enumerate_maps(SIERP, LINE3, "continuous")) == 5
    with pytest.raises(BudgetExceeded):
        enumerate_maps(P9, P9, budget=1000)


def test_enumerate_maps_all_count():
    assert len(enumerate_maps(SIERP, LINE3)) == 9
    assert len(enumerate_maps(LINE3, SIERP)) == 8


@pytest.mark.parametrize("X,Y", [(SIERP, LINE3), (LINE3, LINE3), (K5, LINE3), (LINE3, K5)])
def test_continuous_maps_match_oracle(X, Y):
    want = [f for f in oracles.all_maps(X, Y) if oracles.continuous(X, Y, f)]
    got = [m.mapping for m in continuous_maps(X, Y)]
    assert got == want
    assert [m for m in enumerate_maps(X, Y, "continuous")] == want


def test_probe_catalog_counts():
    assert [len(probe_catalog(n)) for n in range(5)] == [1, 1, 3, 9, 33]
    with pytest.raises(BudgetExceeded):
        probe_catalog(5)


def _relabel_top(T, p):
    return tuple(sorted(tuple(sorted(p[i] for i in U)) for U in T))


def _relabel_pre(R, p):
    return tuple(sorted((p[a], p[b]) for a, b in R))


def test_probe_catalog_against_oracle():
    for n in range(1, 4):
        assert len(probe_catalog(n)) == oracles.iso_classes(oracles.topologies(n), n, _relabel_top)
    assert len(probe_catalog(4)) == oracles.iso_classes(oracles.preorders(4), 4, _relabel_pre)


def test_probe_catalog_pairwise_non_homeomorphic_and_deterministic():
    cat = probe_catalog(4)
    for a, b in itertools.combinations(cat, 2):
        assert find_homeomorphism(a, b) is None
    assert [s.masks for s in cat] == [s.masks for s in probe_catalog(4)]
    two = probe_catalog(2)
    kinds = {(s.masks == discrete(range(2)).masks, s.masks == indiscrete(range(2)).masks) for s in two}
    assert kinds == {(True, False), (False, True), (False, False)}


def test_minimal_opens_connected_over_catalog():
    for n in range(1, 5):
        for X in probe_catalog(n):
            for i, p in enumerate(X.points):
                assert len(components(X, X.minopen(p))) == 1


def test_components_match_oracle_on_catalog():
    for X in probe_catalog(3):
        for S in oracles.subsets(X.points):
            got = sorted(sorted(c) for c in components(X, S))
            want = sorted(sorted(c) for c in oracles.components(X, S))
            assert got == want


def test_open_sets_match_oracle():
    for X in probe_catalog(4) + [LINE3, K5]:
        assert {frozenset(U) for U in fintop.open_sets(X)} == set(oracles.opens(X))


spaces = st.builds(lambda n, seed: random_space(n, np.random.default_rng(seed)),
                   st.integers(1, 7), st.integers(0, 10_000))


@settings(max_examples=60, deadline=None)
@given(spaces, st.data())
def test_closure_laws(X, data):
    S = frozenset(data.draw(st.sets(st.sampled_from(list(X.points)))))
    T = frozenset(data.draw(st.sets(st.sampled_from(list(X.points)))))
    c = closure(X, S)
    assert S <= c
    assert closure(X, c) == c
    assert closure(X, S | T) >= c
    assert c == oracles.closure(X, S)


@settings(max_examples=60, deadline=None)
@given(spaces, st.data())
def test_subspace_of_subspace(X, data):
    S = frozenset(data.draw(st.sets(st.sampled_from(list(X.points)))))
    T = frozenset(data.draw(st.sets(st.sampled_from(list(X.points)))))
    a = subspace(subspace(X, S), S & T)
    b = subspace(X, S & T)
    assert a.points == b.points and a.masks == b.masks


def test_orbit_quotient_projection_open():
    from gentop.fixtures import rotation25
    act = rotation25()
    orbits = {frozenset(act.act[g](p) for g in act.elements) for p in P25.points}
    h = quotient_space(P25, orbits)
    q = h.projection
    for u in P25.open_masks():
        assert h.space.is_open_mask(q.image_mask(u))
