import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gentop.errors import (BudgetExceeded, MalformedElement, NotClosed, NotLocalHomeoOffI,
                           SpaceMismatch)
from gentop.fintop import (EMPTY, POINT, ContinuousMap, continuous_maps, discrete, find_homeomorphism,
                           identity, inclusion, indiscrete, probe_catalog, random_space)
from gentop.fixtures import K5, LINE3, P9, P25, rotation25
from gentop.grpquot import build_quotient
from gentop.lambda_rep import (NegInstance, agrees_with_embedding_pullback, drop_point,
                               hausdorff_preserved, lambda_construct, lambda_lines,
                               local_connectivity_report, local_selectors, make_instance,
                               neg_functor_values, off_k_conditions, pair_coverage,
                               pullback_via_lambda, retopologize, verify_general_pullback,
                               verify_representability, image_closure_check, basis_set_laws)

import oracles

X3 = frozenset(LINE3.points)
MM = ("m", "m")


def line3_instance():
    return make_instance(LINE3, [(X3, {"m"})])


def p9_instance():
    return make_instance(P9, [(P9.points, {MM})])


def _neg_oracle(X, base, Y):
    out = []
    for f in oracles.all_maps(Y, X):
        if not oracles.continuous(Y, X, f):
            continue
        if all(oracles.negligible(Y, frozenset(p for p in Y.points if f[p] in U),
                                  frozenset(p for p in Y.points if f[p] in I)) for U, I in base):
            out.append(f)
    return out


# ---- the functor

def test_neg_values_examples():
    vals = neg_functor_values(line3_instance(), POINT)
    assert sorted(f(0) for f in vals) == ["l", "r"]
    assert len(neg_functor_values(line3_instance(), EMPTY)) == 1
    vals = neg_functor_values(p9_instance(), POINT)
    assert len(vals) == 8 and MM not in {f(0) for f in vals}


def test_neg_values_match_set_oracle():
    cases = [(LINE3, [(X3, frozenset({"m"}))]), (P9, [(frozenset(P9.points), frozenset({MM}))])]
    for X, base in cases:
        inst = make_instance(X, base)
        for n in (1, 2):
            for Y in probe_catalog(n):
                got = [f.mapping for f in neg_functor_values(inst, Y)]
                assert got == _neg_oracle(X, base, Y)


# ---- the construction

def test_line3_lambda_shape():
    lam = lambda_construct(line3_instance())
    L = lam.space
    assert L.points == (("l", 0), ("m", 0), ("m", 1), ("r", 0))
    opens = {L.minopen(p) for p in L.points}
    assert opens == {frozenset({("l", 0)}), frozenset({("l", 0), ("m", 0)}),
                     frozenset({("m", 1), ("r", 0)}), frozenset({("r", 0)})}
    assert not L.is_connected_mask(L.full)
    assert lambda_lines(lam)[0] == "points: 4  over 3"


def test_empty_base_gives_x_back():
    for X in probe_catalog(3) + [LINE3, P9, K5]:
        lam = lambda_construct(NegInstance(X, ()))
        assert len(lam.space) == len(X)
        assert sorted(lam.lam.img) == list(range(len(X)))
        phi = {p: lam.lam(p) for p in lam.space.points}
        for p in lam.space.points:
            assert frozenset(phi[q] for q in lam.space.minopen(p)) == X.minopen(phi[p])


def test_local_cap_raises():
    inst = make_instance(P25, [(P25.points, {(2, 2)})])
    with pytest.raises(BudgetExceeded):
        local_selectors(inst, P25.index[(2, 2)], max_local=0)


# ---- representability

def test_representability_line3():
    rep = verify_representability(lambda_construct(line3_instance()), 3)
    assert rep.ok, rep.lines()


def test_representability_p9():
    rep = verify_representability(lambda_construct(p9_instance()), 3)
    assert rep.ok, rep.lines()


def test_representability_trivial_base():
    for X in (LINE3, K5):
        assert verify_representability(lambda_construct(NegInstance(X, ())), 2)


def test_dropping_a_point_breaks_surjectivity():
    lam = lambda_construct(line3_instance())
    rep = verify_representability(drop_point(lam, ("m", 1)), 3)
    assert rep.injective and not rep.surjective
    assert rep.missing is not None


def _random_instance(rng):
    X = random_space(int(rng.integers(2, 6)), rng)
    cands = sorted({(u, c & u) for u in X.open_masks() for c in X.closed_masks() if c & u})
    if not cands:
        return NegInstance(X, ())
    pick = rng.choice(len(cands), size=min(2, len(cands)), replace=False)
    return NegInstance(X, tuple(cands[p] for p in pick))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_random_instances_representable_and_lawful(seed):
    lam = lambda_construct(_random_instance(np.random.default_rng(seed)))
    assert verify_representability(lam, 2)
    assert basis_set_laws(lam) == []
    assert image_closure_check(lam) == []


# ---- laws and mutations

def test_basis_laws_on_fixtures():
    for inst in (line3_instance(), p9_instance()):
        lam = lambda_construct(inst)
        assert basis_set_laws(lam) == []
        assert image_closure_check(lam) == []


def test_hausdorff():
    D = discrete("abc")
    lam = lambda_construct(NegInstance(D, ()))
    assert hausdorff_preserved(lam) is True
    assert hausdorff_preserved(lambda_construct(line3_instance())) is None
    blurred = retopologize(lam, indiscrete(lam.space.points))
    assert hausdorff_preserved(blurred) is False
    with pytest.raises(SpaceMismatch):
        retopologize(lam, discrete("xyz"))


def test_local_connectivity():
    inst = p9_instance()
    assert off_k_conditions(inst, {MM})
    rep = local_connectivity_report(lambda_construct(inst), {MM})
    assert rep.ok
    with pytest.raises(NotClosed):
        local_connectivity_report(lambda_construct(inst), {("l", "l")})


# ---- general pullback

def test_pullback_embedding_consistency_random():
    rng = np.random.default_rng(8)
    opens = [m for m in P9.open_masks() if m]
    for _ in range(15):
        C = probe_catalog(3)[int(rng.integers(0, 9))]
        maps = continuous_maps(C, P9)
        c = maps[int(rng.integers(0, len(maps)))]
        u = inclusion(P9, P9.unmask(opens[int(rng.integers(0, len(opens)))]))
        assert agrees_with_embedding_pullback(c, u)


def test_rotation_self_pullback_covers_pairs():
    _, b = build_quotient(rotation25())
    res = pullback_via_lambda(b, b, {(2, 2)})
    assert len(res.set_pullback) == 49
    assert pair_coverage(res) == []
    assert res.K == frozenset({((2, 2), (2, 2))})


def test_constant_map_at_fixed_orbit():
    _, b = build_quotient(rotation25())
    o = b((2, 2))
    c = ContinuousMap(POINT, b.cod, {0: o})
    res = pullback_via_lambda(c, b, {(2, 2)})
    assert len(res.set_pullback) == 1
    assert len(res.space) == 0


def test_general_pullback_universal_small():
    # b = identity on LINE3 is a homeomorphism; the pullback along c is C itself
    for c in [identity(LINE3), ContinuousMap(POINT, LINE3, {0: "l"})]:
        res = pullback_via_lambda(c, identity(LINE3), [])
        assert find_homeomorphism(res.space, c.dom) is not None
        assert verify_general_pullback(c, identity(LINE3), res, 2)


def test_general_pullback_errors():
    _, b = build_quotient(rotation25())
    with pytest.raises(NotClosed):
        pullback_via_lambda(b, b, {(1, 1)})
    with pytest.raises(MalformedElement):
        pullback_via_lambda(identity(LINE3), identity(LINE3), {"m"})
    with pytest.raises(NotLocalHomeoOffI):
        pullback_via_lambda(b, b, [])
    with pytest.raises(SpaceMismatch):
        pullback_via_lambda(identity(LINE3), identity(P9), [])
