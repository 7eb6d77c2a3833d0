import itertools

import numpy as np
import pytest

from gentop.errors import ModeMismatch, NotACover, NotContinuous, NotDiffuse, NotEmbedding
from gentop.fintop import (POINT, ContinuousMap, continuous_maps, continuous_rows, disjoint_union,
                           find_homeomorphism, identity, inclusion, probe_catalog, probes_upto,
                           subspace)
from gentop.fixtures import K5, LINE3, P9, SIERP
from gentop.gencat import (certify_diffuse, diffuse_flags, discreteness_probe, is_cover,
                           is_diffuse, is_diffuse_bruteforce, is_fdl_local_subset,
                           is_open_embedding, make_cover, pullback_embedding,
                           verify_pullback_embedding, fiber_specialization_pair)

import oracles

MM = ("m", "m")
X3 = frozenset(LINE3.points)


def const(X, Y, y):
    return ContinuousMap(X, Y, {p: y for p in X.points})


def fold():
    h = disjoint_union([SIERP, SIERP])
    return ContinuousMap(h.space, SIERP, {(t, p): p for t, p in h.space.points}), h


# ---- diffuseness

def test_diffuse_examples():
    assert is_diffuse(identity(P9))
    v = is_diffuse(const(P9, P9, MM))
    assert not v
    assert v.witness.U == frozenset(P9.points) and v.witness.I == frozenset({MM})
    assert is_diffuse(const(LINE3, LINE3, "m"))
    for Y in probe_catalog(3):
        for f in continuous_maps(Y, LINE3):
            assert is_diffuse(f)


def test_diffuse_requires_continuity():
    bad = ContinuousMap(SIERP, SIERP, {0: 1, 1: 0}, check=False)
    with pytest.raises(NotContinuous):
        is_diffuse(bad)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_diffuse_matches_set_oracle(n):
    for X in probe_catalog(n):
        for Y in probe_catalog(3):
            for f in continuous_maps(X, Y):
                want = oracles.diffuse(X, Y, f.mapping)
                assert bool(is_diffuse(f)) == want
                assert bool(is_diffuse_bruteforce(f)) == want


def test_diffuse_into_p9_matches_bruteforce():
    for X in probes_upto(3):
        rows = continuous_rows(X, P9)[::3]
        flags = diffuse_flags(X, P9, rows)
        for r, ok in zip(rows, flags):
            f = ContinuousMap.from_indices(X, P9, r)
            assert bool(is_diffuse_bruteforce(f)) == bool(ok) == bool(is_diffuse(f))


def test_certificate():
    cert = certify_diffuse(identity(P9))
    assert cert.certificate and all(ok for _, _, ok in cert.certificate)
    with pytest.raises(NotDiffuse):
        certify_diffuse(const(P9, P9, MM))


# ---- embeddings and covers

def test_open_embedding_examples():
    assert is_open_embedding(inclusion(LINE3, {"l"}))
    assert not is_open_embedding(inclusion(LINE3, {"m"}))
    diag = ContinuousMap(LINE3, P9, {p: (p, p) for p in LINE3.points})
    assert not is_open_embedding(diag)


def test_cover_examples():
    legs = [inclusion(LINE3, {"l"}), inclusion(LINE3, X3)]
    assert is_cover(legs, LINE3)
    v = is_cover([inclusion(LINE3, {"l"}), inclusion(LINE3, {"r"})], LINE3)
    assert not v and v.witness == ("uncovered", "m")
    f, _ = fold()
    assert is_cover([f], SIERP, "pseudoetale")
    assert not is_cover([f], SIERP)
    with pytest.raises(ModeMismatch):
        is_cover(legs, LINE3, "etale")
    with pytest.raises(NotACover):
        make_cover([inclusion(LINE3, {"l"})], LINE3)


def test_pullback_of_cover_is_cover():
    # pulling an open cover back along any continuous map gives a cover of the domain
    covers = [[inclusion(LINE3, {"l", "m", "r"})],
              [inclusion(LINE3, {"l"}), inclusion(LINE3, {"r"}), inclusion(LINE3, X3)]]
    for X in probes_upto(3):
        for f in continuous_maps(X, LINE3):
            for legs in covers:
                pulled = [pullback_embedding(f, u)[1] for u in legs]
                assert is_cover(pulled, X)


# ---- pullbacks along embeddings

def test_pullback_embedding_examples():
    u = inclusion(LINE3, {"l"})
    V, v, g = pullback_embedding(identity(LINE3), u)
    assert find_homeomorphism(V, u.dom) is not None
    V, v, g = pullback_embedding(const(P9, LINE3, "r"), u)
    assert len(V) == 0
    proj = ContinuousMap(P9, LINE3, {p: p[0] for p in P9.points})
    V, v, g = pullback_embedding(proj, u)
    assert set(V.points) == {("l", b) for b in LINE3.points}
    assert verify_pullback_embedding(proj, u, (V, v, g), probe_bound=2)
    with pytest.raises(NotEmbedding):
        pullback_embedding(proj, ContinuousMap(LINE3, LINE3, {"l": "l", "m": "m", "r": "l"}))


def test_pullback_embedding_square_and_universality():
    rng = np.random.default_rng(2)
    opens = [m for m in P9.open_masks() if m]
    for _ in range(10):
        X = probes_upto(3)[int(rng.integers(0, 13))]
        maps = continuous_maps(X, P9)
        f = maps[int(rng.integers(0, len(maps)))]
        u = inclusion(P9, P9.unmask(opens[int(rng.integers(0, len(opens)))]))
        res = pullback_embedding(f, u)
        assert verify_pullback_embedding(f, u, res, probe_bound=2)


# ---- local subsets and discreteness

def test_fdl_examples():
    assert is_fdl_local_subset(inclusion(LINE3, {"l"}))
    f, _ = fold()
    assert is_fdl_local_subset(f)
    assert not is_fdl_local_subset(const(P9, POINT, 0))
    with pytest.raises(NotDiffuse):
        is_fdl_local_subset(const(P9, P9, MM))


def test_discreteness_examples():
    d = discreteness_probe(inclusion(LINE3, {"l", "m"}), 3)
    assert d and d.describe() == "discrete up to probe size 3"
    f, _ = fold()
    assert discreteness_probe(f, 3)
    collapse = ContinuousMap(LINE3, SIERP, {"l": 0, "m": 0, "r": 1})
    assert fiber_specialization_pair(collapse) == ("m", "l")
    d = discreteness_probe(collapse, 3)
    assert not d and d.reason == "fiber points not separated"


# ---- laws

def _open_covers(X, limit=3):
    opens = [u for u in X.open_masks() if u]
    for r in range(1, limit + 1):
        for cov in itertools.combinations(opens, r):
            acc = 0
            for v in cov:
                acc |= v
            if acc == X.full:
                yield cov


def test_diffuseness_is_local():
    for X in probes_upto(3):
        covers = list(_open_covers(X))
        for Y in probe_catalog(3) + [P9]:
            for f in continuous_maps(X, Y):
                d = bool(is_diffuse(f))
                for cov in covers:
                    parts = [f.restrict(X.unmask(v)) for v in cov]
                    if all(is_diffuse(p) for p in parts):
                        assert d


def test_composition_of_diffuse_is_diffuse():
    spaces = probes_upto(2) + [LINE3, SIERP]
    for A, B in itertools.product(spaces, repeat=2):
        for f in continuous_maps(A, B):
            if not is_diffuse(f):
                continue
            for g in continuous_maps(B, P9):
                if is_diffuse(g):
                    assert is_diffuse(g.compose(f))


def test_embedding_postcomposition_reflects_diffuseness():
    for U in [m for m in P9.open_masks() if m]:
        v = inclusion(P9, P9.unmask(U))
        for X in probes_upto(2):
            for f in continuous_maps(X, v.dom):
                assert bool(is_diffuse(v.compose(f))) == bool(is_diffuse(f))


def test_isomorphisms_diffuse():
    for X in probe_catalog(4):
        assert is_diffuse(identity(X))


def test_gluing_diffuse_maps_unique():
    # every compatible family of diffuse legs on an open cover has exactly one diffuse glue
    X = K5
    cov = [X.mask({0, 1}), X.mask({1, 2, 3}), X.mask({3, 4})]
    subs = [subspace(X, X.unmask(v)) for v in cov]
    for Y in probes_upto(2) + [LINE3]:
        glue = continuous_maps(X, Y)
        legs = [[f for f in continuous_maps(S, Y) if is_diffuse(f)] for S in subs]
        for fam in itertools.product(*legs):
            table = {}
            ok = True
            for f in fam:
                for p, q in f.mapping.items():
                    if table.setdefault(p, q) != q:
                        ok = False
            if not ok:
                continue
            found = [g for g in glue if g.mapping == table]
            assert len(found) == 1
            assert is_diffuse(found[0])
