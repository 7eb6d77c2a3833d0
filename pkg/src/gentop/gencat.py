"""Diffuse maps, open embeddings, covers and pullbacks along embeddings.

Diffuseness uses the fact that a map is diffuse as soon as it pulls back
(U_y, N_y) negligibly for every point y of the codomain, where N_y is the
largest negligible subset of U_y.  ``is_diffuse_bruteforce`` walks every
negligible element instead and serves as the oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ModeMismatch, NotContinuous, NotDiffuse, NotEmbedding, SpaceMismatch
from .fintop import (
    ContinuousMap, Verdict, bits, continuous_rows, probes_upto, subspace,
)
from .negligible import (
    max_negligible_mask, negligible_by_definition, negligible_local,
    to_element,
)


def _as_map(f):
    if isinstance(f, ContinuousMap):
        return f
    raise TypeError("expected a ContinuousMap")


def _require_continuous(f):
    for i, m in enumerate(f.dom.masks):
        target = f.cod.masks[f.img[i]]
        for j in bits(m):
            if not target >> f.img[j] & 1:
                raise NotContinuous(f.dom.points[i])


# ------------------------------------------------------------ diffuseness

def codomain_tests(cod):
    """Pairs (U_y, N_y) with N_y nonempty, one per distinct minimal open."""
    def build():
        seen = {}
        for m in cod.masks:
            if m not in seen:
                top = max_negligible_mask(cod, m)
                if top:
                    seen[m] = top
        return tuple(sorted(seen.items()))
    return cod.memo("diffuse_tests", build)


def _point_closure_witness(f, u):
    """Smallest-index negligible point closure in u whose pullback fails."""
    cod, dom = f.cod, f.dom
    pu = f.preimage_mask(u)
    for z in bits(u):
        cz = cod.upmasks[z] & u
        if negligible_local(cod, u, cz) and not negligible_local(dom, pu, f.preimage_mask(cz)):
            return cz
    return None


def is_diffuse(f):
    """Diffuseness with a failing negligible element of the codomain as witness."""
    f = _as_map(f)
    _require_continuous(f)
    for u, top in codomain_tests(f.cod):
        if not negligible_local(f.dom, f.preimage_mask(u), f.preimage_mask(top)):
            cz = _point_closure_witness(f, u)
            return Verdict(False, to_element(f.cod, u, cz if cz is not None else top))
    return Verdict(True)


def is_diffuse_bruteforce(f):
    """Oracle: every negligible element of the codomain, decided by definition."""
    f = _as_map(f)
    _require_continuous(f)
    cod, dom = f.cod, f.dom
    closed = cod.closed_masks()
    for u in cod.open_masks():
        for i in sorted({c & u for c in closed}):
            if not negligible_by_definition(cod, u, i):
                continue
            if not negligible_by_definition(dom, f.preimage_mask(u), f.preimage_mask(i)):
                return Verdict(False, to_element(cod, u, i))
    return Verdict(True)


def diffuse_flags(dom, cod, rows):
    """Diffuseness of many continuous maps dom → cod given as index rows."""
    rows = np.asarray(rows)
    k = rows.shape[0]
    ok = np.ones(k, dtype=bool)
    if k == 0:
        return ok
    tests = codomain_tests(cod)
    if dom.kernel_ok and cod.kernel_ok:
        for u, top in tests:
            pu = _kernels.preimage(rows, u)
            pi = _kernels.preimage(rows, top)
            ok &= _kernels.negligible_local(pu, pi, dom.np_masks, dom.np_adjacency)
        return ok
    for t in range(k):
        f = ContinuousMap.from_indices(dom, cod, rows[t])
        ok[t] = all(negligible_local(dom, f.preimage_mask(u), f.preimage_mask(top)) for u, top in tests)
    return ok


@dataclass(frozen=True)
class DiffuseMap:
    map: ContinuousMap
    certificate: tuple


def certify_diffuse(f):
    """DiffuseMap whose certificate lists each (element, pullback, verdict) checked."""
    verdict = is_diffuse(f)
    if not verdict.ok:
        raise NotDiffuse(verdict.witness)
    records = []
    for u, top in codomain_tests(f.cod):
        pu, pi = f.preimage_mask(u), f.preimage_mask(top)
        records.append((to_element(f.cod, u, top), to_element(f.dom, pu, pi), True))
    return DiffuseMap(f, tuple(records))


# ------------------------------------------------------ embeddings, covers

def is_open_map(f):
    return all(f.image_mask(m) == f.cod.masks[f.img[i]] for i, m in enumerate(f.dom.masks))


def is_injective(f):
    return len(set(f.img)) == len(f.img)


def is_open_embedding(f):
    """Injective, continuous and open: f(U_x) = U_f(x) for every x."""
    _require_continuous(f)
    return is_injective(f) and is_open_map(f)


def is_local_embedding(f):
    """Each minimal open maps injectively and openly."""
    _require_continuous(f)
    if not is_open_map(f):
        return False
    for m in f.dom.masks:
        imgs = [f.img[j] for j in bits(m)]
        if len(set(imgs)) != len(imgs):
            return False
    return True


def fiber_specialization_pair(f):
    """A pair x ≠ y in one fiber with y in every neighbourhood of x, or None."""
    for i, m in enumerate(f.dom.masks):
        for j in bits(m):
            if j != i and f.img[i] == f.img[j]:
                return (f.dom.points[i], f.dom.points[j])
    return None


def is_fdl_local_subset(f):
    """Local embedding with fibers separated as in the finite-to-one topology."""
    verdict = is_diffuse(f)
    if not verdict.ok:
        raise NotDiffuse(verdict.witness)
    return is_local_embedding(f) and fiber_specialization_pair(f) is None


MODES = ("pseudogeometric", "pseudoetale")


@dataclass(frozen=True)
class Cover:
    target: object
    legs: tuple
    mode: str = "pseudogeometric"


def is_cover(legs, target, mode="pseudogeometric"):
    """Verdict for a family of legs covering target; witness names the failure."""
    if mode not in MODES:
        raise ModeMismatch(f"unknown cover mode {mode!r}; expected one of {MODES}")
    legs = list(legs)
    if not legs:
        return Verdict(False, "no legs")
    covered = 0
    for k, leg in enumerate(legs):
        if leg.cod != target:
            raise SpaceMismatch(f"leg {k} does not map into the target")
        if mode == "pseudogeometric":
            if not is_open_embedding(leg):
                return Verdict(False, ("not an open embedding", k))
        else:
            if not is_diffuse(leg).ok:
                return Verdict(False, ("not diffuse", k))
            if not is_fdl_local_subset(leg):
                return Verdict(False, ("not a finite discrete local subset", k))
        covered |= leg.image_mask(leg.dom.full)
    missing = target.full & ~covered
    if missing:
        return Verdict(False, ("uncovered", target.points[(missing & -missing).bit_length() - 1]))
    return Verdict(True)


def make_cover(legs, target, mode="pseudogeometric"):
    v = is_cover(legs, target, mode)
    if not v.ok:
        from .errors import NotACover
        raise NotACover(str(v.witness))
    return Cover(target, tuple(legs), mode)


# ------------------------------------------------------------- pullbacks

def pullback_embedding(f, u):
    """Pullback (V, v, g) of an open embedding u: U → A along f: C → A."""
    if f.cod != u.cod:
        raise SpaceMismatch("f and u must share a codomain")
    if not is_open_embedding(u):
        raise NotEmbedding("u is not an open embedding")
    image = u.image_mask(u.dom.full)
    vmask = f.preimage_mask(image)
    C = f.dom
    V = subspace(C, C.unmask(vmask))
    back = {j: i for i, j in enumerate(u.img)}
    v = ContinuousMap.from_indices(V, C, [C.index[p] for p in V.points])
    g = ContinuousMap.from_indices(V, u.dom, [back[f.img[C.index[p]]] for p in V.points])
    return V, v, g


def verify_pullback_embedding(f, u, result, probe_bound=2):
    """Commutativity plus the universal property against diffuse probe maps."""
    V, v, g = result
    if [u.img[j] for j in g.img] != [f.img[j] for j in v.img]:
        return Verdict(False, "square does not commute")
    for T in probes_upto(probe_bound):
        a_rows = continuous_rows(T, f.dom)
        a_rows = a_rows[diffuse_flags(T, f.dom, a_rows)]
        b_rows = continuous_rows(T, u.dom)
        b_rows = b_rows[diffuse_flags(T, u.dom, b_rows)]
        lifts = {}
        h_rows = continuous_rows(T, V)
        h_rows = h_rows[diffuse_flags(T, V, h_rows)]
        for h in h_rows:
            key = (tuple(v.img[j] for j in h), tuple(g.img[j] for j in h))
            lifts[key] = lifts.get(key, 0) + 1
        for a in a_rows:
            fa = tuple(f.img[j] for j in a)
            for b in b_rows:
                if tuple(u.img[j] for j in b) != fa:
                    continue
                count = lifts.get((tuple(int(x) for x in a), tuple(int(x) for x in b)), 0)
                if count != 1:
                    return Verdict(False, (T.name, tuple(int(x) for x in a), tuple(int(x) for x in b), count))
    return Verdict(True)


# --------------------------------------------------------- discreteness

@dataclass(frozen=True)
class DiscretenessReport:
    ok: bool
    probe_bound: int
    reason: str
    witness: object = None

    def __bool__(self):
        return self.ok

    def describe(self):
        if self.ok:
            return f"discrete up to probe size {self.probe_bound}"
        return f"not discrete: {self.reason}"


def discreteness_probe(f, probe_bound=3):
    """Fiber separation, then the equalizer test on connected probes up to the bound."""
    _require_continuous(f)
    bad = fiber_specialization_pair(f)
    if bad is not None:
        return DiscretenessReport(False, probe_bound, "fiber points not separated", bad)
    for D in probes_upto(probe_bound):
        if not D.is_connected_mask(D.full):
            continue
        rows = continuous_rows(D, f.dom)
        rows = rows[diffuse_flags(D, f.dom, rows)]
        groups = {}
        for h in rows:
            groups.setdefault(tuple(f.img[j] for j in h), []).append(tuple(int(x) for x in h))
        subsets = _diffuse_subsets(D)
        for lifts in groups.values():
            for a in range(len(lifts)):
                for b in range(a + 1, len(lifts)):
                    h1, h2 = lifts[a], lifts[b]
                    eq = sum(1 << i for i in range(len(D)) if h1[i] == h2[i])
                    for s in subsets:
                        if s & ~eq == 0:
                            return DiscretenessReport(
                                False, probe_bound, "distinct lifts agree on a nonempty diffuse subset",
                                (D.name, h1, h2, D.sorted_points(s)),
                            )
    return DiscretenessReport(True, probe_bound, "")


def _diffuse_subsets(D):
    out = []
    for s in range(1, D.full + 1):
        sub = subspace(D, D.unmask(s))
        inc = ContinuousMap.from_indices(sub, D, [D.index[p] for p in sub.points])
        if is_diffuse(inc).ok:
            out.append(s)
    return out
