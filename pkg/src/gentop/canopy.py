"""Gluing data (charts, overlaps, two structure maps) and its affinization.

The affinization glues the disjoint union of the charts along the relation
R = {((j,x),(k,y)) : some overlap point z has rho1(z) = x and rho2(z) = y}.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import AxiomFailure, BudgetExceeded, NotContinuous
from .fintop import (
    ContinuousMap, MAP_BUDGET, SpaceFamilyHandle, Verdict, bits, disjoint_union,
    point_key, probes_upto, quotient_space, subspace,
)
from .gencat import diffuse_flags, is_diffuse, is_injective, is_local_embedding, is_open_map

LAWS = {
    "reflexivity": "diagonal",
    "symmetry": "symmetry",
    "transitivity": "composition",
}


@dataclass
class Canopy:
    index: tuple
    objects: dict
    overlaps: dict
    rho1: dict
    rho2: dict
    name: str = ""

    def overlap_keys(self):
        return sorted(self.overlaps, key=point_key)

    def is_embedding_canopy(self):
        return all(is_injective(self.rho1[key]) and is_injective(self.rho2[key]) for key in self.overlaps)


def relation(canopy):
    R = set()
    for key in canopy.overlaps:
        j, k = key
        r1, r2 = canopy.rho1[key], canopy.rho2[key]
        for z in range(len(canopy.overlaps[key])):
            R.add(((j, r1.cod.points[r1.img[z]]), (k, r2.cod.points[r2.img[z]])))
    return R


def check_canopy(raw):
    """The first failing law as an AxiomFailure instance, or None."""
    for key in raw.overlap_keys():
        j, k = key
        r1, r2 = raw.rho1[key], raw.rho2[key]
        if r1.dom != raw.overlaps[key] or r2.dom != raw.overlaps[key]:
            return AxiomFailure("structure maps", "domain", key)
        if r1.cod != raw.objects[j] or r2.cod != raw.objects[k]:
            return AxiomFailure("structure maps", "codomain", key)
        for name, r in (("rho1", r1), ("rho2", r2)):
            try:
                ok = is_local_embedding(r) and is_diffuse(r).ok
            except NotContinuous as exc:
                return AxiomFailure("structure maps", "continuity", (key, name, exc.witness))
            if not ok:
                return AxiomFailure("structure maps", "open local embedding", (key, name))
    R = relation(raw)
    points = [(j, x) for j in raw.index for x in raw.objects[j].points]
    for p in points:
        if (p, p) not in R:
            return AxiomFailure("reflexivity", LAWS["reflexivity"], p)
    for a, b in sorted(R, key=point_key):
        if (b, a) not in R:
            return AxiomFailure("symmetry", LAWS["symmetry"], (a, b))
    succ = {}
    for a, b in R:
        succ.setdefault(a, set()).add(b)
    for a in sorted(succ, key=point_key):
        for b in sorted(succ[a], key=point_key):
            for c in sorted(succ.get(b, ()), key=point_key):
                if c not in succ[a]:
                    return AxiomFailure("transitivity", LAWS["transitivity"], (a, b, c))
    return None


def validate_canopy(raw):
    """Return the canopy if R is an equivalence relation with admissible legs; raise AxiomFailure otherwise."""
    failure = check_canopy(raw)
    if failure is not None:
        raise failure
    return raw


def canopy_from_cover(space, opens, name=""):
    """Canopy of a cover of ``space`` by open subsets; charts indexed 0..k-1."""
    charts = [subspace(space, U) for U in opens]
    index = tuple(range(len(charts)))
    objects = dict(zip(index, charts))
    overlaps, rho1, rho2 = {}, {}, {}
    for j in index:
        for k in index:
            common = [p for p in charts[j].points if p in charts[k].index]
            ov = subspace(space, common)
            overlaps[(j, k)] = ov
            rho1[(j, k)] = ContinuousMap.from_indices(ov, charts[j], [charts[j].index[p] for p in ov.points])
            rho2[(j, k)] = ContinuousMap.from_indices(ov, charts[k], [charts[k].index[p] for p in ov.points])
    return Canopy(index, objects, overlaps, rho1, rho2, name)


def canopy_from_group_action(action, name=""):
    """Single chart; the overlap is one copy of the space per group element."""
    from .grpquot import validate_action
    validate_action(action)
    M = action.space
    handle = disjoint_union([M] * len(action.elements), tags=action.elements)
    ov = handle.space
    r1, r2 = [], []
    for g, p in ov.points:
        r1.append(M.index[p])
        r2.append(action.act[g].img[M.index[p]])
    key = (1, 1)
    return Canopy(
        (1,), {1: M}, {key: ov},
        {key: ContinuousMap.from_indices(ov, M, r1)},
        {key: ContinuousMap.from_indices(ov, M, r2)},
        name,
    )


@dataclass
class Affinization:
    canopy: Canopy
    x1: SpaceFamilyHandle
    relation: frozenset
    quotient: SpaceFamilyHandle
    alpha: dict = field(default_factory=dict)

    @property
    def space(self):
        return self.quotient.space


def affinize(canopy):
    """Quotient of the disjoint union of charts by R, with legs alpha(j) = q ∘ beta(j)."""
    index = list(canopy.index)
    x1 = disjoint_union([canopy.objects[j] for j in index], tags=index)
    R = relation(canopy)
    # classes of R, which is an equivalence relation on validated canopies
    seen = {}
    blocks = []
    for p in x1.space.points:
        if p in seen:
            continue
        cls = {b for a, b in R if a == p} | {p}
        for q in cls:
            seen[q] = len(blocks)
        blocks.append(cls)
    quo = quotient_space(x1.space, blocks)
    q = quo.projection
    alpha = {}
    for j, beta in zip(index, x1.injections):
        alpha[j] = ContinuousMap.from_indices(beta.dom, quo.space, [q.img[t] for t in beta.img])
    return Affinization(canopy, x1, frozenset(R), quo, alpha)


# ------------------------------------------------------------ verification

@dataclass
class AffinizationReport:
    cover: Verdict
    identification: Verdict
    fibered: Verdict
    colimit: Verdict
    probe_bound: int
    counts: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(v.ok for v in (self.cover, self.identification, self.fibered, self.colimit))

    def __bool__(self):
        return self.ok

    def lines(self):
        out = []
        for name, v in (("cover", self.cover), ("identification", self.identification),
                        ("fibered product", self.fibered), ("colimit", self.colimit)):
            status = "pass" if v.ok else "FAIL"
            extra = "" if v.ok else f" witness={v.witness!r}"
            out.append(f"{name}: {status}{extra}")
        out.append(f"probes: up to {self.probe_bound} points")
        return out


def verify_affinization(aff, probe_bound=3, budget=MAP_BUDGET):
    canopy = aff.canopy
    X = aff.space
    index = list(canopy.index)

    # (i) the legs are open and jointly surjective
    covered = 0
    cover = Verdict(True)
    for j in index:
        a = aff.alpha[j]
        if not is_open_map(a):
            cover = Verdict(False, ("leg not open", j))
            break
        covered |= a.image_mask(a.dom.full)
    if cover.ok and covered != X.full:
        missing = X.full & ~covered
        cover = Verdict(False, ("uncovered", X.points[(missing & -missing).bit_length() - 1]))

    # (ii) equal images exactly on R-related pairs
    R = relation(canopy)
    ident = Verdict(True)
    for j in index:
        for k in index:
            aj, ak = aff.alpha[j], aff.alpha[k]
            for x in aj.dom.points:
                for y in ak.dom.points:
                    same = aj(x) == ak(y)
                    if same != (((j, x), (k, y)) in R):
                        ident = Verdict(False, ((j, x), (k, y), same))
                        break
                if not ident.ok:
                    break
            if not ident.ok:
                break
        if not ident.ok:
            break

    # (iii) overlaps against the set-level fibered product of the legs
    fibered = _check_fibered(aff, canopy.is_embedding_canopy())

    colimit = _check_colimit(aff, probe_bound, budget)
    return AffinizationReport(cover, ident, fibered, colimit, probe_bound)


def _check_fibered(aff, embedding):
    canopy = aff.canopy
    for j in canopy.index:
        for k in canopy.index:
            aj, ak = aff.alpha[j], aff.alpha[k]
            pairs = {(x, y) for x in range(len(aj.dom)) for y in range(len(ak.dom)) if aj.img[x] == ak.img[y]}
            key = (j, k)
            if key not in canopy.overlaps:
                if pairs:
                    return Verdict(False, ("missing overlap", key))
                continue
            r1, r2 = canopy.rho1[key], canopy.rho2[key]
            hit = [(r1.img[z], r2.img[z]) for z in range(len(canopy.overlaps[key]))]
            if embedding:
                if len(set(hit)) != len(hit) or set(hit) != pairs:
                    return Verdict(False, ("overlap is not the fibered product", key))
            else:
                missing = pairs - set(hit)
                if missing:
                    x, y = min(missing)
                    return Verdict(False, ("no overlap witness", key, aj.dom.points[x], ak.dom.points[y]))
    return Verdict(True)


def _check_colimit(aff, probe_bound, budget):
    """For every set map phi: X → Y, phi is diffuse iff every phi∘alpha(j) is."""
    X = aff.space
    index = list(aff.canopy.index)
    compare = 0
    for Y in probes_upto(probe_bound):
        total = len(Y) ** len(X)
        if total > budget:
            raise BudgetExceeded(f"{total} maps from the glued space exceed the budget")
        for rows in _all_rows(len(X), len(Y)):
            lhs = _continuous_and_diffuse(X, Y, rows)
            rhs = np.ones(rows.shape[0], dtype=bool)
            for j in index:
                a = aff.alpha[j]
                comp = rows[:, np.array(a.img, dtype=np.int64)] if len(a.img) else rows[:, :0]
                rhs &= _continuous_and_diffuse(a.dom, Y, comp)
            bad = np.flatnonzero(lhs != rhs)
            compare += rows.shape[0]
            if bad.size:
                row = tuple(int(v) for v in rows[bad[0]])
                phi = {X.points[i]: Y.points[v] for i, v in enumerate(row)}
                return Verdict(False, (Y.name, phi, bool(lhs[bad[0]])))
    return Verdict(True, compare)


def _all_rows(n, m, chunk=1 << 18):
    total = m ** n
    if n == 0:
        yield np.zeros((1, 0), dtype=np.uint8)
        return
    weights = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        yield ((codes[:, None] // weights[None, :]) % m).astype(np.uint8)


def _continuous_and_diffuse(D, Y, rows):
    pairs = [(i, j) for i in range(len(D)) for j in bits(D.masks[i]) if j != i]
    if pairs and rows.shape[0]:
        px = np.array([p[0] for p in pairs], dtype=np.int64)
        py = np.array([p[1] for p in pairs], dtype=np.int64)
        ok = _kernels.continuous(rows, px, py, Y.np_masks)
    else:
        ok = np.ones(rows.shape[0], dtype=bool)
    idx = np.flatnonzero(ok)
    if idx.size:
        ok[idx] = diffuse_flags(D, Y, rows[idx])
    return ok


def compatible_families(canopy, Y):
    """Oracle: families of diffuse maps chart → Y agreeing through every overlap."""
    from .fintop import continuous_rows
    index = list(canopy.index)
    options = []
    for j in index:
        rows = continuous_rows(canopy.objects[j], Y)
        rows = rows[diffuse_flags(canopy.objects[j], Y, rows)]
        options.append([tuple(int(v) for v in r) for r in rows])
    out = []

    def walk(t, chosen):
        if t == len(index):
            out.append(tuple(chosen))
            return
        for row in options[t]:
            chosen.append(row)
            if _compatible_prefix(canopy, index, chosen):
                walk(t + 1, chosen)
            chosen.pop()

    walk(0, [])
    return out


def _compatible_prefix(canopy, index, chosen):
    t = len(chosen) - 1
    k = index[t]
    for s in range(t + 1):
        j = index[s]
        for key in ((j, k), (k, j)):
            if key not in canopy.overlaps:
                continue
            a, b = key
            ra = chosen[index.index(a)]
            rb = chosen[index.index(b)]
            r1, r2 = canopy.rho1[key], canopy.rho2[key]
            for z in range(len(canopy.overlaps[key])):
                if ra[r1.img[z]] != rb[r2.img[z]]:
                    return False
    return True


def round_trip(space, opens):
    """Affinize the cover canopy; the induced class → point map must be a homeomorphism."""
    aff = affinize(validate_canopy(canopy_from_cover(space, opens)))
    X = aff.space
    img = []
    for cls in X.points:
        pts = {p for _, p in cls}
        if len(pts) != 1:
            return Verdict(False, ("class mixes points", cls))
        img.append(space.index[pts.pop()])
    if sorted(img) != list(range(len(space))):
        return Verdict(False, "induced map is not a bijection")
    phi = ContinuousMap.from_indices(X, space, img)
    for i, m in enumerate(X.masks):
        if phi.image_mask(m) != space.masks[img[i]]:
            return Verdict(False, ("topology differs at", X.points[i]))
    return Verdict(True, phi)
