"""The representing space Λ of the Neg functor and pullbacks built from it.

Given a family E of closed subset elements of X, Neg(X, E)(Y) is the set of
continuous maps Y → X pulling every member of E back to a negligible element.
Λ has one point (x, f) per selector f, which picks a component of U − I for
each (U, I) in E with x in U.  A selector is fixed by its values on the local
family at U_x: for larger U the value is the component of U − I containing
f(U_x, U_x ∩ I).  So selectors are enumerated over ``family.local[x]`` only,
with the monotonicity constraint J ⊆ J' ⇒ f(J') ⊆ f(J).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, MalformedElement, NotClosed, NotLocalHomeoOffI, SpaceMismatch
from .fintop import (
    ContinuousMap, FinSpace, Verdict, bits, continuous_rows, find_homeomorphism,
    probes_upto, product, subspace,
)
from .gencat import diffuse_flags
from .negligible import (
    close_family, element_masks, negligible_by_definition,
    negligible_local, negligible_masks,
)

MAX_LOCAL = 12
SELECTOR_BUDGET = 200_000


@dataclass
class NegInstance:
    """A space X with base elements E0 given as (u, i) masks, and their hull E."""
    space: FinSpace
    base: tuple
    family: object = None

    def __post_init__(self):
        self.base = tuple(sorted(set(self.base)))
        if self.family is None:
            X = self.space
            self.family = close_family(X, [(X.unmask(u), X.unmask(i)) for u, i in self.base])


def make_instance(space, elements):
    """Instance from elements (U, I) given as point collections."""
    base = [element_masks(space, e, require_closed=True) for e in elements]
    return NegInstance(space, tuple(base))


# ------------------------------------------------------------- Neg(X, E)(Y)

def neg_functor_values(instance, Y, budget=None):
    """Continuous maps Y → X pulling each base element back negligibly, by definition."""
    X = instance.space
    rows = continuous_rows(Y, X) if budget is None else continuous_rows(Y, X, budget)
    out = []
    for row in rows:
        f = ContinuousMap.from_indices(Y, X, row)
        if all(negligible_by_definition(Y, f.preimage_mask(u), f.preimage_mask(i)) for u, i in instance.base):
            out.append(f)
    return out


def _local_tests(instance):
    """Pairs (U_x, J) with J ≠ ∅ in the local family; pulling these back decides membership."""
    X = instance.space
    seen = set()
    for x in range(len(X)):
        for j in instance.family.local[x]:
            if j:
                seen.add((X.masks[x], j))
    return sorted(seen)


def neg_flags(instance, Y, rows):
    """Membership in Neg(X, E)(Y) for many maps at once, through the local family."""
    X = instance.space
    rows = np.asarray(rows)
    ok = np.ones(rows.shape[0], dtype=bool)
    if rows.shape[0] == 0:
        return ok
    for u, j in _local_tests(instance):
        if Y.kernel_ok and X.kernel_ok:
            ok &= _kernels.negligible_local(_kernels.preimage(rows, u), _kernels.preimage(rows, j), Y.np_masks, Y.np_adjacency)
        else:
            for t in np.flatnonzero(ok):
                f = ContinuousMap.from_indices(Y, X, rows[t])
                ok[t] = negligible_local(Y, f.preimage_mask(u), f.preimage_mask(j))
    return ok


# --------------------------------------------------------------- selectors

def _component_containing(space, w, c):
    for comp in space.component_masks(w):
        if comp & c:
            return comp
    return 0


def local_selectors(instance, x, max_local=MAX_LOCAL, budget=SELECTOR_BUDGET):
    """Monotone selectors at point index x, each a dict J ↦ component of U_x − J."""
    X = instance.space
    ux = X.masks[x]
    fam = sorted(instance.family.local[x], key=lambda j: (bin(j).count("1"), j))
    if max_local is not None and len(fam) > max_local:
        raise BudgetExceeded(f"{len(fam)} local elements at {X.points[x]!r} exceed the cap of {max_local}")
    choices = [X.component_masks(ux & ~j) for j in fam]
    if any(not c for c in choices):
        return []
    below = [[a for a in range(b) if fam[a] & ~fam[b] == 0] for b in range(len(fam))]
    out = []
    pick = [0] * len(fam)

    def walk(b):
        if b == len(fam):
            out.append(dict(zip(fam, pick)))
            if len(out) > budget:
                raise BudgetExceeded(f"more than {budget} selectors at {X.points[x]!r}")
            return
        for comp in choices[b]:
            if all(comp & ~pick[a] == 0 for a in below[b]):
                pick[b] = comp
                walk(b + 1)

    walk(0)
    out.sort(key=lambda s: tuple(s[j] for j in fam))
    return out


@dataclass
class LambdaSpace:
    instance: NegInstance
    space: FinSpace
    lam: ContinuousMap
    selectors: dict
    base_index: dict = field(default_factory=dict)

    def selector(self, p):
        return self.selectors[p]

    def value(self, p, u, i):
        """f(U, I) for the point p = (x, f), extended from the local family."""
        X = self.instance.space
        x = X.index[p[0]]
        f = self.selectors[p]
        return _component_containing(X, u & ~i, f[X.masks[x] & i])

    def basis_mask(self, u, p):
        """N(U, x, f) as a mask over Λ."""
        X = self.instance.space
        if not u >> X.index[p[0]] & 1:
            raise MalformedElement(f"{p!r} does not lie over the open set")
        fam = self.instance.family.over_mask(u)
        ref = [self.value(p, u, i) for i in fam]
        out = 0
        for k, q in enumerate(self.space.points):
            if u >> X.index[q[0]] & 1 and all(self.value(q, u, i) == r for i, r in zip(fam, ref)):
                out |= 1 << k
        return out

    def basis(self, U, p):
        X = self.instance.space
        return self.space.unmask(self.basis_mask(X.mask(U), p))

    def e1_masks(self, budget=None):
        """λ⁻¹ of every hull element, as (u, i) masks over Λ."""
        fam = self.instance.family
        elems = fam.elements() if budget is None else fam.elements(budget)
        X = self.instance.space
        return [(self.lam.preimage_mask(X.mask(U)), self.lam.preimage_mask(X.mask(I))) for U, I in elems]

    @property
    def E1(self):
        L = self.space
        return [(L.unmask(u), L.unmask(i)) for u, i in self.e1_masks()]


def lambda_construct(instance, max_local=MAX_LOCAL, budget=SELECTOR_BUDGET, name="Lambda"):
    """Materialize Λ: points (x, k) for the k-th selector at x, topology from the N-sets at U_x."""
    X = instance.space
    points = []
    sels = {}
    total = 0
    for x in range(len(X)):
        found = local_selectors(instance, x, max_local, budget)
        total += len(found)
        if total > budget:
            raise BudgetExceeded(f"more than {budget} points in the representing space")
        for k, s in enumerate(found):
            p = (X.points[x], k)
            points.append(p)
            sels[p] = s
    if len(points) > _kernels.MAX_POINTS:
        raise BudgetExceeded(f"{len(points)} points exceed the {_kernels.MAX_POINTS}-point encoding")
    pos = {p: k for k, p in enumerate(points)}
    # minimal open of (x, f): the N-set at U_x; every other N-set containing it is larger
    masks = []
    for p in points:
        x = X.index[p[0]]
        ux = X.masks[x]
        f = sels[p]
        m = 0
        for q in points:
            y = X.index[q[0]]
            if not ux >> y & 1:
                continue
            g = sels[q]
            if all(_component_containing(X, ux & ~j, g[X.masks[y] & j]) == f[j] for j in f):
                m |= 1 << pos[q]
        masks.append(m)
    L = FinSpace(points, masks, name)
    _check_preorder(L)
    lam = ContinuousMap(L, X, {p: p[0] for p in points})
    return LambdaSpace(instance, L, lam, sels)


def _check_preorder(L):
    from .errors import NotReflexive, NotTransitive
    for i, m in enumerate(L.masks):
        if not m >> i & 1:
            raise NotReflexive(f"{L.points[i]!r} is missing from its own basic open")
        for j in bits(m):
            if L.masks[j] & ~m:
                raise NotTransitive(f"basic opens at {L.points[i]!r} and {L.points[j]!r} are not nested")


# --------------------------------------------------------- representability

@dataclass
class RepresentabilityReport:
    probe_bound: int
    injective: bool
    surjective: bool
    counts: dict
    collision: object = None
    missing: object = None

    @property
    def ok(self):
        return self.injective and self.surjective

    def __bool__(self):
        return self.ok

    def lines(self):
        out = [f"representable up to probe size {self.probe_bound}: {self.ok}"]
        out.append(f"injective: {self.injective}")
        out.append(f"surjective: {self.surjective}")
        for name in sorted(self.counts):
            a, b = self.counts[name]
            out.append(f"  {name}: {a} lifts, {b} maps")
        if self.collision is not None:
            out.append(f"collision: {self.collision}")
        if self.missing is not None:
            out.append(f"missing: {self.missing}")
        return out


def lambda_side(lam, Y):
    """Rows of maps Y → Λ pulling E1 back negligibly."""
    L = lam.space
    rows = continuous_rows(Y, L)
    if rows.shape[0] == 0:
        return rows
    # h pulls λ⁻¹α back to (λ∘h)⁻¹α, so the local family of E decides it
    comp = np.array(lam.lam.img, dtype=np.int64)[rows] if len(L) else rows
    return rows[neg_flags(lam.instance, Y, comp)]


def verify_representability(lam, probe_bound=3, probes=None):
    """Post-composition with λ against the independently enumerated Neg values."""
    X = lam.instance.space
    injective = surjective = True
    collision = missing = None
    counts = {}
    for Y in probes if probes is not None else probes_upto(probe_bound):
        rows = lambda_side(lam, Y)
        images = {}
        for r in rows:
            key = tuple(lam.lam.img[j] for j in r)
            if key in images and injective:
                injective = False
                collision = (Y.name, _fmt_row(lam.space, Y, images[key]), _fmt_row(lam.space, Y, r))
            images.setdefault(key, r)
        target = neg_functor_values(lam.instance, Y)
        for g in target:
            if g.img not in images and surjective:
                surjective = False
                missing = (Y.name, {Y.points[i]: X.points[v] for i, v in enumerate(g.img)})
        extra = set(images) - {g.img for g in target}
        if extra and surjective:
            # a lift whose composite falls outside Neg: the two sides disagree
            surjective = False
            missing = (Y.name, "lift outside the functor", sorted(extra)[0])
        counts[Y.name] = (int(rows.shape[0]), len(target))
    return RepresentabilityReport(probe_bound, injective, surjective, counts, collision, missing)


def _fmt_row(L, Y, row):
    return {Y.points[i]: L.points[int(v)] for i, v in enumerate(row)}


# ------------------------------------------------------------ mutations

def drop_point(lam, p):
    """Λ with the point p removed, keeping λ and the selectors of the rest."""
    L = lam.space
    keep = [q for q in L.points if q != p]
    sub = subspace(L, keep, L.name)
    sels = {q: lam.selectors[q] for q in keep}
    return LambdaSpace(lam.instance, sub, ContinuousMap(sub, lam.instance.space, {q: q[0] for q in keep}, check=False), sels)


def retopologize(lam, space):
    """Same points and λ over a different topology on Λ."""
    if set(space.points) != set(lam.space.points):
        raise SpaceMismatch("the new topology must live on the same points")
    lam_map = ContinuousMap(space, lam.instance.space, {q: q[0] for q in space.points}, check=False)
    return LambdaSpace(lam.instance, space, lam_map, dict(lam.selectors))


def hausdorff_preserved(lam):
    """None when X is not Hausdorff; otherwise whether Λ is."""
    X = lam.instance.space
    if any(m & (m - 1) for m in X.masks):
        return None
    return all(not (m & (m - 1)) for m in lam.space.masks)


# ---------------------------------------------------------- structural laws

def basis_set_laws(lam):
    """Failures of the N-set laws over every point and every open neighbourhood of its image."""
    X = lam.instance.space
    L = lam.space
    failures = []
    opens = X.open_masks()
    for p in L.points:
        x = X.index[p[0]]
        mine = [u for u in opens if u >> x & 1]
        N = {u: lam.basis_mask(u, p) for u in mine}
        for u in mine:
            n = N[u]
            if not n >> L.index[p] & 1:
                failures.append(("contains", p, X.unmask(u)))
            if lam.lam.image_mask(n) & ~u:
                failures.append(("lies over", p, X.unmask(u)))
            for k in bits(n):
                if lam.basis_mask(u, L.points[k]) != n:
                    failures.append(("same set", p, L.points[k], X.unmask(u)))
            if not L.is_open_mask(n):
                failures.append(("open", p, X.unmask(u)))
        for u in mine:
            for v in mine:
                if N[u & v] & ~(N[u] & N[v]):
                    failures.append(("intersection", p, X.unmask(u), X.unmask(v)))
        if L.masks[L.index[p]] != min(N.values(), key=lambda m: bin(m).count("1")):
            failures.append(("neighbourhood basis", p))
    return failures


def image_closure_check(lam):
    """λ(N(U, x, f)) ⊆ closure of f(U, I) for every hull element (U, I) over x."""
    X = lam.instance.space
    failures = []
    for p in lam.space.points:
        x = X.index[p[0]]
        for u in X.open_masks():
            if not u >> x & 1:
                continue
            img = lam.lam.image_mask(lam.basis_mask(u, p))
            for i in lam.instance.family.over_mask(u):
                c = X.closure_mask(lam.value(p, u, i))
                if img & ~c:
                    failures.append((p, X.unmask(u), X.unmask(i)))
    return failures


@dataclass
class LocalConnectivityReport:
    dense: bool
    basis_connected: bool
    k_negligible: bool
    bijective_off_k: bool

    @property
    def ok(self):
        return self.dense and self.basis_connected and self.k_negligible and self.bijective_off_k


def off_k_conditions(instance, K):
    """Whether (X, K) is a base element and every base element meets X − K negligibly."""
    X = instance.space
    k = X.mask(K)
    v = X.full & ~k
    if (X.full, k) not in set(instance.base):
        return False
    return all(negligible_by_definition(X, u & v, i & v) for u, i in instance.base)


def local_connectivity_report(lam, K):
    """Density of λ⁻¹(X − K), connected N-sets, negligible λ⁻¹K and bijectivity over X − K."""
    X = lam.instance.space
    L = lam.space
    k = X.mask(K)
    if not X.is_closed_mask(k):
        raise NotClosed("K must be closed")
    off = lam.lam.preimage_mask(X.full & ~k)
    dense = L.closure_mask(off) == L.full
    connected = True
    for p in L.points:
        x = X.index[p[0]]
        for u in X.open_masks():
            if u >> x & 1 and not L.is_connected_mask(lam.basis_mask(u, p)):
                connected = False
    negligible = negligible_by_definition(L, L.full, lam.lam.preimage_mask(k))
    fibres = lam.lam.fibers()
    bij = all(bin(fibres.get(y, 0)).count("1") == 1 for y in bits(X.full & ~k))
    return LocalConnectivityReport(dense, connected, negligible, bij)


# ----------------------------------------------------------- general pullback

@dataclass
class GeneralPullback:
    space: FinSpace
    to_c: ContinuousMap
    to_b: ContinuousMap
    lam: LambdaSpace
    set_pullback: FinSpace
    K: frozenset


def _check_local_homeo_off(b, imask):
    B, A = b.dom, b.cod
    for p in bits(B.full & ~imask):
        m = B.masks[p]
        imgs = [b.img[j] for j in bits(m)]
        if len(set(imgs)) != len(imgs):
            raise NotLocalHomeoOffI(f"b is not injective near {B.points[p]!r}")
        if b.image_mask(m) != A.masks[b.img[p]]:
            raise NotLocalHomeoOffI(f"b is not open at {B.points[p]!r}")


def pullback_via_lambda(c, b, I, max_local=None, budget=SELECTOR_BUDGET):
    """Pullback of b along c when b is a local homeomorphism off the negligible set I."""
    if c.cod != b.cod:
        raise SpaceMismatch("c and b must share a codomain")
    B = b.dom
    imask = B.mask(I)
    if not B.is_closed_mask(imask):
        raise NotClosed("I must be closed")
    if not negligible_by_definition(B, B.full, imask):
        raise MalformedElement("I is not negligible")
    _check_local_homeo_off(b, imask)
    C = c.dom
    P = product(C, B)
    pts = [(p, q) for p in C.points for q in B.points if c(p) == b(q)]
    X = subspace(P, pts, "pullback")
    to_c = ContinuousMap(X, C, {pq: pq[0] for pq in X.points})
    to_b = ContinuousMap(X, B, {pq: pq[1] for pq in X.points})
    k = to_b.preimage_mask(imask)
    base = {(X.full, k)}
    for y in bits(X.full & ~k):
        u = X.masks[y]
        for j in negligible_masks(X, u):
            base.add((u, j))
    inst = NegInstance(X, tuple(base))
    lam = lambda_construct(inst, max_local=max_local, budget=budget, name="pullback")
    L = lam.space
    return GeneralPullback(L, to_c.compose(lam.lam), to_b.compose(lam.lam), lam, X, X.unmask(k))


def verify_general_pullback(c, b, result, probe_bound=2):
    """Diffuse pairs (α, β) with c∘α = b∘β against diffuse maps into the pullback space."""
    L = result.space
    if [c.img[i] for i in result.to_c.img] != [b.img[i] for i in result.to_b.img]:
        return Verdict(False, "square does not commute")
    for T in probes_upto(probe_bound):
        a_rows = continuous_rows(T, c.dom)
        a_rows = a_rows[diffuse_flags(T, c.dom, a_rows)]
        b_rows = continuous_rows(T, b.dom)
        b_rows = b_rows[diffuse_flags(T, b.dom, b_rows)]
        h_rows = continuous_rows(T, L)
        h_rows = h_rows[diffuse_flags(T, L, h_rows)]
        lifts = {}
        for h in h_rows:
            key = (tuple(result.to_c.img[j] for j in h), tuple(result.to_b.img[j] for j in h))
            lifts[key] = lifts.get(key, 0) + 1
        for a in a_rows:
            ca = tuple(c.img[j] for j in a)
            for bb in b_rows:
                if tuple(b.img[j] for j in bb) != ca:
                    continue
                key = (tuple(int(v) for v in a), tuple(int(v) for v in bb))
                if lifts.get(key, 0) != 1:
                    return Verdict(False, (T.name, key, lifts.get(key, 0)))
    return Verdict(True)


def agrees_with_embedding_pullback(c, u):
    """Homeomorphism between the Λ pullback (I = ∅) and the open-subspace pullback."""
    from .gencat import pullback_embedding
    V, _, _ = pullback_embedding(c, u)
    res = pullback_via_lambda(c, u, [])
    return find_homeomorphism(V, res.space) is not None


def pair_coverage(result):
    """Pairs (p, q) of the set pullback not hit by Λ; empty when Λ covers them."""
    X = result.set_pullback
    hit = result.lam.lam.image_mask(result.space.full)
    return [X.points[i] for i in bits(X.full & ~hit)]


def lambda_lines(lam):
    """Deterministic text description of Λ."""
    L = lam.space
    X = lam.instance.space
    out = [f"points: {len(L)}  over {len(X)}"]
    out.append(f"connected: {L.is_connected_mask(L.full)}")
    for p in L.points:
        m = L.masks[L.index[p]]
        out.append(f"  {_fmt(p)} -> {_fmt(p[0])}  open: {{{', '.join(_fmt(q) for q in L.sorted_points(m))}}}")
    return out


def _fmt(p):
    if isinstance(p, tuple):
        return "(" + ",".join(_fmt(q) for q in p) + ")"
    return str(p)
