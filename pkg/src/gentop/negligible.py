"""Z-density, negligible subsets and closed families of subset elements.

Two routes decide negligibility.  The definition route checks Z-density of
the complement against every connected open set.  The local route checks,
for each x in I, that U_x − I is nonempty and connected.  Hot paths use the
local route; tests hold the two against each other.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, MalformedElement, NotClosed, NotOpen, SpaceMismatch
from .fintop import Verdict, bits, subspace

ELEMENT_BUDGET = 2_000_000


class SubsetElement(NamedTuple):
    U: frozenset
    I: frozenset

    def __repr__(self):
        return f"({sorted_repr(self.U)}, {sorted_repr(self.I)})"


def sorted_repr(S):
    from .fintop import point_key
    return "{" + ", ".join(repr(p) for p in sorted(S, key=point_key)) + "}"


def element(space, U, I):
    return SubsetElement(frozenset(U), frozenset(I))


def element_masks(space, e, require_closed=False):
    U, I = e
    u = space.mask(U)
    i = space.mask(I)
    if not space.is_open_mask(u):
        raise MalformedElement(f"{sorted_repr(U)} is not open")
    if i & ~u:
        raise MalformedElement("I is not a subset of U")
    if require_closed and not closed_in(space, u, i):
        raise MalformedElement(f"{sorted_repr(I)} is not closed in {sorted_repr(U)}")
    return u, i


def closed_in(space, u, i):
    """Whether i is closed in the open set u."""
    return space.closure_mask(i) & u == i


def to_element(space, u, i):
    return SubsetElement(space.unmask(u), space.unmask(i))


# ------------------------------------------------------------- Z-density

def _zdense_witness(space, u):
    copens = space.connected_open_masks()
    if not copens:
        return None
    if space.kernel_ok:
        arr = space.memo("np_copens", lambda: np.array(copens, dtype=np.uint64))
        flags = _kernels.connected(arr & np.uint64(u), space.np_adjacency)
        bad = np.flatnonzero(~flags)
        return copens[bad[0]] if bad.size else None
    for c in copens:
        if not space.is_connected_mask(u & c):
            return c
    return None


def is_zdense(space, U):
    """Z-density of the open set U; the witness is the first offending connected open."""
    u = space.mask(U)
    if not space.is_open_mask(u):
        raise NotOpen(f"{sorted_repr(U)} is not open")
    bad = _zdense_witness(space, u)
    if bad is None:
        return Verdict(True)
    return Verdict(False, space.unmask(bad))


def _sub(space, u):
    if u == space.full:
        return space
    return space.memo(("sub", u), lambda: subspace(space, space.unmask(u)))


def negligible_by_definition(space, u, i):
    """Definition route on masks: i closed in u and u − i Z-dense in u."""
    if not closed_in(space, u, i):
        return False
    sub = _sub(space, u)
    if sub is space:
        return _zdense_witness(space, u & ~i) is None
    rest = sub.mask(space.unmask(u & ~i))
    return _zdense_witness(sub, rest) is None


def negligible_local(space, u, i):
    """Local route on masks: every x in i has U_x − i nonempty and connected."""
    if i & ~u or not closed_in(space, u, i):
        return False
    return local_witness(space, i) is None


def local_witness(space, i):
    for x in bits(i):
        if not space.is_connected_mask(space.masks[x] & ~i):
            return x
    return None


def is_negligible_element(space, e):
    """Whether I is closed in U and U − I is Z-dense in the subspace U."""
    u, i = element_masks(space, e)
    return negligible_by_definition(space, u, i)


def is_negligible(space, I):
    return is_negligible_element(space, (space.points, I))


class LocalCriterionResult(NamedTuple):
    holds: bool
    witness: object
    agreement: bool

    def __bool__(self):
        return bool(self.holds)


def local_criterion_check(space, I):
    """Local minimal-open test for a closed I, plus agreement with the definition."""
    i = space.mask(I)
    if not space.is_closed_mask(i):
        raise NotClosed(f"{sorted_repr(I)} is not closed")
    bad = local_witness(space, i)
    holds = bad is None
    definition = negligible_by_definition(space, space.full, i)
    return LocalCriterionResult(holds, None if holds else space.points[bad], holds == definition)


def max_negligible_mask(space, u):
    """Largest negligible subset of the open set u: union of negligible point closures."""
    def build():
        acc = 0
        for z in bits(u):
            cz = space.upmasks[z] & u
            if negligible_local(space, u, cz):
                acc |= cz
        return acc
    return space.memo(("nmax", u), build)


def negligible_masks(space, u, budget=ELEMENT_BUDGET):
    """All negligible subsets of the open set u, ascending: closed-in-u subsets of the maximum."""
    def build():
        top = max_negligible_mask(space, u)
        if top == 0:
            return (0,)
        return tuple(sorted(_closed_subsets_within(space, u, top, budget)))
    return space.memo(("neg", u), build)


def _closed_subsets_within(space, u, top, budget=ELEMENT_BUDGET):
    """Subsets of top that are closed in u (top itself closed in u)."""
    classes = [(m, c & top) for m, c in space.classes() if c & top]
    out = [0]
    # process from the top of the order down: a class may join only if
    # every point of u above it already did
    for m, cls in reversed(classes):
        x = (cls & -cls).bit_length() - 1
        above = space.upmasks[x] & u & ~cls
        out.extend([S | cls for S in out if above & ~S == 0])
        if len(out) > budget:
            raise BudgetExceeded(f"more than {budget} negligible subsets")
    return out


def negligible_elements(space, U=None):
    """Negligible elements (U, I); over every open U when U is None."""
    opens = space.open_masks() if U is None else (space.mask(U),)
    out = []
    for u in opens:
        for i in negligible_masks(space, u):
            out.append(to_element(space, u, i))
    return out


# ------------------------------------------------------------- ordering

def element_leq(e1, e2, space=None):
    """(U,I) ≤ (V,J) iff U ⊆ V and U − I ⊆ V − J."""
    if space is not None:
        for U, I in (e1, e2):
            if not (set(U) <= set(space.points) and set(I) <= set(space.points)):
                raise SpaceMismatch("element does not live in the given space")
    U, I = frozenset(e1[0]), frozenset(e1[1])
    V, J = frozenset(e2[0]), frozenset(e2[1])
    return U <= V and (U - I) <= (V - J)


# ------------------------------------------------------ closed families

class ClosedElementFamily:
    """Least family containing a base and closed under the four hull rules.

    Stored by its local families: ``local[x]`` holds the masks J with
    (U_x, J) in the hull.  An element (U, I) is in the hull iff I is closed
    in U and U_x ∩ I lies in ``local[x]`` for every x in I.
    """

    def __init__(self, space, base, local):
        self.space = space
        self.base = tuple(base)
        self.local = tuple(frozenset(s) for s in local)
        self._over = {}

    def contains_mask(self, u, i):
        sp = self.space
        if i & ~u or not sp.is_open_mask(u) or not closed_in(sp, u, i):
            return False
        return all(sp.masks[x] & i in self.local[x] for x in bits(i))

    def __contains__(self, e):
        u, i = self.space.mask(e[0]), self.space.mask(e[1])
        return self.contains_mask(u, i)

    def over_mask(self, w):
        """Masks J with (w, J) in the hull, ascending."""
        if w not in self._over:
            self._over[w] = tuple(sorted(_enumerate_over(self.space, self.local, w)))
        return self._over[w]

    def over(self, U):
        return [self.space.unmask(j) for j in self.over_mask(self.space.mask(U))]

    def local_elements(self, x):
        sp = self.space
        i = sp.index[x]
        return [sp.unmask(j) for j in sorted(self.local[i])]

    def elements(self, budget=ELEMENT_BUDGET):
        out = []
        for u in self.space.open_masks():
            for j in self.over_mask(u):
                out.append(to_element(self.space, u, j))
                if len(out) > budget:
                    raise BudgetExceeded(f"hull has more than {budget} elements")
        return out

    @property
    def closed_hull(self):
        return frozenset(self.elements())

    def leq(self, e1, e2):
        return element_leq(e1, e2, self.space)

    def __len__(self):
        return len(self.elements())


def _enumerate_over(space, local, w):
    classes = [(m, c & w) for m, c in space.classes() if c & w]
    found = []

    def walk(k, J):
        if k == len(classes):
            found.append(J)
            return
        m, cls = classes[k]
        if m & J == 0:
            walk(k + 1, J)
        Jc = J | cls
        x = (cls & -cls).bit_length() - 1
        if m & Jc in local[x]:
            walk(k + 1, Jc)

    walk(0, 0)
    return found


def close_family(space, base, seeds=None):
    """Hull of the base elements; ``seeds`` optionally adds local masks per point index."""
    base = list(base)
    local = [{0} for _ in range(len(space))]
    for e in base:
        u, i = element_masks(space, e, require_closed=True)
        for x in bits(u):
            local[x].add(space.masks[x] & i)
    if seeds:
        for x, masks in seeds.items():
            local[x].update(masks)
    _saturate(space, local)
    return ClosedElementFamily(space, [SubsetElement(frozenset(U), frozenset(I)) for U, I in base], local)


def _saturate(space, local):
    changed = True
    while changed:
        changed = False
        # restriction to smaller minimal opens
        for x in range(len(space)):
            for j in list(local[x]):
                for y in bits(space.masks[x] & ~(1 << x)):
                    r = space.masks[y] & j
                    if r not in local[y]:
                        local[y].add(r)
                        changed = True
        if changed:
            continue
        # union with hull elements of the complement
        frozen = [frozenset(s) for s in local]
        cache = {}
        for x in range(len(space)):
            ux = space.masks[x]
            for i in list(frozen[x]):
                w = ux & ~i
                if w not in cache:
                    cache[w] = _enumerate_over(space, frozen, w)
                for j in cache[w]:
                    if i | j not in local[x]:
                        local[x].add(i | j)
                        changed = True


def close_family_bruteforce(space, base):
    """Oracle: iterate the four hull rules over all closed subset elements."""
    opens = space.open_masks()
    # relatively closed subsets of u are exactly the traces c ∩ u of closed c
    cse = sorted({(u, c & u) for u in opens for c in space.closed_masks()})
    D = {(u, 0) for u in opens}
    for e in base:
        D.add(element_masks(space, e, require_closed=True))
    subopens = {u: [v for v in opens if v & ~u == 0] for u in opens}
    changed = True
    while changed:
        changed = False
        new = set()
        for u, i in D:
            for v in subopens[u]:
                new.add((v, v & i))
            w = u & ~i
            for v, j in D:
                if v == w:
                    new.add((u, i | j))
        for u, i in cse:
            if (u, i) in D or (u, i) in new:
                continue
            if i and all(any(v >> x & 1 and (v, v & i) in D for v in subopens[u]) for x in bits(i)):
                new.add((u, i))
        if not new <= D:
            D |= new
            changed = True
    return D


def family_masks(family):
    return {(u, j) for u in family.space.open_masks() for j in family.over_mask(u)}
