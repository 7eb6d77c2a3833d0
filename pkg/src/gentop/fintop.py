"""Finite topological spaces stored through their minimal open sets.

A finite space is determined by assigning to each point x the smallest open
set U_x containing it.  Internally subsets are Python int bitmasks over the
canonically sorted point tuple; the public API speaks frozensets of points.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import (
    BudgetExceeded, EmptyList, NotAPartition, NotContinuous, NotReflexive,
    NotTransitive, UnknownPoint,
)

MAP_BUDGET = 5_000_000
OPEN_BUDGET = 2_000_000
CATALOG_CAP = 4


def point_key(p):
    """Sort key that orders ints before strings before tuples."""
    if isinstance(p, bool):
        return (0, int(p))
    if isinstance(p, int):
        return (0, p)
    if isinstance(p, str):
        return (1, p)
    if isinstance(p, tuple):
        return (2, tuple(point_key(q) for q in p))
    return (3, repr(p))


def bits(m):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def popcount(m):
    return bin(m).count("1")


class Verdict(NamedTuple):
    ok: bool
    witness: object = None

    def __bool__(self):
        return bool(self.ok)


class FinSpace:
    """Immutable finite space; ``masks[i]`` is the minimal open of ``points[i]``."""

    __slots__ = ("points", "index", "masks", "name", "_memo")

    def __init__(self, points, masks, name=None):
        self.points = tuple(points)
        self.index = {p: i for i, p in enumerate(self.points)}
        self.masks = tuple(masks)
        self.name = name
        self._memo = {}

    # -- basic shape
    @property
    def n(self):
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p):
        return p in self.index

    @property
    def full(self):
        return (1 << len(self.points)) - 1

    def __eq__(self, other):
        return isinstance(other, FinSpace) and self.points == other.points and self.masks == other.masks

    def __hash__(self):
        return hash((self.points, self.masks))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FinSpace{label} with {len(self.points)} points>"

    # -- conversions
    def mask(self, S):
        m = 0
        for p in S:
            try:
                m |= 1 << self.index[p]
            except KeyError:
                raise UnknownPoint(f"{p!r} is not a point of the space") from None
        return m

    def unmask(self, m):
        return frozenset(self.points[i] for i in bits(m))

    def sorted_points(self, m):
        return [self.points[i] for i in bits(m)]

    def minopen(self, x):
        try:
            return self.unmask(self.masks[self.index[x]])
        except KeyError:
            raise UnknownPoint(f"{x!r} is not a point of the space") from None

    def table(self):
        return {p: self.unmask(m) for p, m in zip(self.points, self.masks)}

    # -- derived structure
    @property
    def upmasks(self):
        up = self._memo.get("up")
        if up is None:
            acc = [0] * len(self.points)
            for i, m in enumerate(self.masks):
                for j in bits(m):
                    acc[j] |= 1 << i
            up = self._memo["up"] = tuple(acc)
        return up

    @property
    def adjacency(self):
        adj = self._memo.get("adj")
        if adj is None:
            adj = self._memo["adj"] = tuple(a | b for a, b in zip(self.masks, self.upmasks))
        return adj

    @property
    def np_masks(self):
        arr = self._memo.get("np_masks")
        if arr is None:
            arr = self._memo["np_masks"] = _kernels.as_masks(self.masks)
        return arr

    @property
    def np_adjacency(self):
        arr = self._memo.get("np_adj")
        if arr is None:
            arr = self._memo["np_adj"] = _kernels.as_masks(self.adjacency)
        return arr

    @property
    def kernel_ok(self):
        return len(self.points) <= _kernels.MAX_POINTS

    def is_open_mask(self, m):
        return all(self.masks[i] & ~m == 0 for i in bits(m))

    def is_closed_mask(self, m):
        return self.is_open_mask(self.full & ~m)

    def closure_mask(self, m):
        out = 0
        for i in bits(m):
            out |= self.upmasks[i]
        return out

    def open_hull_mask(self, m):
        out = 0
        for i in bits(m):
            out |= self.masks[i]
        return out

    def interior_mask(self, m):
        return sum(1 << i for i in bits(m) if self.masks[i] & ~m == 0)

    def component_masks(self, m):
        """Components of the subspace m, ordered by their lowest point."""
        out = []
        rest = m
        adj = self.adjacency
        while rest:
            seen = rest & -rest
            frontier = seen
            while frontier:
                grow = 0
                for i in bits(frontier):
                    grow |= adj[i]
                grow &= m & ~seen
                seen |= grow
                frontier = grow
            out.append(seen)
            rest &= ~seen
        return out

    def is_connected_mask(self, m):
        return m != 0 and len(self.component_masks(m)) == 1

    def classes(self):
        """Points grouped by equal minimal opens, ordered by minimal-open size."""
        c = self._memo.get("classes")
        if c is None:
            groups = {}
            for i, m in enumerate(self.masks):
                groups[m] = groups.get(m, 0) | (1 << i)
            c = sorted(((m, cls) for m, cls in groups.items()), key=lambda t: (popcount(t[0]), t[0]))
            c = self._memo["classes"] = tuple(c)
        return c

    def open_masks(self, budget=OPEN_BUDGET):
        """All open sets as masks, ascending."""
        cached = self._memo.get("opens")
        if cached is not None:
            return cached
        opens = [0]
        for m, cls in self.classes():
            need = m & ~cls
            opens.extend([S | cls for S in opens if need & ~S == 0])
            if len(opens) > budget:
                raise BudgetExceeded(f"more than {budget} open sets")
        opens.sort()
        self._memo["opens"] = tuple(opens)
        return self._memo["opens"]

    def closed_masks(self, budget=OPEN_BUDGET):
        full = self.full
        return tuple(sorted(full & ~u for u in self.open_masks(budget)))

    def connected_open_masks(self):
        cached = self._memo.get("copens")
        if cached is None:
            opens = self.open_masks()
            if self.kernel_ok and opens:
                flags = _kernels.connected(np.array(opens, dtype=np.uint64), self.np_adjacency)
                cached = tuple(u for u, f in zip(opens, flags) if f)
            else:
                cached = tuple(u for u in opens if self.is_connected_mask(u))
            self._memo["copens"] = cached
        return cached

    def memo(self, key, build):
        if key not in self._memo:
            self._memo[key] = build()
        return self._memo[key]


def make_space(points, minopen_table, name=None):
    """Validate a minimal-open table and build a FinSpace."""
    pts = sorted(set(points), key=point_key)
    index = {p: i for i, p in enumerate(pts)}
    for key in minopen_table:
        if key not in index:
            raise UnknownPoint(f"minimal open given for unknown point {key!r}")
    masks = []
    for p in pts:
        if p not in minopen_table:
            raise UnknownPoint(f"no minimal open given for point {p!r}")
        m = 0
        for q in minopen_table[p]:
            if q not in index:
                raise UnknownPoint(f"minimal open of {p!r} mentions unknown point {q!r}")
            m |= 1 << index[q]
        masks.append(m)
    for i, m in enumerate(masks):
        if not m >> i & 1:
            raise NotReflexive(f"{pts[i]!r} is not in its own minimal open")
    for i, m in enumerate(masks):
        for j in bits(m):
            if masks[j] & ~m:
                raise NotTransitive(
                    f"{pts[j]!r} lies in the minimal open of {pts[i]!r} but its own minimal open is not contained in it"
                )
    return FinSpace(pts, masks, name)


def from_opens(points, opens, name=None):
    """Topology generated by an arbitrary family of open sets."""
    pts = sorted(set(points), key=point_key)
    index = {p: i for i, p in enumerate(pts)}
    full = (1 << len(pts)) - 1
    fam = []
    for U in opens:
        m = 0
        for p in U:
            if p not in index:
                raise UnknownPoint(f"open set mentions unknown point {p!r}")
            m |= 1 << index[p]
        fam.append(m)
    masks = []
    for i in range(len(pts)):
        m = full
        for u in fam:
            if u >> i & 1:
                m &= u
        masks.append(m)
    return FinSpace(pts, masks, name)


def discrete(points, name=None):
    pts = sorted(set(points), key=point_key)
    return FinSpace(pts, [1 << i for i in range(len(pts))], name)


def indiscrete(points, name=None):
    pts = sorted(set(points), key=point_key)
    full = (1 << len(pts)) - 1
    return FinSpace(pts, [full] * len(pts), name)


EMPTY = FinSpace((), (), "empty")
POINT = FinSpace((0,), (1,), "point")


# ------------------------------------------------------------ point-set ops

def closure(space, S):
    return space.unmask(space.closure_mask(space.mask(S)))


def interior(space, S):
    return space.unmask(space.interior_mask(space.mask(S)))


def is_open(space, S):
    return space.is_open_mask(space.mask(S))


def is_closed(space, S):
    return space.is_closed_mask(space.mask(S))


def components(space, S):
    return [space.unmask(c) for c in space.component_masks(space.mask(S))]


def is_connected(space, S):
    return space.is_connected_mask(space.mask(S))


def open_sets(space):
    return [space.unmask(u) for u in space.open_masks()]


def subspace(space, S, name=None):
    m = space.mask(S)
    if m == space.full:
        return space
    idx = list(bits(m))
    pos = {i: k for k, i in enumerate(idx)}
    masks = []
    for i in idx:
        masks.append(sum(1 << pos[j] for j in bits(space.masks[i] & m)))
    return FinSpace([space.points[i] for i in idx], masks, name)


# --------------------------------------------------------------------- maps

class ContinuousMap:
    """A continuous point function; ``img[i]`` is the codomain index of ``dom.points[i]``."""

    __slots__ = ("dom", "cod", "img", "name")

    def __init__(self, dom, cod, f, check=True, name=None):
        self.dom = dom
        self.cod = cod
        self.name = name
        img = []
        for p in dom.points:
            try:
                q = f[p]
            except KeyError:
                raise UnknownPoint(f"map is undefined at {p!r}") from None
            try:
                img.append(cod.index[q])
            except KeyError:
                raise UnknownPoint(f"{q!r} is not a point of the codomain") from None
        self.img = tuple(img)
        if check:
            bad = _discontinuity(dom, cod, self.img)
            if bad is not None:
                raise NotContinuous(dom.points[bad])

    @classmethod
    def from_indices(cls, dom, cod, img, name=None):
        obj = cls.__new__(cls)
        obj.dom, obj.cod, obj.img, obj.name = dom, cod, tuple(int(v) for v in img), name
        return obj

    def __call__(self, p):
        return self.cod.points[self.img[self.dom.index[p]]]

    @property
    def mapping(self):
        return {p: self.cod.points[j] for p, j in zip(self.dom.points, self.img)}

    def image_mask(self, m):
        out = 0
        for i in bits(m):
            out |= 1 << self.img[i]
        return out

    def preimage_mask(self, m):
        return sum(1 << i for i, j in enumerate(self.img) if m >> j & 1)

    def image(self, S):
        return self.cod.unmask(self.image_mask(self.dom.mask(S)))

    def preimage(self, S):
        return self.dom.unmask(self.preimage_mask(self.cod.mask(S)))

    def fibers(self):
        out = {}
        for i, j in enumerate(self.img):
            out[j] = out.get(j, 0) | (1 << i)
        return out

    def compose(self, inner):
        """self after inner."""
        if inner.cod != self.dom:
            from .errors import SpaceMismatch
            raise SpaceMismatch("codomain of the inner map differs from the domain of the outer map")
        return ContinuousMap.from_indices(inner.dom, self.cod, [self.img[j] for j in inner.img])

    def restrict(self, S):
        sub = subspace(self.dom, S)
        return ContinuousMap.from_indices(sub, self.cod, [self.img[self.dom.index[p]] for p in sub.points])

    def __eq__(self, other):
        return (isinstance(other, ContinuousMap) and self.dom == other.dom
                and self.cod == other.cod and self.img == other.img)

    def __hash__(self):
        return hash((self.dom, self.cod, self.img))

    def __repr__(self):
        return f"ContinuousMap({self.mapping!r})"


def identity(space):
    return ContinuousMap.from_indices(space, space, range(len(space)))


def inclusion(space, S):
    sub = subspace(space, S)
    return ContinuousMap.from_indices(sub, space, [space.index[p] for p in sub.points])


def _discontinuity(dom, cod, img):
    for i, m in enumerate(dom.masks):
        target = cod.masks[img[i]]
        for j in bits(m):
            if not target >> img[j] & 1:
                return i
    return None


def is_continuous(dom, cod, f):
    """Alexandrov criterion f(U_x) ⊆ U_f(x); the witness is the first failing x."""
    img = [cod.index[f[p]] for p in dom.points]
    bad = _discontinuity(dom, cod, img)
    if bad is None:
        return Verdict(True)
    return Verdict(False, dom.points[bad])


@dataclass(frozen=True)
class SpaceFamilyHandle:
    space: FinSpace
    parts: tuple
    injections: tuple = ()
    projection: ContinuousMap | None = None


def disjoint_union(spaces, tags=None):
    spaces = list(spaces)
    if not spaces:
        raise EmptyList("disjoint union of an empty list")
    tags = list(range(len(spaces))) if tags is None else list(tags)
    points = [(t, p) for t, s in zip(tags, spaces) for p in s.points]
    table = {}
    for t, s in zip(tags, spaces):
        for p, m in zip(s.points, s.masks):
            table[(t, p)] = [(t, q) for q in s.sorted_points(m)]
    union = make_space(points, table)
    injections = tuple(
        ContinuousMap.from_indices(s, union, [union.index[(t, p)] for p in s.points])
        for t, s in zip(tags, spaces)
    )
    return SpaceFamilyHandle(union, tuple(spaces), injections)


def _class_id(space, m):
    return tuple(space.points[i] for i in bits(m))


def quotient_space(space, partition):
    """Quotient by a partition; quotient points are tuples of their members."""
    cls_of = [None] * len(space)
    blocks = []
    for block in partition:
        m = space.mask(block)
        if m == 0:
            raise NotAPartition("empty block in partition")
        for i in bits(m):
            if cls_of[i] is not None:
                raise NotAPartition(f"{space.points[i]!r} lies in two blocks")
            cls_of[i] = len(blocks)
        blocks.append(m)
    missing = [space.points[i] for i, c in enumerate(cls_of) if c is None]
    if missing:
        raise NotAPartition(f"points not covered by the partition: {missing!r}")
    return _quotient_from_blocks(space, blocks, cls_of)


def _quotient_from_blocks(space, blocks, cls_of):
    def saturate(m):
        out = 0
        for i in bits(m):
            out |= blocks[cls_of[i]]
        return out

    ids = [_class_id(space, b) for b in blocks]
    table = {}
    for k, b in enumerate(blocks):
        S = saturate(space.open_hull_mask(b))
        while True:
            T = saturate(space.open_hull_mask(S))
            if T == S:
                break
            S = T
        table[ids[k]] = {ids[cls_of[i]] for i in bits(S)}
    quo = make_space(ids, table)
    proj = ContinuousMap.from_indices(space, quo, [quo.index[ids[cls_of[i]]] for i in range(len(space))])
    return SpaceFamilyHandle(quo, (space,), (), proj)


def product(A, B, name=None):
    points = [(a, b) for a in A.points for b in B.points]
    table = {}
    for a, ma in zip(A.points, A.masks):
        for b, mb in zip(B.points, B.masks):
            table[(a, b)] = [(x, y) for x in A.sorted_points(ma) for y in B.sorted_points(mb)]
    return make_space(points, table, name)


def image_subspace(f):
    return subspace(f.cod, f.cod.unmask(f.image_mask(f.dom.full)))


# ------------------------------------------------------------ enumeration

def _check_budget(X, Y, budget):
    total = len(Y) ** len(X)
    if total > budget:
        raise BudgetExceeded(f"{total} candidate maps exceed the budget of {budget}")
    return total


def enumerate_maps(X, Y, predicate=None, budget=MAP_BUDGET):
    """Every total function X → Y passing ``predicate``, in lexicographic order.

    ``predicate`` takes a dict, or is the string "continuous".
    """
    _check_budget(X, Y, budget)
    if predicate == "continuous":
        predicate = lambda f: is_continuous(X, Y, f).ok  # noqa: E731
    out = []
    for combo in itertools.product(Y.points, repeat=len(X)):
        f = dict(zip(X.points, combo))
        if predicate is None or predicate(f):
            out.append(f)
    return out


def continuous_maps(X, Y, budget=MAP_BUDGET):
    """Continuous maps in lexicographic order, via pruned backtracking."""
    return [ContinuousMap.from_indices(X, Y, row) for row in continuous_rows(X, Y, budget)]


def continuous_rows(X, Y, budget=MAP_BUDGET):
    """Continuous maps as a (k, |X|) integer array of codomain indices."""
    n, m = len(X), len(Y)
    dtype = np.uint8 if m < 256 else np.int64
    if n == 0:
        return np.zeros((1, 0), dtype=dtype)
    if m == 0:
        return np.zeros((0, n), dtype=dtype)
    if m ** n <= budget and X.kernel_ok and Y.kernel_ok:
        return _continuous_rows_vector(X, Y, dtype)
    rows = []
    img = [0] * n
    cmasks = Y.masks
    below = [[j for j in range(i) if X.masks[i] >> j & 1] for i in range(n)]
    above = [[j for j in range(i) if X.masks[j] >> i & 1] for i in range(n)]

    def extend(i):
        if i == n:
            rows.append(tuple(img))
            if len(rows) > budget:
                raise BudgetExceeded(f"more than {budget} continuous maps")
            return
        for v in range(m):
            if any(not cmasks[v] >> img[j] & 1 for j in below[i]):
                continue
            if any(not cmasks[img[j]] >> v & 1 for j in above[i]):
                continue
            img[i] = v
            extend(i + 1)

    extend(0)
    return np.array(rows, dtype=dtype).reshape(len(rows), n)


def _continuous_rows_vector(X, Y, dtype, chunk=1 << 20):
    n, m = len(X), len(Y)
    pairs = [(i, j) for i in range(n) for j in bits(X.masks[i]) if j != i]
    px = np.array([p[0] for p in pairs], dtype=np.int64)
    py = np.array([p[1] for p in pairs], dtype=np.int64)
    total = m ** n
    weights = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    out = []
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        rows = ((codes[:, None] // weights[None, :]) % m).astype(dtype)
        if pairs:
            rows = rows[_kernels.continuous(rows, px, py, Y.np_masks)]
        out.append(rows)
    return np.concatenate(out) if out else np.zeros((0, n), dtype=dtype)


# ------------------------------------------------------- canonical forms

def _relabel(masks, perm):
    out = [0] * len(masks)
    for i, m in enumerate(masks):
        out[perm[i]] = sum(1 << perm[j] for j in bits(m))
    return tuple(out)


def canonical_code(masks):
    n = len(masks)
    return min(_relabel(masks, perm) for perm in itertools.permutations(range(n)))


def _preorder_codes(n):
    if n == 0:
        return {()}
    found = set()
    for code in _preorder_codes(n - 1):
        old = FinSpace(range(n - 1), code)
        xbit = 1 << (n - 1)
        for D in old.open_masks():
            for Y in old.closed_masks():
                if any(D & ~code[y] for y in bits(Y)):
                    continue
                masks = [m | xbit if Y >> i & 1 else m for i, m in enumerate(code)]
                masks.append(D | xbit)
                found.add(canonical_code(masks))
    return found


_CATALOG = {}


def probe_catalog(n, cap=CATALOG_CAP):
    """Spaces on exactly n points up to homeomorphism, in canonical order.

    Sizes above ``cap`` raise BudgetExceeded; pass a larger cap to opt in.
    """
    if n > cap:
        raise BudgetExceeded(f"probe catalog for {n} points exceeds the cap of {cap}")
    if n < 0:
        raise ValueError("negative size")
    if n not in _CATALOG:
        codes = sorted(_preorder_codes(n))
        _CATALOG[n] = tuple(FinSpace(range(n), code, f"probe{n}.{k}") for k, code in enumerate(codes))
    return list(_CATALOG[n])


def probes_upto(k, cap=CATALOG_CAP):
    """Nonempty probe spaces with at most k points."""
    return [s for n in range(1, k + 1) for s in probe_catalog(n, cap)]


def random_space(n, rng, density=0.25):
    """Random preorder: random relation, then transitive closure."""
    masks = [1 << i for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < density:
                masks[i] |= 1 << j
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = masks[i]
            for j in bits(masks[i]):
                acc |= masks[j]
            if acc != masks[i]:
                masks[i] = acc
                changed = True
    return FinSpace(range(n), masks)


def find_homeomorphism(A, B):
    """A dict A → B that is a homeomorphism, or None."""
    if len(A) != len(B):
        return None
    n = len(A)

    def sig(S, i):
        return (popcount(S.masks[i]), popcount(S.upmasks[i]))

    sa = [sig(A, i) for i in range(n)]
    sb = [sig(B, i) for i in range(n)]
    if sorted(sa) != sorted(sb):
        return None
    order = sorted(range(n), key=lambda i: (-popcount(A.masks[i]), i))
    assign = {}
    used = set()

    def ok(i, j):
        for k, v in assign.items():
            if (A.masks[i] >> k & 1) != (B.masks[j] >> v & 1):
                return False
            if (A.masks[k] >> i & 1) != (B.masks[v] >> j & 1):
                return False
        return True

    def search(t):
        if t == n:
            return True
        i = order[t]
        for j in range(n):
            if j in used or sb[j] != sa[i] or not ok(i, j):
                continue
            assign[i] = j
            used.add(j)
            if search(t + 1):
                return True
            del assign[i]
            used.discard(j)
        return False

    if not search(0):
        return None
    return {A.points[i]: B.points[j] for i, j in assign.items()}
