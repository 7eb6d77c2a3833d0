"""Finite group actions, ramification, and the quotient certifier.

A point is free when some neighbourhood V has g·V ∩ V = ∅ for every
g ≠ e.  On a finite space the minimal open is inside every neighbourhood,
so testing U_x alone decides it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidAction
from .fintop import (
    ContinuousMap, Verdict, continuous_rows, find_homeomorphism, point_key,
    probes_upto, quotient_space,
)
from .gencat import diffuse_flags, is_diffuse, is_open_map
from .negligible import negligible_by_definition

ACCEPT = "Accept"
REJECT = "Reject"
RAMIFICATION = "ramification not negligible"
SEPARATION = "orbits not separable"


@dataclass
class GroupAction:
    space: object
    elements: tuple
    identity: object
    mul: dict
    act: dict
    name: str = ""

    def apply(self, g, x):
        return self.act[g](x)

    def inverse(self, g):
        for h in self.elements:
            if self.mul[(g, h)] == self.identity:
                return h
        raise InvalidAction(f"{g!r} has no inverse")

    def orbit_mask(self, i):
        out = 0
        for g in self.elements:
            out |= 1 << self.act[g].img[i]
        return out

    def orbits(self):
        seen = 0
        out = []
        for i in range(len(self.space)):
            if seen >> i & 1:
                continue
            m = self.orbit_mask(i)
            seen |= m
            out.append(m)
        return out


def validate_action(action):
    """Raise InvalidAction unless the table is a group acting by homeomorphisms."""
    els = list(action.elements)
    e = action.identity
    M = action.space
    if len(set(els)) != len(els):
        raise InvalidAction("repeated group element")
    if e not in els:
        raise InvalidAction(f"identity {e!r} is not an element")
    for g in els:
        for h in els:
            if (g, h) not in action.mul:
                raise InvalidAction(f"composition table has no entry for {g!r}*{h!r}")
            if action.mul[(g, h)] not in els:
                raise InvalidAction(f"{g!r}*{h!r} is not an element")
    for g in els:
        if action.mul[(e, g)] != g or action.mul[(g, e)] != g:
            raise InvalidAction(f"{e!r} is not a two-sided identity for {g!r}")
        if not any(action.mul[(g, h)] == e and action.mul[(h, g)] == e for h in els):
            raise InvalidAction(f"{g!r} has no inverse")
    for g in els:
        for h in els:
            for k in els:
                if action.mul[(action.mul[(g, h)], k)] != action.mul[(g, action.mul[(h, k)])]:
                    raise InvalidAction(f"composition table is not associative at ({g!r}, {h!r}, {k!r})")
    for g in els:
        a = action.act.get(g)
        if a is None:
            raise InvalidAction(f"no map given for {g!r}")
        if a.dom != M or a.cod != M:
            raise InvalidAction(f"map for {g!r} is not a self-map of the space")
        if sorted(a.img) != list(range(len(M))) or not is_open_map(a):
            raise InvalidAction(f"map for {g!r} is not a homeomorphism")
    if list(action.act[e].img) != list(range(len(M))):
        raise InvalidAction("identity does not act trivially")
    for g in els:
        for h in els:
            gh = action.act[action.mul[(g, h)]].img
            comp = tuple(action.act[g].img[j] for j in action.act[h].img)
            if tuple(gh) != comp:
                raise InvalidAction(f"action of {g!r}*{h!r} differs from the composite of the actions")
    return action


def make_action(space, elements, identity, mul, maps, name=""):
    """Build an action from a table and point maps for some elements; the rest follow from products."""
    els = list(elements)
    act = {identity: ContinuousMap.from_indices(space, space, range(len(space)))}
    for g, f in maps.items():
        if isinstance(f, ContinuousMap):
            act[g] = f
        else:
            act[g] = ContinuousMap(space, space, f, check=False)
    changed = True
    while changed:
        changed = False
        for g in list(act):
            for h in list(act):
                gh = mul.get((g, h))
                if gh is not None and gh not in act:
                    act[gh] = ContinuousMap.from_indices(space, space, [act[g].img[j] for j in act[h].img])
                    changed = True
    action = GroupAction(space, tuple(els), identity, dict(mul), act, name)
    return validate_action(action)


def cyclic_action(space, generator, order, name=""):
    """Z/order acting through powers of a point map; elements are 0..order-1."""
    els = list(range(order))
    mul = {(a, b): (a + b) % order for a in els for b in els}
    return make_action(space, els, 0, mul, {1: generator} if order > 1 else {}, name)


def trivial_action(space, name=""):
    return make_action(space, [0], 0, {(0, 0): 0}, {}, name)


# -------------------------------------------------------------- ramification

def free_mask(action):
    M = action.space
    out = 0
    for i, m in enumerate(M.masks):
        if all(action.act[g].image_mask(m) & m == 0 for g in action.elements if g != action.identity):
            out |= 1 << i
    return out


def upper_ramification(action):
    """(U, K): the free locus and its complement."""
    M = action.space
    u = free_mask(action)
    return M.unmask(u), M.unmask(M.full & ~u)


@dataclass
class SeparationReport:
    ok: bool
    witnesses: dict
    failure: object = None
    symmetric: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def separation_check(action):
    """Disjoint minimal opens for every pair x, g·x with g·x ≠ x."""
    M = action.space
    witnesses = {}
    failure = None
    for i in range(len(M)):
        for g in action.elements:
            j = action.act[g].img[i]
            if j == i:
                continue
            pair = (M.points[i], M.points[j])
            if M.masks[i] & M.masks[j]:
                if failure is None:
                    failure = pair
                continue
            witnesses[pair] = (M.unmask(M.masks[i]), M.unmask(M.masks[j]))
    symmetric = {}
    for i, m in enumerate(M.masks):
        good = True
        for g in action.elements:
            moved = action.act[g].image_mask(m)
            if action.act[g].img[i] == i:
                good &= moved == m
            else:
                good &= moved & m == 0
        symmetric[M.points[i]] = M.unmask(m) if good else None
    return SeparationReport(failure is None, witnesses, failure, symmetric)


def orbit_partition(action):
    M = action.space
    return [M.sorted_points(m) for m in action.orbits()]


def build_quotient(action):
    """Orbit space A and the projection b: B → A."""
    handle = quotient_space(action.space, orbit_partition(action))
    return handle.space, handle.projection


@dataclass
class QuotientCertificate:
    action: GroupAction
    free_locus: frozenset
    upper_ramification: frozenset
    quotient: object
    projection: ContinuousMap
    lower_ramification: frozenset
    separation: SeparationReport
    verdict: str
    reason: str = ""
    witness: object = None
    b_diffuse: Verdict | None = None
    lower_negligible: bool | None = None

    @property
    def accepted(self):
        return self.verdict == ACCEPT

    def lines(self):
        M = self.action.space
        A = self.quotient

        def fmt(space, S):
            return "{" + ", ".join(_fmt_point(p) for p in sorted(S, key=point_key)) + "}"

        out = [f"verdict: {self.verdict}" + (f" ({self.reason})" if self.reason else "")]
        out.append(f"group order: {len(self.action.elements)}")
        out.append(f"points: {len(M)}  orbits: {len(A)}")
        out.append(f"upper ramification K: {fmt(M, self.upper_ramification)}")
        out.append(f"lower ramification b(K): {fmt(A, self.lower_ramification)}")
        if self.witness is not None:
            out.append(f"witness: {_fmt_point(self.witness)}")
        if self.accepted:
            out.append(f"b diffuse: {bool(self.b_diffuse.ok)}")
            out.append(f"b(K) negligible: {self.lower_negligible}")
        out.append(f"separated pairs: {len(self.separation.witnesses)}")
        for pair in sorted(self.separation.witnesses, key=point_key):
            U, V = self.separation.witnesses[pair]
            out.append(f"  {_fmt_point(pair[0])} | {_fmt_point(pair[1])}: {fmt(M, U)} / {fmt(M, V)}")
        return out


def _fmt_point(p):
    if isinstance(p, tuple):
        return "(" + ",".join(_fmt_point(q) for q in p) + ")"
    if isinstance(p, frozenset):
        return "{" + ", ".join(_fmt_point(q) for q in sorted(p, key=point_key)) + "}"
    return str(p)


def certify_pseudoetale(action):
    """Accept iff the ramification set is negligible and orbits separate."""
    validate_action(action)
    M = action.space
    u = free_mask(action)
    k = M.full & ~u
    A, b = build_quotient(action)
    bk = b.image_mask(k)
    sep = separation_check(action)
    cert = QuotientCertificate(
        action, M.unmask(u), M.unmask(k), A, b, A.unmask(bk), sep, ACCEPT,
    )
    if not negligible_by_definition(M, M.full, k):
        cert.verdict, cert.reason = REJECT, RAMIFICATION
        cert.witness = M.unmask(k)
        return cert
    if not sep.ok:
        cert.verdict, cert.reason = REJECT, SEPARATION
        cert.witness = sep.failure
        return cert
    cert.b_diffuse = is_diffuse(b)
    cert.lower_negligible = negligible_by_definition(A, A.full, bk)
    return cert


# ------------------------------------------------------ quotient property

@dataclass
class QuotientPropertyReport:
    b_diffuse: Verdict
    probe_bound: int
    checked: int
    violations: list

    @property
    def ok(self):
        return self.b_diffuse.ok and not self.violations

    def __bool__(self):
        return self.ok


def quotient_property_check(action, probe_bound=3, max_violations=10):
    """For every continuous h: A → Y on probes, h diffuse iff h∘b diffuse; plus b itself."""
    A, b = build_quotient(action)
    bd = is_diffuse(b)
    checked = 0
    violations = []
    cols = np.array(b.img, dtype=np.int64)
    for Y in probes_upto(probe_bound):
        rows = continuous_rows(A, Y)
        if rows.shape[0] == 0:
            continue
        lhs = diffuse_flags(A, Y, rows)
        rhs = diffuse_flags(b.dom, Y, rows[:, cols])
        checked += rows.shape[0]
        for t in np.flatnonzero(lhs != rhs):
            if len(violations) < max_violations:
                h = {A.points[i]: Y.points[v] for i, v in enumerate(rows[t])}
                violations.append((Y.name, h, bool(lhs[t]), bool(rhs[t])))
    return QuotientPropertyReport(bd, probe_bound, checked, violations)


def fiber_bound_check(f, n):
    """Every fiber of f has at most n points."""
    return all(bin(m).count("1") <= n for m in f.fibers().values())


def overlap_witness_misses(action):
    """Pairs x, y with b(x) = b(y) lacking an overlap point z with rho1(z) = x, rho2(z) = y."""
    from .canopy import canopy_from_group_action
    can = canopy_from_group_action(action)
    _, b = build_quotient(action)
    key = (1, 1)
    r1, r2 = can.rho1[key], can.rho2[key]
    hits = {(r1.img[z], r2.img[z]) for z in range(len(can.overlaps[key]))}
    M = action.space
    misses = []
    total = 0
    for x in range(len(M)):
        for y in range(len(M)):
            if b.img[x] == b.img[y]:
                total += 1
                if (x, y) not in hits:
                    misses.append((M.points[x], M.points[y]))
    return total, misses


def quotient_matches_affinization(action):
    """Homeomorphism between the orbit space and the affinized group canopy, or None."""
    from .canopy import affinize, canopy_from_group_action, validate_canopy
    A, _ = build_quotient(action)
    aff = affinize(validate_canopy(canopy_from_group_action(action)))
    return find_homeomorphism(A, aff.space)


def lower_witness_element(cert):
    """The negligible element of A witnessing that b fails to be diffuse, if any."""
    v = is_diffuse(cert.projection)
    return None if v.ok else v.witness
