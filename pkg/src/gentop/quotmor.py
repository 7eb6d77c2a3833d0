"""Maps into a group quotient: representations, and the two notions of equality.

Component-wise equality asks for one group element per connected component
relating the two maps.  Pointwise equality only asks for one per point.
Points where the two disagree in every neighbourhood are the pathology.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotACover, SpaceMismatch
from .fintop import ContinuousMap, bits, point_key
from .gencat import is_cover, is_diffuse

COMPONENT_WISE = "ComponentWise"
POINTWISE_ONLY = "PointwiseOnly"
DISTINCT = "Distinct"


@dataclass
class QuotientMorphismRep:
    source: object
    action: object
    theta: list
    legs: list


@dataclass
class EqualityVerdict:
    kind: str
    per_component: dict
    pathology_points: frozenset = frozenset()
    per_point: dict = field(default_factory=dict)

    def csv_rows(self):
        rows = [("section", "item", "value")]
        rows.append(("verdict", "kind", self.kind))
        for comp in sorted(self.per_component, key=point_key):
            rows.append(("component", _fmt(comp), _fmt(self.per_component[comp])))
        for p in sorted(self.pathology_points, key=point_key):
            rows.append(("pathology", _fmt(p), ""))
        return rows


def _fmt(p):
    if isinstance(p, (tuple, list)):
        return "(" + " ".join(_fmt(q) for q in p) + ")"
    if isinstance(p, frozenset):
        return "{" + " ".join(_fmt(q) for q in sorted(p, key=point_key)) + "}"
    if p is None:
        return "-"
    return str(p)


def _check_pair(f, g, action):
    if f.dom != g.dom:
        raise SpaceMismatch("the two maps have different domains")
    if f.cod != action.space or g.cod != action.space:
        raise SpaceMismatch("maps must land in the space acted on")


def relating_elements(f, g, action, i):
    """Group elements h with g(x) = h·f(x) at the domain point of index i."""
    return [h for h in action.elements if action.act[h].img[f.img[i]] == g.img[i]]


def morphisms_equal(f, g, action):
    """ComponentWise when one h per component relates f and g; else PointwiseOnly or Distinct."""
    _check_pair(f, g, action)
    D = f.dom
    per_point = {}
    pointwise = True
    for i in range(len(D)):
        hs = relating_elements(f, g, action, i)
        per_point[D.points[i]] = hs[0] if hs else None
        pointwise &= bool(hs)
    per_component = {}
    componentwise = pointwise
    for comp in D.component_masks(D.full):
        found = None
        for h in action.elements:
            a = action.act[h]
            if all(a.img[f.img[i]] == g.img[i] for i in bits(comp)):
                found = h
                break
        per_component[tuple(D.sorted_points(comp))] = found
        componentwise &= found is not None
    if componentwise:
        kind = COMPONENT_WISE
    elif pointwise:
        kind = POINTWISE_ONLY
    else:
        kind = DISTINCT
    return EqualityVerdict(kind, per_component, frozenset(), per_point)


def pathology_points(f, g, action):
    """x whose minimal open holds both a point with g = f ≠ σf and one with g = σf ≠ f, some σ ≠ e."""
    D = f.dom
    out = set()
    for s in action.elements:
        if s == action.identity:
            continue
        a = action.act[s]
        plain = twisted = 0
        for i in range(len(D)):
            fi, gi, sf = f.img[i], g.img[i], a.img[f.img[i]]
            if gi == fi != sf:
                plain |= 1 << i
            if gi == sf != fi:
                twisted |= 1 << i
        for i, m in enumerate(D.masks):
            if m & plain and m & twisted:
                out.add(D.points[i])
    return frozenset(out)


def pointwise_vs_component_report(f, g, action):
    verdict = morphisms_equal(f, g, action)
    if verdict.kind == COMPONENT_WISE:
        verdict.pathology_points = frozenset()
    else:
        verdict.pathology_points = pathology_points(f, g, action)
    return verdict


def affinization_equal(f, g, action):
    """Search a continuous δ into the group canopy overlap with rho1∘δ = f and rho2∘δ = g."""
    from .canopy import canopy_from_group_action
    _check_pair(f, g, action)
    can = canopy_from_group_action(action)
    key = (1, 1)
    ov, r1, r2 = can.overlaps[key], can.rho1[key], can.rho2[key]
    D = f.dom
    n = len(D)
    options = []
    for i in range(n):
        options.append([z for z in range(len(ov)) if r1.img[z] == f.img[i] and r2.img[z] == g.img[i]])
    order = sorted(range(n), key=lambda i: (bin(D.masks[i]).count("1"), i))
    choice = [None] * n

    def consistent(i, z):
        for j in bits(D.masks[i]):
            if j != i and choice[j] is not None and not ov.masks[z] >> choice[j] & 1:
                return False
        for j in bits(D.upmasks[i]):
            if j != i and choice[j] is not None and not ov.masks[choice[j]] >> z & 1:
                return False
        return True

    def walk(t):
        if t == n:
            return True
        i = order[t]
        for z in options[i]:
            if consistent(i, z):
                choice[i] = z
                if walk(t + 1):
                    return True
                choice[i] = None
        return False

    if walk(0):
        return True, ContinuousMap.from_indices(D, ov, choice)
    return False, None


def topological_quotient_equal(f, g, action):
    from .grpquot import build_quotient
    _, b = build_quotient(action)
    return all(b.img[f.img[i]] == b.img[g.img[i]] for i in range(len(f.dom)))


def validate_representation(rep):
    """Cover check, diffuse legs, and orbit agreement of legs over set-level overlaps."""
    action = rep.action
    N = action.space
    theta = list(rep.theta)
    cover = is_cover(theta, rep.source, "pseudoetale")
    if not cover.ok:
        raise NotACover(str(cover.witness))
    if len(rep.legs) != len(theta):
        return False, ("leg count differs from chart count", len(rep.legs), len(theta))
    for j, (t, leg) in enumerate(zip(theta, rep.legs)):
        if leg.dom != t.dom or leg.cod != N:
            return False, ("leg has the wrong domain or codomain", j)
        v = is_diffuse(leg)
        if not v.ok:
            return False, ("leg not diffuse", j, v.witness)
    orbit = {}
    for m in action.orbits():
        for i in bits(m):
            orbit[i] = m
    for j, (tj, fj) in enumerate(zip(theta, rep.legs)):
        for k, (tk, fk) in enumerate(zip(theta, rep.legs)):
            for a in range(len(tj.dom)):
                for b in range(len(tk.dom)):
                    if tj.img[a] != tk.img[b]:
                        continue
                    if not orbit[fj.img[a]] >> fk.img[b] & 1:
                        return False, (j, k, tj.dom.points[a], tk.dom.points[b])
    return True, None


def mock_schwarz_pair():
    """Identity and the column fold on P25, under the reflection (a, b) ↦ (4 − a, b)."""
    from .fixtures import P25, reflection25
    action = reflection25()
    f = ContinuousMap.from_indices(P25, P25, range(len(P25)))
    g = ContinuousMap(P25, P25, {(a, b): (min(a, 4 - a), b) for a, b in P25.points})
    return f, g, action
