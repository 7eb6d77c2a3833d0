"""Twenty gluing-data fixtures: open covers, group actions and hand glued charts."""
from gentop.canopy import Canopy, canopy_from_cover, canopy_from_group_action
from gentop.fintop import ContinuousMap, disjoint_union, discrete, indiscrete, subspace
from gentop.fixtures import K5, LINE3, P9, SIERP, reflection25, rotation25, swap9
from gentop.grpquot import cyclic_action, trivial_action

X3 = set(LINE3.points)
D3 = discrete(range(3), "D3")
FLIP = {"l": "r", "m": "m", "r": "l"}
SS = disjoint_union([SIERP, SIERP])


def two_sierp_glued():
    """Two copies of SIERP glued along their open point."""
    opn = subspace(SIERP, {1})
    objects = {0: SIERP, 1: SIERP}
    overlaps, rho1, rho2 = {}, {}, {}
    for j in (0, 1):
        for k in (0, 1):
            ov = SIERP if j == k else opn
            incl = ContinuousMap.from_indices(ov, SIERP, [SIERP.index[p] for p in ov.points])
            overlaps[(j, k)], rho1[(j, k)], rho2[(j, k)] = ov, incl, incl
    return Canopy((0, 1), objects, overlaps, rho1, rho2, "sierp-glued")


def build():
    covers = [
        ("line3-two-charts", LINE3, [X3, {"r"}]),
        ("line3-three-charts", LINE3, [{"l"}, X3, {"r"}]),
        ("line3-single", LINE3, [X3]),
        ("sierp-single", SIERP, [{0, 1}]),
        ("sierp-two", SIERP, [{0, 1}, {1}]),
        ("k5-three", K5, [{0, 1}, {1, 2, 3}, {3, 4}]),
        ("k5-halves", K5, [{0, 1, 2, 3}, {1, 2, 3, 4}]),
        ("p9-single", P9, [set(P9.points)]),
        ("p9-three", P9, [set(P9.points), {("l", "l")}, {(a, "l") for a in "lmr"}]),
        ("d3-singletons", D3, [{0}, {1}, {2}]),
        ("indiscrete2", indiscrete(range(2)), [{0, 1}]),
    ]
    out = [(name, canopy_from_cover(X, opens, name)) for name, X, opens in covers]
    actions = [
        rotation25(),
        swap9(),
        trivial_action(SIERP, "trivial-sierp"),
        trivial_action(LINE3, "trivial-line3"),
        trivial_action(P9, "trivial-p9"),
        cyclic_action(P9, {(a, b): (FLIP[a], FLIP[b]) for a, b in P9.points}, 2, "rot9"),
        cyclic_action(SS.space, {(t, p): (1 - t, p) for t, p in SS.space.points}, 2, "swap-copies"),
        cyclic_action(D3, {0: 1, 1: 2, 2: 0}, 3, "z3-d3"),
    ]
    out += [(a.name, canopy_from_group_action(a, a.name)) for a in actions]
    out.append(("sierp-glued", two_sierp_glued()))
    return out


CANOPIES = build()


def codim_one_actions():
    """Actions fixing a wall of codimension one; their orbit canopies fail the colimit check."""
    return [
        reflection25(),
        cyclic_action(K5, {a: 4 - a for a in K5.points}, 2, "flip-k5"),
        cyclic_action(LINE3, FLIP, 2, "flip-line3"),
    ]
