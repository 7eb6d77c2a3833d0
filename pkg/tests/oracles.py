"""Brute-force reference implementations on plain Python sets.

Everything here works from the list of open sets of a space, found by
testing every subset, so it shares no code with the bitmask routines.
"""
import itertools


def minopens(space):
    return {p: frozenset(q for j, q in enumerate(space.points) if m >> j & 1)
            for p, m in zip(space.points, space.masks)}


def subsets(S):
    S = list(S)
    for r in range(len(S) + 1):
        for c in itertools.combinations(S, r):
            yield frozenset(c)


def opens(space):
    mo = minopens(space)
    return [S for S in subsets(space.points) if all(mo[p] <= S for p in S)]


def is_open(space, S):
    mo = minopens(space)
    return all(mo[p] <= S for p in S)


def closure(space, S):
    pts = frozenset(space.points)
    best = pts
    for U in opens(space):
        if not (U & S):
            best &= pts - U
    return best


def connected(space, S):
    """Nonempty and not split by two disjoint relatively open pieces."""
    S = frozenset(S)
    if not S:
        return False
    rel = {U & S for U in opens(space)}
    return not any(A and A != S and (S - A) in rel for A in rel)


def components(space, S):
    S = frozenset(S)
    out = []
    rest = set(S)
    while rest:
        p = min(rest, key=repr)
        best = frozenset([p])
        for T in subsets(S):
            if p in T and len(T) > len(best) and connected(space, T):
                best = T
        out.append(best)
        rest -= best
    return out


def connected_opens(space):
    return [U for U in opens(space) if connected(space, U)]


def zdense(space, U):
    return all(connected(space, U & C) for C in connected_opens(space))


def negligible(space, U, I):
    """I closed in the open set U and U − I Z-dense in U."""
    U, I = frozenset(U), frozenset(I)
    if not I <= U or not is_open(space, U - I):
        return False
    rest = U - I
    for C in connected_opens(space):
        if C <= U and not connected(space, rest & C):
            return False
    return True


def continuous(dom, cod, f):
    """Preimage of every open set is open."""
    return all(is_open(dom, frozenset(p for p in dom.points if f[p] in V)) for V in opens(cod))


def all_maps(X, Y):
    for combo in itertools.product(Y.points, repeat=len(X.points)):
        yield dict(zip(X.points, combo))


def diffuse(dom, cod, f):
    """Every negligible element of cod pulls back to a negligible element of dom."""
    for U in opens(cod):
        for I in subsets(U):
            if negligible(cod, U, I):
                pu = frozenset(p for p in dom.points if f[p] in U)
                pi = frozenset(p for p in dom.points if f[p] in I)
                if not negligible(dom, pu, pi):
                    return False
    return True


def topologies(n):
    """All topologies on range(n) as frozensets of open sets (n ≤ 3)."""
    pts = frozenset(range(n))
    subs = list(subsets(pts))
    rest = [S for S in subs if S and S != pts]
    for r in range(len(rest) + 1):
        for fam in itertools.combinations(rest, r):
            T = set(fam) | {frozenset(), pts}
            if all(A | B in T and A & B in T for A in T for B in T):
                yield frozenset(T)


def preorders(n):
    """All preorders on range(n) as frozensets of pairs (a, b) meaning a ≤ b."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    diag = {(a, a) for a in range(n)}
    for r in range(len(pairs) + 1):
        for rel in itertools.combinations(pairs, r):
            R = diag | set(rel)
            if all((a, d) in R for a, b in R for c, d in R if b == c):
                yield frozenset(R)


def iso_classes(structs, n, act):
    seen = set()
    for s in structs:
        key = min(act(s, p) for p in itertools.permutations(range(n)))
        seen.add(key)
    return len(seen)
