"""Small named spaces used throughout the tests and the CLI examples."""
from .fintop import make_space, product

SIERP = make_space([0, 1], {0: [0, 1], 1: [1]}, "SIERP")
LINE3 = make_space(["l", "m", "r"], {"l": ["l"], "m": ["l", "m", "r"], "r": ["r"]}, "LINE3")


def khalimsky(n):
    """Khalimsky chain 0..n-1: odd points open, even points see their neighbours."""
    table = {}
    for i in range(n):
        if i % 2:
            table[i] = [i]
        else:
            table[i] = [j for j in (i - 1, i, i + 1) if 0 <= j < n]
    return make_space(range(n), table, f"K{n}")


K5 = khalimsky(5)
P9 = product(LINE3, LINE3, "P9")
P25 = product(K5, K5, "P25")


def _grp():
    from . import grpquot
    return grpquot


def rotation25():
    """Z2 acting on P25 by (a, b) ↦ (4 − a, 4 − b)."""
    return _grp().cyclic_action(P25, {(a, b): (4 - a, 4 - b) for a, b in P25.points}, 2, "rot25")


def swap9():
    """Z2 acting on P9 by exchanging the coordinates."""
    return _grp().cyclic_action(P9, {(a, b): (b, a) for a, b in P9.points}, 2, "swap9")


def reflection25():
    """Z2 acting on P25 by (a, b) ↦ (4 − a, b)."""
    return _grp().cyclic_action(P25, {(a, b): (4 - a, b) for a, b in P25.points}, 2, "refl25")
