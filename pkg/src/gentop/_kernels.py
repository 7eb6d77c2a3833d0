"""Batch kernels over bitmask-encoded subsets.

Every kernel exists twice: a numba ``@njit`` version and a plain numpy
version with identical results.  Setting ``GENTOP_DISABLE_NUMBA=1`` before
import selects the numpy versions.  Subsets of an n-point space are uint64
masks, so these kernels only serve spaces with at most 64 points; callers
fall back to Python ints beyond that.
"""
import os
import types

import numpy as np

DISABLE_ENV = "GENTOP_DISABLE_NUMBA"
MAX_POINTS = 64

_U1 = np.uint64(1)
_U0 = np.uint64(0)


def _numba_wanted():
    return os.environ.get(DISABLE_ENV, "").strip().lower() not in ("1", "true", "yes", "on")


# ---------------------------------------------------------------- numpy path

def _np_connected(masks, adj):
    masks = np.asarray(masks, dtype=np.uint64)
    n = adj.shape[0]
    seen = masks & (~masks + _U1)  # lowest set bit
    while True:
        grow = seen.copy()
        for i in range(n):
            hit = ((seen >> np.uint64(i)) & _U1).astype(bool)
            grow[hit] |= adj[i]
        grow &= masks
        if np.array_equal(grow, seen):
            break
        seen = grow
    return (seen == masks) & (masks != _U0)


def _np_continuous(rows, px, py, cmin):
    ok = np.ones(rows.shape[0], dtype=bool)
    for x, y in zip(px, py):
        fx = rows[:, x]
        fy = rows[:, y].astype(np.uint64)
        ok &= ((cmin[fx] >> fy) & _U1).astype(bool)
    return ok


def _np_preimage(rows, vmask):
    vmask = np.uint64(vmask)
    out = np.zeros(rows.shape[0], dtype=np.uint64)
    for i in range(rows.shape[1]):
        bit = (vmask >> rows[:, i].astype(np.uint64)) & _U1
        out |= bit << np.uint64(i)
    return out


def _np_negligible_local(umasks, imasks, dmin, adj):
    umasks = np.asarray(umasks, dtype=np.uint64)
    imasks = np.asarray(imasks, dtype=np.uint64)
    ok = (imasks & ~umasks) == _U0
    n = dmin.shape[0]
    for i in range(n):
        sh = np.uint64(i)
        in_u = ((umasks >> sh) & _U1).astype(bool)
        in_i = ((imasks >> sh) & _U1).astype(bool)
        meets = (dmin[i] & imasks) != _U0
        # a point of U outside I whose minimal open meets I: I not closed in U
        ok &= ~(in_u & ~in_i & meets)
        if in_i.any():
            rest = dmin[i] & ~imasks
            good = _np_connected(rest, adj)
            ok &= ~in_i | good
    return ok


def _np_zdense(umasks, copens, adj):
    umasks = np.asarray(umasks, dtype=np.uint64)
    ok = np.ones(umasks.shape[0], dtype=bool)
    for c in copens:
        ok &= _np_connected(umasks & c, adj)
    return ok


def _np_g(r):
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros_like(r)
    pos = r > 0
    inv = np.where(pos, 1.0 / np.where(pos, r, 1.0), 0.0)
    n = 2.0 * np.ceil(inv / 2.0)
    u = np.mod(inv, 4.0)
    lo = pos & (u > 0.0) & (u < 2.0)
    hi = pos & (u > 2.0) & (u < 4.0)
    t = np.where(lo, u, np.where(hi, u - 2.0, 1.0))
    s = np.exp(-1.0 / (t * (2.0 - t)))
    prof = np.where(lo, s, np.where(hi, -s, 0.0))
    out = np.where(pos, np.exp(-n) * prof, 0.0)
    return out


def _np_schwarz(x, y, z):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    r = np.hypot(x, y)
    g = _np_g(r)
    safe = np.where(r > 0, r, 1.0)
    s1 = y / safe
    s2 = 2.0 * x * y / (safe * safe)
    fx = np.where(r > 0, np.where(g > 0, g * s1, g * s2), 0.0)
    return fx, np.array(z, dtype=np.float64, copy=True)


numpy_kernels = types.SimpleNamespace(
    connected=_np_connected,
    continuous=_np_continuous,
    preimage=_np_preimage,
    negligible_local=_np_negligible_local,
    zdense=_np_zdense,
    g=_np_g,
    schwarz=_np_schwarz,
)


# ---------------------------------------------------------------- numba path

def _build_numba():
    from numba import njit

    @njit(cache=True)
    def conn1(m, adj):
        if m == 0:
            return False
        n = adj.shape[0]
        seen = m & (~m + np.uint64(1))
        while True:
            grow = seen
            for i in range(n):
                if (seen >> np.uint64(i)) & np.uint64(1):
                    grow |= adj[i]
            grow &= m
            if grow == seen:
                break
            seen = grow
        return seen == m

    @njit(cache=True)
    def connected(masks, adj):
        out = np.zeros(masks.shape[0], dtype=np.bool_)
        for t in range(masks.shape[0]):
            out[t] = conn1(masks[t], adj)
        return out

    @njit(cache=True)
    def continuous(rows, px, py, cmin):
        k = rows.shape[0]
        out = np.ones(k, dtype=np.bool_)
        for t in range(k):
            for p in range(px.shape[0]):
                fx = rows[t, px[p]]
                fy = np.uint64(rows[t, py[p]])
                if not (cmin[fx] >> fy) & np.uint64(1):
                    out[t] = False
                    break
        return out

    @njit(cache=True)
    def preimage(rows, vmask):
        k, n = rows.shape
        out = np.zeros(k, dtype=np.uint64)
        for t in range(k):
            acc = np.uint64(0)
            for i in range(n):
                if (vmask >> np.uint64(rows[t, i])) & np.uint64(1):
                    acc |= np.uint64(1) << np.uint64(i)
            out[t] = acc
        return out

    @njit(cache=True)
    def negligible_local(umasks, imasks, dmin, adj):
        k = umasks.shape[0]
        n = dmin.shape[0]
        out = np.ones(k, dtype=np.bool_)
        for t in range(k):
            u = umasks[t]
            m = imasks[t]
            if m & ~u:
                out[t] = False
                continue
            for i in range(n):
                sh = np.uint64(i)
                if not (u >> sh) & np.uint64(1):
                    continue
                if (m >> sh) & np.uint64(1):
                    if not conn1(dmin[i] & ~m, adj):
                        out[t] = False
                        break
                elif dmin[i] & m:
                    out[t] = False
                    break
        return out

    @njit(cache=True)
    def zdense(umasks, copens, adj):
        out = np.ones(umasks.shape[0], dtype=np.bool_)
        for t in range(umasks.shape[0]):
            for c in range(copens.shape[0]):
                if not conn1(umasks[t] & copens[c], adj):
                    out[t] = False
                    break
        return out

    @njit(cache=True)
    def g1(r):
        if r <= 0.0:
            return 0.0
        inv = 1.0 / r
        n = 2.0 * np.ceil(inv / 2.0)
        u = inv % 4.0
        if 0.0 < u < 2.0:
            return np.exp(-n) * np.exp(-1.0 / (u * (2.0 - u)))
        if 2.0 < u < 4.0:
            t = u - 2.0
            return -np.exp(-n) * np.exp(-1.0 / (t * (2.0 - t)))
        return 0.0

    @njit(cache=True)
    def g(r):
        flat = r.ravel()
        out = np.empty(flat.shape[0], dtype=np.float64)
        for i in range(flat.shape[0]):
            out[i] = g1(flat[i])
        return out.reshape(r.shape)

    @njit(cache=True)
    def schwarz(x, y, z):
        xf = x.ravel()
        yf = y.ravel()
        fx = np.empty(xf.shape[0], dtype=np.float64)
        for i in range(xf.shape[0]):
            r = np.hypot(xf[i], yf[i])
            if r == 0.0:
                fx[i] = 0.0
                continue
            gv = g1(r)
            if gv > 0.0:
                fx[i] = gv * yf[i] / r
            else:
                fx[i] = gv * 2.0 * xf[i] * yf[i] / (r * r)
        return fx.reshape(x.shape), z.copy()

    return types.SimpleNamespace(
        connected=connected,
        continuous=continuous,
        preimage=preimage,
        negligible_local=negligible_local,
        zdense=zdense,
        g=lambda r: g(np.asarray(r, dtype=np.float64)),
        schwarz=lambda x, y, z: schwarz(
            np.asarray(x, dtype=np.float64),
            np.asarray(y, dtype=np.float64),
            np.asarray(z, dtype=np.float64),
        ),
    )


numba_kernels = None
if _numba_wanted():
    try:
        numba_kernels = _build_numba()
    except ImportError:
        numba_kernels = None

active = numba_kernels if numba_kernels is not None else numpy_kernels
BACKEND = "numba" if active is numba_kernels else "numpy"


def as_masks(values):
    return np.fromiter((int(v) for v in values), dtype=np.uint64)


def connected(masks, adj):
    return active.connected(np.asarray(masks, dtype=np.uint64), adj)


def continuous(rows, px, py, cmin):
    return active.continuous(rows, px, py, cmin)


def preimage(rows, vmask):
    return active.preimage(rows, np.uint64(vmask))


def negligible_local(umasks, imasks, dmin, adj):
    return active.negligible_local(
        np.asarray(umasks, dtype=np.uint64), np.asarray(imasks, dtype=np.uint64), dmin, adj
    )


def zdense(umasks, copens, adj):
    return active.zdense(np.asarray(umasks, dtype=np.uint64), np.asarray(copens, dtype=np.uint64), adj)


def g_values(r):
    return active.g(r)


def schwarz_field(x, y, z):
    return active.schwarz(x, y, z)
