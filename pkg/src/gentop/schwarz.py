"""Numerical study of the map F: R³ → R² built from a flat periodic profile.

The profile is s(t) = exp(−1/(t(2 − t))) on (0, 2), extended to period 4
with the sign flipped on (2, 4).  g(r) = e^{−n} f(1/r) where n is the least
even integer ≥ 1/r, and F(r cos θ, r sin θ, z) is (g(r) sin θ, z) where
g > 0 and (g(r) sin 2θ, z) elsewhere.  The group −1 acts by
(x, y, z) ↦ (−x, −y, z) upstairs and (u, z) ↦ (−u, z) downstairs.

The g values shrink like e^{−1/r}, so witness margins are measured relative
to |g(r)| rather than in absolute units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import _kernels
from .errors import NegativeInput, WitnessNotFound

RADII = (0.5, 0.2, 0.1, 0.05, 0.02)
CSV_COLUMNS = ("stratum", "x", "y", "z", "Fx", "Fz", "witness_type")


@dataclass(frozen=True)
class SchwarzConfig:
    step: float = 0.05
    n_max: int = 5
    tol: float = 1e-9
    margin: float = 1e-3
    radii: tuple = RADII
    z_values: tuple = (-0.5, 0.0, 0.5)
    angles: int = 6

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if not self.radii or any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")


# --------------------------------------------------------------- evaluation

def bump(t):
    if t <= 0.0 or t >= 2.0:
        return 0.0
    return math.exp(-1.0 / (t * (2.0 - t)))


def f_eval(x):
    u = math.fmod(x, 4.0)
    if u < 0:
        u += 4.0
    if 0.0 < u < 2.0:
        return bump(u)
    if 2.0 < u < 4.0:
        return -bump(u - 2.0)
    return 0.0


def f_values(x):
    """Vectorised profile."""
    u = np.mod(np.asarray(x, dtype=np.float64), 4.0)
    lo = (u > 0) & (u < 2)
    hi = (u > 2) & (u < 4)
    t = np.where(lo, u, np.where(hi, u - 2.0, 1.0))
    s = np.exp(-1.0 / (t * (2.0 - t)))
    return np.where(lo, s, np.where(hi, -s, 0.0))


def even_ceiling(v):
    return 2 * math.ceil(v / 2.0)


def g_eval(x):
    if x < 0:
        raise NegativeInput(f"g is defined for x ≥ 0, got {x!r}")
    if x == 0:
        return 0.0
    inv = 1.0 / x
    return math.exp(-even_ceiling(inv)) * f_eval(inv)


def g_values(r):
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0):
        raise NegativeInput("g is defined for r ≥ 0")
    return _kernels.g_values(r)


def F_eval(x, y, z):
    r = math.hypot(x, y)
    if r == 0:
        return 0.0, float(z)
    g = g_eval(r)
    if g > 0:
        return g * (y / r), float(z)
    return g * (2.0 * x * y / (r * r)), float(z)


def F_values(x, y, z):
    return _kernels.schwarz_field(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64), np.asarray(z, dtype=np.float64))


# ------------------------------------------------------------- identities

def symmetry_residual(x, y, z):
    """Largest deviation from F(−v) = F(v) where g ≤ 0 and F(−v) = −F(v) where g > 0."""
    x, y, z = (np.asarray(a, dtype=np.float64) for a in (x, y, z))
    fx, fz = F_values(x, y, z)
    mx, mz = F_values(-x, -y, z)
    g = g_values(np.hypot(x, y))
    want = np.where(g > 0, -fx, fx)
    return float(max(np.max(np.abs(mx - want), initial=0.0), np.max(np.abs(mz - fz), initial=0.0)))


def orbit_agreement_residual(x, y, z):
    """max over samples of the distance from F(v) to {F(−v), −F(−v)}."""
    x, y, z = (np.asarray(a, dtype=np.float64) for a in (x, y, z))
    fx, fz = F_values(x, y, z)
    mx, mz = F_values(-x, -y, z)
    d = np.minimum(np.abs(fx - mx), np.abs(fx + mx)) + np.abs(fz - mz)
    return float(np.max(d, initial=0.0))


def grid(step, radius=1.0, zmax=1.0):
    """Grid points with r ≤ radius and |z| ≤ zmax, as flat arrays."""
    k = int(round(radius / step))
    kz = int(round(zmax / step))
    ax = np.arange(-k, k + 1) * step
    az = np.arange(-kz, kz + 1) * step
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    keep = np.hypot(X, Y) <= radius + 1e-12
    X, Y = X[keep], Y[keep]
    xs = np.repeat(X, az.size)
    ys = np.repeat(Y, az.size)
    zs = np.tile(az, X.size)
    return xs, ys, zs


# ------------------------------------------------------------------ strata

def cylinder_radius(n):
    return 1.0 / (2 * n)


def xi_lines(n_max):
    """Cylindrical (r, θ) of the line family at r = 1/k, k odd, down to the last cylinder."""
    out = []
    k = 1
    while 1.0 / k >= cylinder_radius(n_max) - 1e-12:
        r = 1.0 / k
        if g_eval(r) > 0:
            thetas = (math.pi / 2, 3 * math.pi / 2)
        else:
            thetas = tuple(j * math.pi / 4 for j in (1, 3, 5, 7))
        out.extend((k, r, t) for t in thetas)
        k += 2
    return out


def strata(config):
    """(name, patch sampler) pairs; each sampler returns x, y, z arrays of an open patch."""
    zs = np.linspace(-0.5, 0.5, 101)
    out = [("axis", lambda: (np.zeros_like(zs), np.zeros_like(zs), zs))]
    th = np.linspace(0.2, 0.6, 41)
    T, Z = np.meshgrid(th, zs, indexing="ij")
    for n in range(1, config.n_max + 1):
        r = cylinder_radius(n)
        out.append((f"C{n}", lambda r=r: (r * np.cos(T).ravel(), r * np.sin(T).ravel(), Z.ravel())))
    for k, r, t in xi_lines(config.n_max):
        name = f"Xi{k}@{round(math.degrees(t))}"
        out.append((name, lambda r=r, t=t: (np.full_like(zs, r * math.cos(t)), np.full_like(zs, r * math.sin(t)), zs)))
    return out


# ------------------------------------------------------- planar criterion

def disconnects_disk(px, pz, pixels=81):
    """Whether the closed sampled set splits a disk centred in it into several pieces.

    The closure is rasterised one pixel thick.  A set that splits some disk
    is not negligible in the plane; a set that splits none is reported as a
    possible obstruction.
    """
    px = np.asarray(px, dtype=np.float64)
    pz = np.asarray(pz, dtype=np.float64)
    cx, cz = float(np.median(px)), float(np.median(pz))
    spread = max(float(np.ptp(px)), float(np.ptp(pz)))
    radius = spread / 4 if spread > 0 else 1.0
    half = pixels // 2
    scale = half / radius
    ix = np.rint((px - cx) * scale).astype(np.int64) + half
    iz = np.rint((pz - cz) * scale).astype(np.int64) + half
    inside = (ix >= 0) & (ix < pixels) & (iz >= 0) & (iz < pixels)
    blocked = np.zeros((pixels, pixels), dtype=bool)
    blocked[ix[inside], iz[inside]] = True
    blocked = ndimage.binary_dilation(blocked, iterations=1)
    yy, xx = np.mgrid[0:pixels, 0:pixels]
    disk = (xx - half) ** 2 + (yy - half) ** 2 <= half * half
    _, count = ndimage.label(disk & ~blocked)
    return count > 1


@dataclass
class StratumVerdict:
    stratum: str
    samples: int
    image_is_segment: bool
    obstruction: bool


@dataclass
class SampleReport:
    strata: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def verdict(self):
        if any(s.obstruction for s in self.strata):
            return "obstruction found"
        return "diffuse: no codimension-one obstruction found"

    def lines(self):
        out = [self.verdict]
        for s in self.strata:
            tag = "obstruction" if s.obstruction else "no obstruction"
            out.append(f"  {s.stratum}: {s.samples} samples, image splits a disk: {s.image_is_segment}, {tag}")
        return out


def judge_patch(name, x, y, z, field=None):
    fx, fz = (field or F_values)(x, y, z)
    splits = disconnects_disk(fx, fz)
    return StratumVerdict(name, int(np.size(x)), bool(splits), not splits)


def collapse_control(x, y, z):
    """A map sending every point to (0.3, 0.3); the criterion must flag it."""
    x = np.asarray(x, dtype=np.float64)
    return np.full_like(x, 0.3), np.full_like(x, 0.3)


def diffuse_sample_report(config=None):
    config = config or SchwarzConfig()
    rep = SampleReport()
    for name, sample in strata(config):
        rep.strata.append(judge_patch(name, *sample()))
    return rep


# ------------------------------------------------------ pathology witnesses

@dataclass(frozen=True)
class Witness:
    kind: str
    point: tuple
    value: tuple
    relative_margin: float


def _band_radius(lo, hi, positive, samples=2001):
    """Radius in (lo, hi) where g has the wanted sign with the largest |g|, or None.

    |g| decays with 1/r, so only the first few bands above 1/hi are searched.
    """
    lo = max(lo, 1e-6)
    if hi <= lo:
        return None
    ts = np.linspace(1.0 / hi, min(1.0 / lo, 1.0 / hi + 8.0), samples + 2)[1:-1]
    vals = f_values(ts)
    good = vals > 0 if positive else vals < 0
    if not good.any():
        return None
    score = np.where(good, np.abs(vals), -1.0)
    return float(1.0 / ts[int(np.argmax(score))])


def _witness_at(target, radius, kind, margin, tol):
    x0, y0, z0 = target
    r0 = math.hypot(x0, y0)
    phi = math.atan2(y0, x0) if r0 > 0 else math.pi / 4
    positive = kind == "type2"
    # half the radius radially leaves room to turn away from sin θ = 0
    r = _band_radius(r0 - radius / 2, r0 + radius / 2, positive)
    if r is None:
        return None
    best = None
    for d in np.linspace(-math.pi, math.pi, 721):
        th = phi + d
        v = (r * math.cos(th), r * math.sin(th), z0)
        if math.dist(v, target) >= radius:
            continue
        g = g_eval(r)
        if g == 0:
            continue
        fv = F_eval(*v)
        fm = F_eval(-v[0], -v[1], v[2])
        if positive:
            # F(w) = −F(−w) ≠ F(−w)
            ok = abs(fv[0] + fm[0]) <= tol * abs(g)
            rel = abs(fv[0] - fm[0]) / abs(g)
        else:
            # F(v) = F(−v) ≠ −F(−v)
            ok = abs(fv[0] - fm[0]) <= tol * abs(g)
            rel = abs(fv[0] + fm[0]) / abs(g)
        if ok and rel > margin and (best is None or rel > best.relative_margin):
            best = Witness(kind, v, fv, rel)
    return best


def find_witnesses(target, radius, config=None):
    """Type-1 and type-2 witnesses inside the ball; WitnessNotFound when either is missing."""
    config = config or SchwarzConfig()
    w1 = _witness_at(target, radius, "type1", config.margin, config.tol)
    w2 = _witness_at(target, radius, "type2", config.margin, config.tol)
    if w1 is None or w2 is None:
        missing = "type1" if w1 is None else "type2"
        raise WitnessNotFound(f"no {missing} witness within {radius} of {target}")
    return w1, w2


def targets(config):
    out = [("axis", (0.0, 0.0, z)) for z in config.z_values]
    for n in range(1, config.n_max + 1):
        r = cylinder_radius(n)
        for k in range(config.angles):
            a = 2 * math.pi * k / config.angles
            out.append((f"C{n}", (r * math.cos(a), r * math.sin(a), 0.0)))
    return out


def pathology_witness_search(config=None):
    """Witness pairs for every target at every radius, plus the pointwise orbit agreement."""
    config = config or SchwarzConfig()
    rep = SampleReport()
    for name, t in targets(config):
        for radius in config.radii:
            try:
                w1, w2 = find_witnesses(t, radius, config)
            except WitnessNotFound as exc:
                rep.failures.append((name, t, radius, str(exc)))
                continue
            rep.witnesses.append((name, t, radius, w1, w2))
    xs, ys, zs = grid(config.step)
    rep.orbit_residual = orbit_agreement_residual(xs, ys, zs)
    if rep.failures:
        name, t, radius, msg = rep.failures[0]
        raise WitnessNotFound(f"{name}: {msg}")
    return rep


def csv_rows(rep):
    """Rows for the witnesses at the smallest radius searched, target first."""
    rows = [CSV_COLUMNS]
    if not rep.witnesses:
        return rows
    smallest = min(w[2] for w in rep.witnesses)
    for name, t, radius, w1, w2 in rep.witnesses:
        if radius != smallest:
            continue
        ft = F_eval(*t)
        rows.append((name, *_fmt3(t), *_fmt2(ft), "target"))
        for w in (w1, w2):
            rows.append((name, *_fmt3(w.point), *_fmt2(w.value), w.kind))
    return rows


def _num(v):
    return f"{v + 0.0:.12g}"


def _fmt3(p):
    return tuple(_num(float(c)) for c in p)


def _fmt2(p):
    return tuple(_num(float(c)) for c in p)


# ---------------------------------------------------------------- bands

def sign_bands(lo=0.1, hi=0.7, samples=20001):
    """Maximal radius intervals in (lo, hi) minus the cylinders on which g keeps one sign.

    Returns (start, end, sign) triples; sign +1 means the group element relating
    F(v) and F(−v) is −1, sign −1 means it is the identity.
    """
    rs = np.linspace(lo, hi, samples)
    gs = g_values(rs)
    sign = np.sign(gs)
    out = []
    start = prev = None
    cur = 0
    for r, s in zip(rs, sign):
        if s == 0:
            if start is not None:
                out.append((float(start), float(prev), int(cur)))
                start = None
            continue
        if start is None or s != cur:
            if start is not None:
                out.append((float(start), float(prev), int(cur)))
            start, cur = r, s
        prev = r
    if start is not None:
        out.append((float(start), float(prev), int(cur)))
    return out
