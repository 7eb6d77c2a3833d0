import os
import subprocess
import sys

import numpy as np
import pytest

from gentop import _kernels
from gentop.fintop import continuous_rows, probes_upto, random_space
from gentop.fixtures import P9, P25
from gentop.gencat import codomain_tests
from gentop.schwarz import grid

import oracles

NB = _kernels.numba_kernels
NP = _kernels.numpy_kernels
needs_numba = pytest.mark.skipif(NB is None, reason="numba unavailable or disabled")


def test_numpy_connected_matches_oracle():
    rng = np.random.default_rng(3)
    for n in range(1, 7):
        X = random_space(n, rng)
        masks = np.arange(1 << n, dtype=np.uint64)
        got = NP.connected(masks, X.np_adjacency)
        for m in range(1 << n):
            assert bool(got[m]) == oracles.connected(X, X.unmask(m)), (X, m)


@needs_numba
def test_connected_backends_agree():
    rng = np.random.default_rng(0)
    masks = rng.integers(0, 1 << 25, size=20_000, dtype=np.uint64)
    assert np.array_equal(NB.connected(masks, P25.np_adjacency), NP.connected(masks, P25.np_adjacency))


@needs_numba
def test_map_kernels_backends_agree():
    for dom in probes_upto(3):
        rows = continuous_rows(dom, P9)
        for u, top in codomain_tests(P9):
            a = NB.preimage(rows, np.uint64(u))
            b = NP.preimage(rows, np.uint64(u))
            assert np.array_equal(a, b)
            c = NP.preimage(rows, np.uint64(top))
            assert np.array_equal(NB.negligible_local(a, c, dom.np_masks, dom.np_adjacency),
                                  NP.negligible_local(a, c, dom.np_masks, dom.np_adjacency))
    dom = probes_upto(2)[-1]
    rows = np.array(np.meshgrid(*[np.arange(len(P9))] * len(dom), indexing="ij")).reshape(len(dom), -1).T
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    px, py = [], []
    for x in range(len(dom)):
        for y in dom.unmask(dom.masks[x]):
            px.append(x)
            py.append(dom.index[y])
    px, py = np.array(px, dtype=np.int64), np.array(py, dtype=np.int64)
    assert np.array_equal(NB.continuous(rows, px, py, P9.np_masks), NP.continuous(rows, px, py, P9.np_masks))


@needs_numba
def test_zdense_backends_agree():
    rng = np.random.default_rng(1)
    X = random_space(8, rng)
    umasks = np.arange(1 << 8, dtype=np.uint64)
    copens = np.array([m for m in X.open_masks() if m], dtype=np.uint64)
    assert np.array_equal(NB.zdense(umasks, copens, X.np_adjacency), NP.zdense(umasks, copens, X.np_adjacency))


@needs_numba
def test_float_kernels_backends_agree():
    xs, ys, zs = grid(0.02)
    a, b = NB.schwarz(xs, ys, zs), NP.schwarz(xs, ys, zs)
    for u, v in zip(a, b):
        assert np.array_equal(np.sign(u), np.sign(v))
        assert np.allclose(u, v, rtol=1e-12, atol=0)
    rs = np.linspace(0, 1.5, 30_001)
    assert np.allclose(NB.g(rs), NP.g(rs), rtol=1e-12, atol=0)


SNIPPET = """
from gentop import _kernels
from gentop.fixtures import P9, swap9
from gentop.grpquot import certify_pseudoetale
from gentop.negligible import negligible_elements
print(_kernels.BACKEND)
print(len(negligible_elements(P9)))
print("\\n".join(certify_pseudoetale(swap9()).lines()))
"""


def _run(disable):
    env = dict(os.environ)
    env.pop(_kernels.DISABLE_ENV, None)
    if disable:
        env[_kernels.DISABLE_ENV] = "1"
    out = subprocess.run([sys.executable, "-c", SNIPPET], env=env, capture_output=True, text=True, check=True)
    return out.stdout.split("\n", 1)


def test_disable_flag_selects_numpy_with_same_output():
    backend_off, body_off = _run(True)
    assert backend_off == "numpy"
    backend_on, body_on = _run(False)
    assert body_on == body_off
    if NB is not None:
        assert backend_on == "numba"
