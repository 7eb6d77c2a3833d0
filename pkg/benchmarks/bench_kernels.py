"""Time the numba kernels against the numpy fallback on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]

Outputs are compared before timing; a mismatch aborts the run. Integer and
boolean results must match exactly, float results to 1e-12 relative with
identical signs (numba may reorder float operations).
"""
import argparse
import time

import numpy as np

from gentop import _kernels, fixtures
from gentop.fintop import continuous_rows, probes_upto
from gentop.gencat import codomain_tests
from gentop.schwarz import grid


def best_of(fn, repeat):
    fn()  # warm-up, includes compilation
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def workloads():
    rng = np.random.default_rng(0)
    P25 = fixtures.P25
    masks = rng.integers(0, 1 << 25, size=200_000, dtype=np.uint64)
    yield "connected (P25, 200k subsets)", lambda k: k.connected(masks, P25.np_adjacency)

    P9 = fixtures.P9
    dom = max((Y for Y in probes_upto(3) if len(Y) == 3), key=lambda Y: sum(Y.masks))
    rows = continuous_rows(dom, P9)
    rows = np.tile(rows, (max(1, 200_000 // max(1, rows.shape[0])), 1))
    tests = codomain_tests(P9)

    def neg(k):
        out = np.ones(rows.shape[0], dtype=bool)
        for u, top in tests:
            pu = k.preimage(rows, np.uint64(u))
            pi = k.preimage(rows, np.uint64(top))
            out &= k.negligible_local(pu, pi, dom.np_masks, dom.np_adjacency)
        return out
    yield f"diffuse flags ({rows.shape[0]} maps into P9)", neg

    xs, ys, zs = grid(0.01)
    yield f"schwarz field ({xs.size} grid points)", lambda k: k.schwarz(xs, ys, zs)


def same(a, b):
    if a.dtype.kind != "f":
        return np.array_equal(a, b)
    return np.array_equal(np.sign(a), np.sign(b)) and np.allclose(a, b, rtol=1e-12, atol=0)


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    nb = _kernels.numba_kernels
    npk = _kernels.numpy_kernels
    if nb is None:
        print(f"numba disabled ({_kernels.DISABLE_ENV} set); timing numpy only")
    print(f"{'workload':48s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, fn in workloads():
        ref = fn(npk)
        t_np = best_of(lambda: fn(npk), args.repeat)
        if nb is None:
            print(f"{name:48s} {t_np:10.4f} {'-':>10s} {'-':>8s}")
            continue
        got = fn(nb)
        for a, b in zip(ref if isinstance(ref, tuple) else (ref,), got if isinstance(got, tuple) else (got,)):
            if not same(a, b):
                raise SystemExit(f"{name}: backends disagree")
        t_nb = best_of(lambda: fn(nb), args.repeat)
        print(f"{name:48s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
