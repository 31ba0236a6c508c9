"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from conductest import generators as gen
from conductest import kernels
from conductest.conductance import _adjacency_masks


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def jacobi_case(n, seed=0):
    g = gen.random_regular(3, n, seed) if n % 2 == 0 else gen.cycle(n)
    a = g.adjacency_matrix().astype(float)
    d = 1 / np.sqrt(g.degrees)
    return np.eye(n) - d[:, None] * a * d[None, :]


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = kernels.backends()
    print(f"backends available: {', '.join(sorted(backends))} (active: {kernels.BACKEND})")
    rows = []
    for n in (16, 32, 64):
        lap = jacobi_case(n)
        res = {name: best_of(lambda m=m: m.jacobi_eigh(lap), args.repeat) for name, m in backends.items()}
        rows.append((f"jacobi n={n}", res, lambda a, b: np.allclose(np.sort(a[0]), np.sort(b[0]), atol=1e-9)))
    for k in (8, 10, 12):
        g = gen.dumbbell(k)
        masks = _adjacency_masks(g)
        res = {name: best_of(lambda m=m: m.scan_min_conductance(masks, g.degrees), args.repeat) for name, m in backends.items()}
        rows.append((f"scan dumbbell({k}) n={2 * k}", res, lambda a, b: a == b))

    print(f"{'case':<26}{'python s':>12}{'cython s':>12}{'speedup':>10}  agree")
    for label, res, same in rows:
        py = res["python"][0]
        cy = res.get("cython", (float("nan"), None))[0]
        agree = same(res["python"][1], res["cython"][1]) if "cython" in res else "-"
        print(f"{label:<26}{py:>12.4f}{cy:>12.4f}{py / cy:>10.1f}  {agree}")


if __name__ == "__main__":
    main()
