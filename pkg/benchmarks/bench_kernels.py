"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--ell 23] [--repeat 5]

Both backends run on identical inputs; outputs are compared before timing.
"""

import argparse
import statistics
import time

import numpy as np

from esperantist import _kernels
from esperantist.algebra import catalog_generators


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def cases(ell):
    gens = catalog_generators("sl2-elementary", ell=ell).stack()
    eye = np.eye(2, dtype=np.int64)
    _, nbr, _ = _kernels.backends()["python"].orbit_bfs(gens, None, eye, ell, False, 10**8)
    v = np.sin(np.arange(nbr.shape[0]) * 0.37)
    perm = np.random.default_rng(0).permutation(nbr.shape[0])
    return {
        "orbit_bfs (group)": lambda k: k.orbit_bfs(gens, None, eye, ell, False, 10**8),
        "laplacian_apply x50": lambda k: [k.laplacian_apply(nbr, v) for _ in range(50)],
        "bfs_distances": lambda k: k.bfs_distances(nbr, 0),
        "components": lambda k: k.components(nbr),
        "count_cycles": lambda k: k.count_cycles(perm),
    }, nbr.shape[0]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ell", type=int, default=23)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = _kernels.backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the python backend is available")
    table, n = cases(args.ell)
    print(f"SL2(F_{args.ell}) Cayley graph, n={n}, repeat={args.repeat}")
    print(f"{'kernel':<22}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for label, fn in table.items():
        outs = {name: fn(k) for name, k in backends.items()}
        if len(outs) == 2:
            a, b = outs["compiled"], outs["python"]
            same = (all(np.array_equal(x, y) for x, y in zip(a, b)) if isinstance(a, (tuple, list))
                    else np.array_equal(a, b))
            if not same:
                raise SystemExit(f"backends disagree on {label}")
        best = {name: _best(lambda k=k: fn(k), args.repeat)[0] for name, k in backends.items()}
        row = f"{label:<22}" + "".join(f"{best[name] * 1e3:>12.2f}ms" for name in backends)
        if len(best) == 2:
            row += f"{best['python'] / best['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
