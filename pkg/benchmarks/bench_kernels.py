"""Time every hot kernel on both backends and check they agree.

    python benchmarks/bench_kernels.py            # default sizes
    python benchmarks/bench_kernels.py --scale 0.2 --repeat 3

The first numba call of each kernel includes compilation; it is timed
separately and excluded from the steady-state figures.
"""
import argparse
import time

import numpy as np

from amids import kernels
from amids.baselines.svm import rbf_kernel_matrix


def best_of(fn, case, repeat):
    """Best wall time of ``fn`` over fresh copies of ``case`` (in-place kernels mutate them)."""
    times = []
    for _ in range(repeat):
        args = copy_args(case)
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), (out, args)


def cases(scale, rng):
    n = max(1000, int(100_000 * scale))
    X = np.round(rng.normal(size=(n, 41)), 2)
    y = (X[:, 0] + 0.5 * rng.normal(size=n) > 0).astype(np.int64)
    XT = np.ascontiguousarray(X.T)
    idx = np.sort(rng.choice(n, size=n, replace=True)).astype(np.int64)
    order = rng.permutation(41).astype(np.int64)
    yield "best_split", (XT, y, idx, order, 7)

    depth = 12
    n_nodes = 2 ** (depth + 1) - 1
    internal = np.arange(n_nodes) < 2 ** depth - 1
    feature = np.where(internal, rng.integers(0, 41, n_nodes), -1).astype(np.int64)
    threshold = rng.normal(size=n_nodes)
    left = np.where(internal, 2 * np.arange(n_nodes) + 1, -1).astype(np.int64)
    right = np.where(internal, 2 * np.arange(n_nodes) + 2, -1).astype(np.int64)
    yield "tree_apply", (np.ascontiguousarray(X), feature, threshold, left, right)

    m = max(256, int(20_000 * scale))
    yield "dense_affine", (np.ascontiguousarray(X[:m]), rng.normal(size=(41, 300)), rng.normal(size=300))

    k = max(200, int(2000 * scale))
    Xs = X[:k]
    K = rbf_kernel_matrix(Xs, Xs, 1.0 / 41)
    yield "smo_solve", (K, np.where(y[:k] == 1, 1.0, -1.0), 1.0, 1e-3, 10, 0, 10_000)

    size = 41 * 300 + 300 * 300 + 300 * 2
    yield "adam_update", (rng.normal(size=size), rng.normal(size=size), np.zeros(size), np.zeros(size),
                          1e-3, 0.9, 0.999, 0.1, 0.001, 1e-8)


def copy_args(args):
    return tuple(a.copy() if isinstance(a, np.ndarray) else a for a in args)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.allclose(a, b, rtol=1e-12, atol=1e-12)
    if isinstance(a, float):
        return abs(a - b) <= 1e-12 * max(1.0, abs(a))
    return a == b


def main():
    parser = argparse.ArgumentParser(description="numba vs numpy kernel timings")
    parser.add_argument("--scale", type=float, default=1.0, help="problem size multiplier (default 1.0)")
    parser.add_argument("--repeat", type=int, default=5, help="timed repetitions; the best is reported (default 5)")
    parser.add_argument("--seed", type=int, default=0, help="data seed (default 0)")
    args = parser.parse_args()

    impls = kernels.implementations()
    if "numba" not in impls:
        print("numba is not installed; only the numpy backend can be timed")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<14}{'numpy s':>12}{'numba s':>12}{'speedup':>10}{'compile s':>11}  agree")
    for name, case in cases(args.scale, rng):
        results, times = {}, {}
        compile_s = float("nan")
        for backend, mod in impls.items():
            fn = getattr(mod, name)
            if backend == "numba":
                t0 = time.perf_counter()
                fn(*copy_args(case))
                compile_s = time.perf_counter() - t0
            times[backend], results[backend] = best_of(fn, case, args.repeat)
        t_np = times["numpy"]
        t_nb = times.get("numba", float("nan"))
        agree = "-" if "numba" not in results else ("yes" if same(results["numpy"], results["numba"]) else "NO")
        print(f"{name:<14}{t_np:>12.5f}{t_nb:>12.5f}{t_np / t_nb:>10.1f}{compile_s:>11.2f}  {agree}")


if __name__ == "__main__":
    main()
