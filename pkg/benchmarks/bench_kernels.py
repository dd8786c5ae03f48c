"""Time the numba and numpy implementations of each kernel side by side.

    python benchmarks/bench_kernels.py [--repeat 5] [--size 1500]
"""

import argparse
import timeit

import numpy as np

from toricgh import kernels


def cases(n: int, rng: np.random.Generator):
    normals = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], float)
    offsets = np.array([0, 0, -2, -1], float)
    X = rng.uniform([0.01, 0.01], [1.99, 0.99], size=(n * 20, 2))
    dX, dY = rng.normal(size=X.shape), rng.normal(size=X.shape)
    p = rng.uniform(size=(n, 2))
    D = np.sqrt(((p[:, None] - p[None]) ** 2).sum(-1))
    assign = rng.permutation(n)
    I, J = np.triu_indices(n, 1)
    m = max(n // 5, 10)
    C = D[:m, : m + 7]
    la, lb = np.full(m, -np.log(m)), np.full(m + 7, -np.log(m + 7))
    image = rng.choice(n, n // 10, replace=False)
    nb = n - n % 8
    return {
        "hessians": (X, normals, offsets),
        "segment_lengths": (X, dX, dY, normals, offsets),
        "sinkhorn_log": lambda: (C, la, lb, 0.05, np.zeros(m), np.zeros(m + 7), 200, 0.0),
        "pair_distortion": (D, D, assign, I, J),
        "all_pairs_distortion": (D, D, assign),
        "coverage_radius": (D, image),
        "orbit_diameters": (D[:nb, :nb], nb // 8, 8),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=1500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'kernel':22s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, a in cases(args.size, np.random.default_rng(args.seed)).items():
        make = a if callable(a) else (lambda a=a: a)
        times = []
        for fn in kernels.implementations(name):
            fn(*make())  # compile / warm up
            times.append(min(timeit.repeat(lambda: fn(*make()), number=1, repeat=args.repeat)) * 1e3)
        print(f"{name:22s} {times[0]:10.2f} {times[1]:10.2f} {times[1] / times[0]:8.1f}x")


if __name__ == "__main__":
    main()
