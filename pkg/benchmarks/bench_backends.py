"""Head-to-head timing of the numba kernels against their numpy fallbacks.

Both flavours of every hot kernel stay importable regardless of which one the
package selected at import time (see latticeforms.backends), so this script
can time them in a single process.  Run it under the default backend to
compare compiled loops against vectorized numpy; under
LATTICEFORMS_BACKEND=numpy the "loop" column degrades to plain Python, which
is exactly what the fallback avoids.

Usage:
    python3 benchmarks/bench_backends.py [--d 5] [--lam 60] [--repeats 5]
"""

import argparse
import time

import numpy as np

from latticeforms import backends
from latticeforms._kernels import (
    _fill_ball_loop,
    _fill_ball_numpy,
    _fill_sphere_loop,
    _fill_sphere_numpy,
    _pair_dp_loop,
    _pair_dp_numpy,
    _two_constraint_count_loop,
    _two_constraint_count_numpy,
)
from latticeforms.lattice import ball_cardinality, enumerate_sphere, sphere_cardinality


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench(name, loop_fn, numpy_fn, check_equal, repeats):
    loop_fn()  # warm-up: triggers JIT compilation under numba
    numpy_fn()
    assert check_equal(), f"{name}: flavours disagree"
    t_loop = best_of(loop_fn, repeats)
    t_numpy = best_of(numpy_fn, repeats)
    ratio = t_numpy / t_loop if t_loop > 0 else float("inf")
    print(f"{name:<22} loop {t_loop * 1e3:9.3f} ms   "
          f"numpy {t_numpy * 1e3:9.3f} ms   numpy/loop {ratio:6.2f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--d", type=int, default=5, help="ambient dimension")
    parser.add_argument("--lam", type=int, default=60,
                        help="squared radius for the shell workloads")
    parser.add_argument("--repeats", type=int, default=5,
                        help="repetitions; the best time is reported")
    args = parser.parse_args()
    d, lam = args.d, args.lam

    print(f"active backend: {backends.BACKEND} "
          f"(numba available: {backends.HAVE_NUMBA})")
    print(f"workload: d={d} lambda={lam}, best of {args.repeats}\n")

    n_sphere = sphere_cardinality(d, lam)
    out_a = np.zeros((max(n_sphere, 1), d), np.int64)
    out_b = np.zeros((max(n_sphere, 1), d), np.int64)
    bench(
        f"fill_sphere ({n_sphere} pts)",
        lambda: _fill_sphere_loop(d, lam, out_a),
        lambda: _fill_sphere_numpy(d, lam, out_b),
        lambda: np.array_equal(out_a[:n_sphere], out_b[:n_sphere]),
        args.repeats,
    )

    n_ball = ball_cardinality(d, lam)
    ball_a = np.zeros((n_ball, d), np.int64)
    ball_b = np.zeros((n_ball, d), np.int64)
    bench(
        f"fill_ball ({n_ball} pts)",
        lambda: _fill_ball_loop(d, lam, ball_a),
        lambda: _fill_ball_numpy(d, lam, ball_b),
        lambda: np.array_equal(ball_a, ball_b),
        args.repeats,
    )

    zabs = np.abs(enumerate_sphere(d, lam).points[0])
    result = {}
    bench(
        f"pair_dp (lambda={lam})",
        lambda: result.__setitem__("loop", _pair_dp_loop(zabs, lam)),
        lambda: result.__setitem__("numpy", _pair_dp_numpy(zabs, lam)),
        lambda: result["loop"] == result["numpy"],
        args.repeats,
    )

    X = np.zeros((n_ball, d), np.int64)
    _fill_ball_numpy(d, lam, X)
    n2 = (X * X).sum(axis=1)
    shell = enumerate_sphere(d, lam).points
    u, v = shell[0], shell[-1]
    cu = cv = lam
    bench(
        f"two_constraint ({n_ball} rows)",
        lambda: result.__setitem__("loop", _two_constraint_count_loop(X, n2, u, cu, v, cv)),
        lambda: result.__setitem__("numpy", _two_constraint_count_numpy(X, n2, u, cu, v, cv)),
        lambda: result["loop"] == result["numpy"],
        args.repeats,
    )


if __name__ == "__main__":
    main()
