"""Benchmark the numba-compiled kernels against the pure-numpy fallbacks.

Run as:  python3 benchmarks/bench_kernels.py [--nodes 2563] [--measurements 32]

The same kernels are selected at import time by the STEERLP_DISABLE_NUMBA
environment flag; this script calls both variants explicitly so one run
shows the speedup side by side.
"""

import argparse
import time

import numpy as np

from steerlp import _kernels as K


def make_inputs(rng, n_meas, n_nodes, n_bob):
    q = rng.uniform(size=n_nodes)
    resp = rng.uniform(size=(n_meas, 2, n_nodes))
    resp /= resp.sum(axis=1, keepdims=True)
    nodes = rng.normal(size=(n_nodes, 3))
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    nodes[-1] = 0.0
    bob = rng.normal(size=(n_bob, 3))
    bob /= np.linalg.norm(bob, axis=1)[:, None]
    sv = 0.4 * rng.normal(size=(n_meas, 3))
    return q, resp, nodes, bob, sv


def timeit(fn, args, repeats):
    fn(*args)  # warm-up (and JIT compile for the numba variants)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=2563)
    ap.add_argument("--measurements", type=int, default=32)
    ap.add_argument("--bob-axes", type=int, default=16)
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    q, resp, nodes, bob, sv = make_inputs(
        rng, args.measurements, args.nodes, args.bob_axes
    )
    dirs = nodes[: min(args.nodes - 1, 256)]

    cases = [
        ("moment_sums", K.moment_sums_numpy, K.moment_sums_numba, (q, resp, nodes)),
        (
            "joint_table",
            K.joint_table_numpy,
            K.joint_table_numba,
            (q, resp, nodes, bob),
        ),
        (
            "hemisphere_response",
            K.hemisphere_response_numpy,
            K.hemisphere_response_numba,
            (nodes, sv),
        ),
        (
            "max_nearest_gap",
            K.max_nearest_gap_numpy,
            K.max_nearest_gap_numba,
            (dirs,),
        ),
    ]

    print(
        f"nodes={args.nodes} measurements={args.measurements} "
        f"bob_axes={args.bob_axes} repeats={args.repeats} "
        f"numba_available={K.HAVE_NUMBA}"
    )
    print(f"{'kernel':<20} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, f_np, f_nb, fargs in cases:
        t_np = timeit(f_np, fargs, args.repeats)
        if K.HAVE_NUMBA:
            t_nb = timeit(f_nb, fargs, args.repeats)
            print(
                f"{name:<20} {t_np * 1e3:>10.3f}ms {t_nb * 1e3:>10.3f}ms "
                f"{t_np / t_nb:>8.2f}x"
            )
        else:
            print(f"{name:<20} {t_np * 1e3:>10.3f}ms {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
