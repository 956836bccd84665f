"""Time the numpy kernels against their numba twins on representative inputs.

Run:  python3 benchmarks/bench_kernels.py [--tensors N] [--points N] [--repeats R]

The first numba call compiles; kernels are warmed up before timing.  Both
backends are checked for agreement on every workload before any numbers are
reported.
"""

import argparse
from timeit import timeit

import numpy as np

from triviewcal import _kernels_np as knp
from triviewcal import _kernels_numba as knb
from triviewcal.geometry import (
    CameraPose,
    calibrated_trifocal_from_poses,
    normalize_tensor,
    relative_pose,
)
from triviewcal.synthetic import (
    DEFAULT_K_TRUE,
    SceneConfig,
    generate_scene,
    project_triplet,
)


def make_workloads(n_tensors: int, n_points: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    pts, poses, K = generate_scene(SceneConfig(num_points=n_points), rng)
    p2 = relative_pose(poses[0], poses[1])
    p3 = relative_pose(poses[0], poses[2])
    T0 = normalize_tensor(calibrated_trifocal_from_poses(p2, p3))
    tensors = [
        normalize_tensor(T0 + 1e-3 * rng.standard_normal((3, 3, 3))) for _ in range(n_tensors)
    ]
    triples = project_triplet(pts, poses, K)
    ones = np.ones((len(triples), 1))
    x1 = np.hstack([triples[:, 0:2], ones])
    x2 = np.hstack([triples[:, 2:4], ones])
    x3 = triples[:, 4:6]
    params = K.as_array() * (1.0 + 0.02 * rng.standard_normal(4))
    return tensors, params, x1, x2, x3, T0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tensors", type=int, default=64, help="tensor stack size")
    ap.add_argument("--points", type=int, default=2000, help="correspondence count")
    ap.add_argument("--repeats", type=int, default=200, help="timed calls per kernel")
    args = ap.parse_args()

    tensors, params, x1, x2, x3, T0 = make_workloads(args.tensors, args.points)

    # kernels are per-tensor; the calibration layer loops over candidates,
    # so the loop itself is part of the measured workload
    cases = [
        ("quartic_residuals", lambda k: [k.quartic_residuals(T) for T in tensors]),
        ("intrinsics_residuals", lambda k: [k.intrinsics_residuals(params, T) for T in tensors]),
        (
            "intrinsics_residuals_jac",
            lambda k: [k.intrinsics_residuals_jac(params, T) for T in tensors],
        ),
        (
            "trifocal_design_rows",
            lambda k: k.trifocal_design_rows(x1, x2, np.hstack([x3, np.ones((len(x3), 1))])),
        ),
        ("transfer_errors", lambda k: k.transfer_errors(T0, x1, x2, x3)),
    ]

    # warm-up (compiles the numba kernels) + agreement check
    for name, call in cases:
        a = call(knp)
        b = call(knb)
        if not isinstance(a, list):
            a, b = [a], [b]
        for u, v in zip(a, b):
            if isinstance(u, tuple):
                for s, t in zip(u, v):
                    np.testing.assert_allclose(s, t, rtol=1e-10, atol=1e-12)
            else:
                np.testing.assert_allclose(u, v, rtol=1e-10, atol=1e-12)
    print(f"agreement ok ({args.tensors} tensors, {args.points} points)\n")

    header = f"{'kernel':<26} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in cases:
        t_np = timeit(lambda: call(knp), number=args.repeats) / args.repeats
        t_nb = timeit(lambda: call(knb), number=args.repeats) / args.repeats
        print(f"{name:<26} {t_np * 1e3:>12.3f} {t_nb * 1e3:>12.3f} {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
