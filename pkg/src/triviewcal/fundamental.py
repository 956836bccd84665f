"""Fundamental-matrix baseline: eight-point estimation and essential-matrix
singular-value self-calibration.

For the true K, the essential matrix E = K^T F K has two equal nonzero
singular values; the baseline recovers K by minimizing the squared relative
gap (sigma1 - sigma2) / sigma2 over all supplied view pairs.
"""

import numpy as np

from .errors import DegenerateEssential, IllConditioned, TooFewPairs
from .estimation import hartley_transform, _lift
from .geometry import Intrinsics
from .solver import solve_damped_lsq
from .calibration import CalibrationConfig, CalibrationReport, msac_score

MIN_PAIRS = 8


def estimate_fundamental(pairs: np.ndarray, min_conditioning: float = 10.0) -> np.ndarray:
    """Normalized eight-point fundamental matrix from (N, 4) pixel pairs.

    Convention: x2_h^T F x1_h = 0 with x1 = pairs[:, 0:2], x2 = pairs[:, 2:4].
    Rank 2 is enforced by zeroing the smallest singular value; output has unit
    Frobenius norm with the largest-|entry| positive.
    """
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 4:
        raise ValueError(f"pairs must be (N, 4), got {pairs.shape}")
    if pairs.shape[0] < MIN_PAIRS:
        raise TooFewPairs(f"{pairs.shape[0]} pairs < minimum {MIN_PAIRS}")

    N1 = hartley_transform(pairs[:, 0:2])
    N2 = hartley_transform(pairs[:, 2:4])
    x1 = _lift(pairs[:, 0:2]) @ N1.T
    x2 = _lift(pairs[:, 2:4]) @ N2.T
    x1 /= x1[:, 2:3]
    x2 /= x2[:, 2:3]

    # rows are the Kronecker coefficients of x2^T F x1
    design = np.column_stack(
        [
            x2[:, 0] * x1[:, 0], x2[:, 0] * x1[:, 1], x2[:, 0],
            x2[:, 1] * x1[:, 0], x2[:, 1] * x1[:, 1], x2[:, 1],
            x1[:, 0], x1[:, 1], np.ones(len(x1)),
        ]
    )
    _, sv, Vh = np.linalg.svd(design, full_matrices=False)
    ratio = float(sv[-2] / sv[-1]) if sv[-1] > 0 else float("inf")
    if ratio < min_conditioning:
        raise IllConditioned(f"eight-point ratio sigma8/sigma9 = {ratio:.3g} < {min_conditioning}")
    Fn = Vh[-1].reshape(3, 3)

    U, s, Vt = np.linalg.svd(Fn)
    Fn = (U * np.array([s[0], s[1], 0.0])) @ Vt
    F = N2.T @ Fn @ N1
    F /= np.linalg.norm(F)
    flat = F.reshape(-1)
    if flat[np.argmax(np.abs(flat))] < 0:
        F = -F
    return F


def pairs_from_triples(triples: np.ndarray) -> list[np.ndarray]:
    """The three unordered view-pair correspondence sets (1-2, 1-3, 2-3)."""
    triples = np.asarray(triples, dtype=float)
    return [
        triples[:, [0, 1, 2, 3]],
        triples[:, [0, 1, 4, 5]],
        triples[:, [2, 3, 4, 5]],
    ]


def essential_residuals(K: Intrinsics, Fs) -> np.ndarray:
    """Relative singular-value gaps (sigma1 - sigma2)/sigma2 of E = K^T F K."""
    Km = K.matrix()
    out = np.empty(len(Fs))
    for i, F in enumerate(Fs):
        E = Km.T @ np.asarray(F, dtype=float) @ Km
        sv = np.linalg.svd(E, compute_uv=False)
        if sv[1] < 1e-12:
            raise DegenerateEssential(f"second singular value {sv[1]:.3e} ~ 0")
        out[i] = (sv[0] - sv[1]) / sv[1]
    return out


def essential_singular_cost(K: Intrinsics, Fs) -> float:
    """Sum of squared singular-value-gap residuals over all F matrices."""
    if len(Fs) == 0:
        raise ValueError("need at least one fundamental matrix")
    r = essential_residuals(K, Fs)
    return float(r @ r)


def calibrate_fundamental(Fs, K0: Intrinsics, cfg: CalibrationConfig | None = None) -> CalibrationReport:
    """Recover K by minimizing the essential singular-value cost from K0.

    Needs >= 2 fundamental matrices; a single pair under-constrains the four
    intrinsics.  Same solver contract as the trifocal direct variant, with a
    central-difference Jacobian.
    """
    cfg = cfg or CalibrationConfig()
    Fs = [np.asarray(F, dtype=float) for F in Fs]
    if len(Fs) < 2:
        raise TooFewPairs("calibration needs at least 2 fundamental matrices")

    p0 = K0.as_array()
    lb, ub = cfg.bounds[0] * p0, cfg.bounds[1] * p0

    def residual_fn(p):
        return essential_residuals(Intrinsics.from_array(p), Fs)

    result = solve_damped_lsq(
        fun=residual_fn,
        x0=p0,
        lb=lb,
        ub=ub,
        gtol=cfg.gtol,
        xtol=cfg.xtol,
        max_iter=cfg.max_iter,
    )
    K_est = Intrinsics.from_array(result.x)
    r = essential_residuals(K_est, Fs)
    return CalibrationReport(
        K_est=K_est,
        cost=result.cost,
        cost_trajectory=result.cost_trajectory,
        tensor_residuals=np.abs(r),
        msac_score=msac_score(np.abs(r), cfg.tau),
        iterations=result.iterations,
        converged=result.converged,
        message=result.message,
        method="fundamental",
    )
