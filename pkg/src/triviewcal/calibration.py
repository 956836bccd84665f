"""Intrinsics recovery from estimated trifocal tensors.

Three variants:
  * direct   - minimize the stacked quartic residuals over all tensors at once.
  * msac     - calibrate per tensor, keep the candidate with the best
               truncated-residual (MSAC) score.
  * msac-opt - refine the MSAC winner by maximizing the score itself.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .backend import kernels
from .errors import AllCandidatesFailed, CalibrationError, EmptyResiduals
from .estimation import transfer_errors
from .geometry import Intrinsics
from .solver import SolveResult, solve_damped_lsq


@dataclass
class CalibrationConfig:
    """Solver and scoring knobs shared by all calibration variants.

    tau is the MSAC inlier threshold on per-tensor constraint residual norms
    (unit-norm tensors, so unitless); transfer_tau is its pixel-space analog
    used when msac_residual = "transfer".  Bounds are multiplicative w.r.t.
    the initial guess.
    """

    tau: float = 1e-2
    gtol: float = 1e-10
    xtol: float = 1e-12
    max_iter: int = 200
    bounds: tuple[float, float] = (0.5, 2.0)
    msac_residual: str = "constraint"
    transfer_tau: float = 2.0

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        lo, hi = self.bounds
        if not lo < 1.0 < hi:
            raise ValueError(f"bounds {self.bounds} must enclose the initial guess")
        if self.msac_residual not in ("constraint", "transfer"):
            raise ValueError(f"unknown msac_residual {self.msac_residual!r}")


@dataclass
class CalibrationReport:
    """Result of one calibration run."""

    K_est: Intrinsics
    cost: float
    cost_trajectory: list[float]
    tensor_residuals: np.ndarray
    msac_score: float
    iterations: int
    converged: bool
    method: str
    message: str = ""
    selected_index: int | None = None
    candidate_scores: list[float] = field(default_factory=list)


def _as_tensor_stack(tensors) -> list[np.ndarray]:
    stack = [np.ascontiguousarray(T, dtype=float) for T in tensors]
    if not stack:
        raise ValueError("need at least one tensor")
    for T in stack:
        if T.shape != (3, 3, 3):
            raise ValueError(f"tensor shape {T.shape} is not (3, 3, 3)")
    return stack


def _stacked_residuals(params: np.ndarray, tensors: list[np.ndarray]) -> np.ndarray:
    return np.concatenate([kernels.intrinsics_residuals(params, T) for T in tensors])


def _stacked_jacobian(params: np.ndarray, tensors: list[np.ndarray]):
    parts = [kernels.intrinsics_residuals_jac(params, T) for T in tensors]
    res = np.concatenate([p[0] for p in parts])
    jac = np.vstack([p[1] for p in parts])
    return res, jac


def constraint_cost(K: Intrinsics, tensors) -> tuple[float, np.ndarray]:
    """Total squared constraint violation at K, plus the per-tensor 15-vectors."""
    stack = _as_tensor_stack(tensors)
    params = K.as_array()
    rows = np.array([kernels.intrinsics_residuals(params, T) for T in stack])
    return float(np.sum(rows * rows)), rows


def constraint_jacobian(K: Intrinsics, tensors) -> np.ndarray:
    """Stacked analytic Jacobian of all constraint residuals w.r.t. (fx, fy, cx, cy)."""
    stack = _as_tensor_stack(tensors)
    _, jac = _stacked_jacobian(K.as_array(), stack)
    return jac


def tensor_residual_norms(K: Intrinsics, tensors) -> np.ndarray:
    """Per-tensor L2 norm of the 15 constraint residuals at K."""
    _, rows = constraint_cost(K, tensors)
    return np.sqrt(np.sum(rows * rows, axis=1))


def msac_score(residuals, tau: float) -> float:
    """Truncated-residual score 1 - mean(min(r_i / tau, 1)); 1 is a perfect fit."""
    r = np.asarray(residuals, dtype=float)
    if r.size == 0:
        raise EmptyResiduals("msac_score needs at least one residual")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if np.any(~(r >= 0)):  # also catches NaN
        raise ValueError("residuals must be nonnegative")
    return float(1.0 - np.mean(np.minimum(r / tau, 1.0)))


def _solve_bounds(K0: Intrinsics, cfg: CalibrationConfig):
    p0 = K0.as_array()
    return p0, cfg.bounds[0] * p0, cfg.bounds[1] * p0


def _run_direct(stack: list[np.ndarray], K0: Intrinsics, cfg: CalibrationConfig) -> SolveResult:
    p0, lb, ub = _solve_bounds(K0, cfg)
    return solve_damped_lsq(
        fun=lambda p: _stacked_residuals(p, stack),
        x0=p0,
        lb=lb,
        ub=ub,
        jac=lambda p: _stacked_jacobian(p, stack),
        gtol=cfg.gtol,
        xtol=cfg.xtol,
        max_iter=cfg.max_iter,
    )


def calibrate_direct(tensors, K0: Intrinsics, cfg: CalibrationConfig | None = None) -> CalibrationReport:
    """Minimize the joint constraint cost over all tensors starting from K0."""
    cfg = cfg or CalibrationConfig()
    stack = _as_tensor_stack(tensors)
    result = _run_direct(stack, K0, cfg)
    K_est = Intrinsics.from_array(result.x)
    r = tensor_residual_norms(K_est, stack)
    return CalibrationReport(
        K_est=K_est,
        cost=result.cost,
        cost_trajectory=result.cost_trajectory,
        tensor_residuals=r,
        msac_score=_score_safe(r, cfg.tau),
        iterations=result.iterations,
        converged=result.converged,
        message=result.message,
        method="direct",
    )


def _candidate_residuals(
    K: Intrinsics,
    stack: list[np.ndarray],
    tensor_index: int,
    cfg: CalibrationConfig,
    triples: np.ndarray | None,
) -> tuple[np.ndarray, float]:
    """Residual vector scored for one candidate, and the matching threshold."""
    if cfg.msac_residual == "transfer":
        if triples is None:
            raise ValueError("msac_residual='transfer' needs the point triples")
        return transfer_errors(stack[tensor_index], triples), cfg.transfer_tau
    return tensor_residual_norms(K, stack), cfg.tau


def _score_safe(residuals: np.ndarray, tau: float) -> float:
    """MSAC score with undefined (NaN) residuals counted as full outliers."""
    r = np.asarray(residuals, dtype=float)
    return msac_score(np.where(np.isnan(r), np.inf, r), tau)


def calibrate_msac(
    tensors,
    K0: Intrinsics,
    cfg: CalibrationConfig | None = None,
    triples: np.ndarray | None = None,
) -> CalibrationReport:
    """Per-tensor calibration followed by MSAC model selection.

    Every tensor is calibrated on its own; each candidate K is scored by the
    truncated residuals of ALL tensors (or of all pooled point triples when
    cfg.msac_residual = "transfer").  Tensors whose residuals are undefined
    (degenerate) count as full outliers in every candidate's score.  Ties
    break toward lower total cost, then lower tensor index.  Candidates that
    raise are skipped.
    """
    cfg = cfg or CalibrationConfig()
    stack = _as_tensor_stack(tensors)
    if len(stack) < 2:
        raise ValueError("msac selection needs at least 2 tensors")

    best = None  # (score, cost, index, result, residuals)
    scores: list[float] = []
    for idx in range(len(stack)):
        try:
            result = _run_direct([stack[idx]], K0, cfg)
            K_t = Intrinsics.from_array(result.x)
            scored, tau = _candidate_residuals(K_t, stack, idx, cfg, triples)
            score = _score_safe(scored, tau)
            norms = tensor_residual_norms(K_t, stack)
            fin = np.isfinite(norms)
            total_cost = float(np.sum(norms[fin] ** 2)) if fin.any() else float("inf")
        except (CalibrationError, np.linalg.LinAlgError):
            scores.append(float("nan"))
            continue
        scores.append(score)
        if (
            best is None
            or score > best[0]
            or (score == best[0] and total_cost < best[1])
        ):
            best = (score, total_cost, idx, result, scored)

    if best is None:
        raise AllCandidatesFailed("every per-tensor calibration failed")
    score, total_cost, idx, result, scored = best
    K_est = Intrinsics.from_array(result.x)
    return CalibrationReport(
        K_est=K_est,
        cost=result.cost,
        cost_trajectory=result.cost_trajectory,
        tensor_residuals=tensor_residual_norms(K_est, stack),
        msac_score=score,
        iterations=result.iterations,
        converged=result.converged,
        message=result.message,
        method="msac",
        selected_index=idx,
        candidate_scores=scores,
    )


def calibrate_msac_opt(
    tensors,
    K0: Intrinsics,
    cfg: CalibrationConfig | None = None,
    triples: np.ndarray | None = None,
) -> CalibrationReport:
    """MSAC selection, then direct refinement of the score itself.

    The winner's K seeds a derivative-free (Nelder-Mead) maximization of the
    constraint-residual MSAC score over the bounded box; the refined K is kept
    only if its score is at least the initialization's, so the final score
    never decreases.
    """
    cfg = cfg or CalibrationConfig()
    stack = _as_tensor_stack(tensors)
    init = calibrate_msac(stack, K0, cfg, triples)

    p0, lb, ub = _solve_bounds(K0, cfg)
    p_init = np.clip(init.K_est.as_array(), lb, ub)

    def objective(p):
        p = np.clip(p, lb, ub)
        r = tensor_residual_norms(Intrinsics.from_array(p), stack)
        return 1.0 - _score_safe(r, cfg.tau)

    traj = [objective(p_init)]
    opt = minimize(
        objective,
        p_init,
        method="Nelder-Mead",
        callback=lambda xk: traj.append(objective(xk)),
        options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 2000},
    )
    p_ref = np.clip(opt.x, lb, ub)
    K_ref = Intrinsics.from_array(p_ref)
    r_ref = tensor_residual_norms(K_ref, stack)
    score_ref = _score_safe(r_ref, cfg.tau)

    if score_ref < init.msac_score:
        K_ref = init.K_est
        r_ref = init.tensor_residuals
        score_ref = init.msac_score
        traj = [1.0 - init.msac_score]
    traj.append(1.0 - score_ref)
    cost_ref, _ = constraint_cost(K_ref, stack)
    return CalibrationReport(
        K_est=K_ref,
        cost=cost_ref,
        cost_trajectory=traj,
        tensor_residuals=r_ref,
        msac_score=score_ref,
        iterations=init.iterations + int(opt.nit),
        converged=init.converged,
        message=init.message,
        method="msac-opt",
        selected_index=init.selected_index,
        candidate_scores=init.candidate_scores,
    )
