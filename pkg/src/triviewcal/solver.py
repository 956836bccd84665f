"""Small dense nonlinear least squares with box bounds.

Damped Gauss-Newton (Levenberg-Marquardt) specialized for the 4-parameter
calibration problems here: steps are accepted only when they lower the cost,
so the recorded cost trajectory is non-increasing by construction.  Bounds
are enforced by clipping trial points into the box.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class SolveResult:
    x: np.ndarray
    cost: float
    cost_trajectory: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    message: str = ""


def central_diff_jacobian(fun, x: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian, step scaled per coordinate."""
    x = np.asarray(x, dtype=float)
    r0 = np.asarray(fun(x))
    J = np.empty((r0.size, x.size))
    for i in range(x.size):
        h = rel_step * max(abs(x[i]), 1.0)
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        J[:, i] = (np.asarray(fun(xp)) - np.asarray(fun(xm))) / (2.0 * h)
    return J


def solve_damped_lsq(
    fun,
    x0: np.ndarray,
    lb: np.ndarray,
    ub: np.ndarray,
    jac=None,
    gtol: float = 1e-10,
    xtol: float = 1e-12,
    max_iter: int = 200,
) -> SolveResult:
    """Minimize sum(fun(x)^2) over the box [lb, ub] starting at x0.

    `jac` returns (residuals, jacobian); when None a central-difference
    Jacobian is used.  Convergence: max |gradient| < gtol, or accepted step
    shorter than xtol * (|x| + xtol).  Hitting max_iter or failing to find
    any improving step sets converged=False (never raises).
    """
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    x = np.clip(np.asarray(x0, dtype=float), lb, ub)

    def evaluate(p):
        if jac is not None:
            return jac(p)
        r = np.asarray(fun(p), dtype=float)
        return r, central_diff_jacobian(fun, p)

    r = np.asarray(fun(x), dtype=float)
    cost = float(r @ r)
    traj = [cost]
    lam = 1e-3
    xscale = float(np.linalg.norm(x))

    for it in range(1, max_iter + 1):
        r, J = evaluate(x)
        g = 2.0 * (J.T @ r)
        if np.max(np.abs(g)) < gtol:
            return SolveResult(x, cost, traj, it, True, "gradient tolerance reached")
        H = J.T @ J
        diag = np.maximum(np.diag(H), 1e-12)

        accepted = False
        for _ in range(25):
            try:
                step = np.linalg.solve(H + lam * np.diag(diag), -(J.T @ r))
            except np.linalg.LinAlgError:
                lam = min(lam * 10.0, 1e12)
                continue
            if np.linalg.norm(step) < xtol * (xscale + xtol):
                return SolveResult(x, cost, traj, it, True, "step tolerance reached")
            x_new = np.clip(x + step, lb, ub)
            r_new = np.asarray(fun(x_new), dtype=float)
            cost_new = float(r_new @ r_new)
            if cost_new < cost:
                moved = np.linalg.norm(x_new - x)
                x, cost = x_new, cost_new
                traj.append(cost)
                lam = max(lam / 3.0, 1e-12)
                xscale = float(np.linalg.norm(x))
                accepted = True
                if moved < xtol * (xscale + xtol):
                    return SolveResult(x, cost, traj, it, True, "step tolerance reached")
                break
            lam = min(lam * 10.0, 1e12)
        if not accepted:
            return SolveResult(x, cost, traj, it, False, "no improving step found")

    return SolveResult(x, cost, traj, max_iter, False, "iteration limit reached")
