"""Pure-numpy reference kernels.

Every function here has a loop-level twin in ``_kernels_numba``; the two
backends must agree to float precision and are cross-checked in the tests.
All inputs are float64 ndarrays, tensors are (3, 3, 3) slice stacks.
"""

import numpy as np

# slice k+1 with wraparound, used by the mixed products
_NEXT = np.array([1, 2, 0])


def _cross_stack(x: np.ndarray) -> np.ndarray:
    """Stack of cross-product matrices [x]_x for homogeneous points (N, 3)."""
    n = x.shape[0]
    C = np.zeros((n, 3, 3))
    C[:, 0, 1] = -x[:, 2]
    C[:, 0, 2] = x[:, 1]
    C[:, 1, 0] = x[:, 2]
    C[:, 1, 2] = -x[:, 0]
    C[:, 2, 0] = -x[:, 1]
    C[:, 2, 1] = x[:, 0]
    return C


def _phi(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """The 15 quartic residuals from stacked symmetric products U, V (3,3,3).

    Order: template A1 at cyclic shifts 0..2, then A2, A3, B1, B2.  Since
    every matrix involved is symmetric, tr(XY) = sum(X * Y).
    """
    trU = np.trace(U, axis1=1, axis2=2)
    trV = np.trace(V, axis1=1, axis2=2)
    out = np.empty(15)
    for s in range(3):
        a, b, c = s, (s + 1) % 3, (s + 2) % 3
        W = U[c] - U[a]
        trW = trU[c] - trU[a]
        out[s] = (trW * trW - 2.0 * np.sum(W * W)) - (
            trV[c] * trV[c] - 2.0 * np.sum(V[c] * V[c])
        )
        out[3 + s] = (trW * trV[a] - 2.0 * np.sum(W * V[a])) + (
            trV[b] * trV[c] - 2.0 * np.sum(V[b] * V[c])
        )
        out[6 + s] = (trU[a] - trU[b]) * trV[a] - 2.0 * np.sum((U[a] - U[b]) * V[a])
        out[9 + s] = (
            trU[b] * trU[b]
            - trV[c] * trV[c]
            - (np.sum(U[b] * U[b]) - np.sum(V[c] * V[c]) + np.sum(W * W))
        )
        out[12 + s] = (
            trV[b] * (trU[a] - 2.0 * trU[b] - trU[c])
            - trV[a] * trV[c]
            + 2.0 * np.sum(V[b] * U[b])
        )
    return out


def _sym_products(T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    T2 = T[_NEXT]
    U = np.einsum("kim,kjm->kij", T, T)
    V = np.einsum("kim,kjm->kij", T, T2) + np.einsum("kim,kjm->kij", T2, T)
    return U, V


def quartic_residuals(T: np.ndarray) -> np.ndarray:
    """15 calibration residuals of a (unit-norm) tensor, documented order."""
    U, V = _sym_products(T)
    return _phi(U, V)


def _transformed_slices(params: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Slices of the tensor expressed in normalized coordinates x -> K^-1 x."""
    fx, fy, cx, cy = params
    S = np.empty((3, 3, 3))
    S[0] = fx * T[0]
    S[1] = fy * T[1]
    S[2] = cx * T[0] + cy * T[1] + T[2]
    Ki = np.array([[1.0 / fx, 0.0, -cx / fx], [0.0, 1.0 / fy, -cy / fy], [0.0, 0.0, 1.0]])
    return Ki @ S @ Ki.T


def intrinsics_residuals(params: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Residuals of a pixel-space tensor at intrinsics params (fx, fy, cx, cy).

    Transforms to normalized coordinates, scales to unit Frobenius norm and
    evaluates the 15 quartics.  Sign of the tensor is irrelevant (even degree).
    """
    A = _transformed_slices(params, T)
    G = np.sqrt(np.sum(A * A))
    if not G > 0.0:  # degenerate tensor: residuals undefined
        return np.full(15, np.nan)
    A = A / G
    U, V = _sym_products(A)
    return _phi(U, V)


def intrinsics_residuals_jac(params: np.ndarray, T: np.ndarray):
    """Residuals plus their analytic Jacobian w.r.t. (fx, fy, cx, cy).

    Forward-mode: one directional derivative per parameter is pushed through
    the coordinate transform, the unit-norm scaling and the quartic templates.
    Returns (residuals (15,), jacobian (15, 4)).
    """
    fx, fy, cx, cy = params
    Ki = np.array([[1.0 / fx, 0.0, -cx / fx], [0.0, 1.0 / fy, -cy / fy], [0.0, 0.0, 1.0]])
    dKi = np.zeros((4, 3, 3))
    dKi[0, 0, 0] = -1.0 / fx**2
    dKi[0, 0, 2] = cx / fx**2
    dKi[1, 1, 1] = -1.0 / fy**2
    dKi[1, 1, 2] = cy / fy**2
    dKi[2, 0, 2] = -1.0 / fx
    dKi[3, 1, 2] = -1.0 / fy

    S = np.empty((3, 3, 3))
    S[0] = fx * T[0]
    S[1] = fy * T[1]
    S[2] = cx * T[0] + cy * T[1] + T[2]
    dS = np.zeros((4, 3, 3, 3))
    dS[0, 0] = T[0]
    dS[1, 1] = T[1]
    dS[2, 2] = T[0]
    dS[3, 2] = T[1]

    A = Ki @ S @ Ki.T
    KiS = Ki @ S
    dA = (
        dKi[:, None] @ S @ Ki.T
        + Ki @ dS @ Ki.T
        + KiS[None] @ dKi.transpose(0, 2, 1)[:, None]
    )

    G = np.sqrt(np.sum(A * A))
    if not G > 0.0:  # degenerate tensor: residuals undefined
        return np.full(15, np.nan), np.full((15, 4), np.nan)
    dG = np.sum(A[None] * dA, axis=(1, 2, 3)) / G
    N = A / G
    dN = dA / G - N[None] * (dG / G)[:, None, None, None]

    N2 = N[_NEXT]
    dN2 = dN[:, _NEXT]
    U = np.einsum("kim,kjm->kij", N, N)
    V = np.einsum("kim,kjm->kij", N, N2)
    V = V + V.transpose(0, 2, 1)
    dU = np.einsum("pkim,kjm->pkij", dN, N)
    dU = dU + dU.transpose(0, 1, 3, 2)
    M = np.einsum("pkim,kjm->pkij", dN, N2) + np.einsum("pkim,kjm->pkij", dN2, N)
    dV = M + M.transpose(0, 1, 3, 2)

    res = _phi(U, V)
    jac = np.empty((15, 4))
    trU = np.trace(U, axis1=1, axis2=2)
    trV = np.trace(V, axis1=1, axis2=2)
    dtrU = np.trace(dU, axis1=2, axis2=3)
    dtrV = np.trace(dV, axis1=2, axis2=3)

    def ip(X, Y):
        return np.sum(X * Y)

    def dip(dX, Y):
        return np.sum(dX * Y, axis=(1, 2))

    for s in range(3):
        a, b, c = s, (s + 1) % 3, (s + 2) % 3
        W = U[c] - U[a]
        trW = trU[c] - trU[a]
        dW = dU[:, c] - dU[:, a]
        dtrW = dtrU[:, c] - dtrU[:, a]

        jac[s] = (2.0 * trW * dtrW - 4.0 * dip(dW, W)) - (
            2.0 * trV[c] * dtrV[:, c] - 4.0 * dip(dV[:, c], V[c])
        )
        jac[3 + s] = (
            dtrW * trV[a]
            + trW * dtrV[:, a]
            - 2.0 * (dip(dW, V[a]) + dip(dV[:, a], W))
        ) + (
            dtrV[:, b] * trV[c]
            + trV[b] * dtrV[:, c]
            - 2.0 * (dip(dV[:, b], V[c]) + dip(dV[:, c], V[b]))
        )
        X = U[a] - U[b]
        dX = dU[:, a] - dU[:, b]
        jac[6 + s] = (
            (dtrU[:, a] - dtrU[:, b]) * trV[a]
            + (trU[a] - trU[b]) * dtrV[:, a]
            - 2.0 * (dip(dX, V[a]) + dip(dV[:, a], X))
        )
        jac[9 + s] = (
            2.0 * trU[b] * dtrU[:, b]
            - 2.0 * trV[c] * dtrV[:, c]
            - (
                2.0 * dip(dU[:, b], U[b])
                - 2.0 * dip(dV[:, c], V[c])
                + 2.0 * dip(dW, W)
            )
        )
        trM = trU[a] - 2.0 * trU[b] - trU[c]
        dtrM = dtrU[:, a] - 2.0 * dtrU[:, b] - dtrU[:, c]
        jac[12 + s] = (
            dtrV[:, b] * trM
            + trV[b] * dtrM
            - dtrV[:, a] * trV[c]
            - trV[a] * dtrV[:, c]
            + 2.0 * (dip(dV[:, b], U[b]) + dip(dU[:, b], V[b]))
        )
    return res, jac


def trifocal_design_rows(x1: np.ndarray, x2: np.ndarray, x3: np.ndarray) -> np.ndarray:
    """Design matrix of the incidence relation, 9 rows per correspondence.

    Inputs are homogeneous points (N, 3) per view.  Row n*9 + a*3 + b holds the
    coefficients of equation (a, b); column i*9 + c*3 + d multiplies T[i, c, d].
    """
    C2 = _cross_stack(x2)
    C3 = _cross_stack(x3)
    D = np.einsum("ni,nac,ndb->nabicd", x1, C2, C3)
    return D.reshape(-1, 27)


def transfer_errors(T: np.ndarray, x1: np.ndarray, x2: np.ndarray, x3: np.ndarray) -> np.ndarray:
    """Pixel distance between tensor-transferred points and observed x3.

    x1, x2 homogeneous (N, 3); x3 pixel (N, 2).  Degenerate transfers yield inf.
    """
    S = np.einsum("ni,icd->ncd", x1, T)
    B = _cross_stack(x2) @ S
    # rows of B are all proportional to the homogeneous third-view point
    _, sv, Vh = np.linalg.svd(B)
    v = Vh[:, 0, :]
    errs = np.full(x1.shape[0], np.inf)
    ok = (sv[:, 0] > 1e-14) & (np.abs(v[:, 2]) > 1e-14)
    pred = v[ok, :2] / v[ok, 2:3]
    errs[ok] = np.hypot(pred[:, 0] - x3[ok, 0], pred[:, 1] - x3[ok, 1])
    return errs
