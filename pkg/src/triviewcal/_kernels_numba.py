"""Numba-compiled kernels.

Loop formulations of the functions in ``_kernels_np`` with identical
signatures; compiled lazily on first call, results cached on disk.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _tr(X):
    return X[0, 0] + X[1, 1] + X[2, 2]


@njit(cache=True)
def _ip(X, Y):
    s = 0.0
    for i in range(3):
        for j in range(3):
            s += X[i, j] * Y[i, j]
    return s


@njit(cache=True)
def _phi(U, V):
    out = np.empty(15)
    for s in range(3):
        a = s
        b = (s + 1) % 3
        c = (s + 2) % 3
        W = U[c] - U[a]
        X = U[a] - U[b]
        trW = _tr(W)
        trUa = _tr(U[a])
        trUb = _tr(U[b])
        trUc = _tr(U[c])
        trVa = _tr(V[a])
        trVb = _tr(V[b])
        trVc = _tr(V[c])
        out[s] = trW * trW - 2.0 * _ip(W, W) - (trVc * trVc - 2.0 * _ip(V[c], V[c]))
        out[3 + s] = (
            trW * trVa
            - 2.0 * _ip(W, V[a])
            + trVb * trVc
            - 2.0 * _ip(V[b], V[c])
        )
        out[6 + s] = (trUa - trUb) * trVa - 2.0 * _ip(X, V[a])
        out[9 + s] = (
            trUb * trUb
            - trVc * trVc
            - (_ip(U[b], U[b]) - _ip(V[c], V[c]) + _ip(W, W))
        )
        out[12 + s] = (
            trVb * (trUa - 2.0 * trUb - trUc)
            - trVa * trVc
            + 2.0 * _ip(V[b], U[b])
        )
    return out


@njit(cache=True)
def _products(T):
    U = np.empty((3, 3, 3))
    V = np.empty((3, 3, 3))
    for k in range(3):
        kk = (k + 1) % 3
        for i in range(3):
            for j in range(3):
                su = 0.0
                sv = 0.0
                for m in range(3):
                    su += T[k, i, m] * T[k, j, m]
                    sv += T[k, i, m] * T[kk, j, m] + T[kk, i, m] * T[k, j, m]
                U[k, i, j] = su
                V[k, i, j] = sv
    return U, V


@njit(cache=True)
def quartic_residuals(T):
    U, V = _products(T)
    return _phi(U, V)


@njit(cache=True)
def _axbt(A, X, B):
    """A @ X @ B.T for 3x3 matrices."""
    out = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            acc = 0.0
            for m in range(3):
                t = 0.0
                for q in range(3):
                    t += X[m, q] * B[j, q]
                acc += A[i, m] * t
            out[i, j] = acc
    return out


@njit(cache=True)
def _combine_slices(params, T):
    fx, fy, cx, cy = params[0], params[1], params[2], params[3]
    S = np.empty((3, 3, 3))
    for i in range(3):
        for j in range(3):
            S[0, i, j] = fx * T[0, i, j]
            S[1, i, j] = fy * T[1, i, j]
            S[2, i, j] = cx * T[0, i, j] + cy * T[1, i, j] + T[2, i, j]
    return S


@njit(cache=True)
def _inverse_k(params):
    fx, fy, cx, cy = params[0], params[1], params[2], params[3]
    Ki = np.zeros((3, 3))
    Ki[0, 0] = 1.0 / fx
    Ki[0, 2] = -cx / fx
    Ki[1, 1] = 1.0 / fy
    Ki[1, 2] = -cy / fy
    Ki[2, 2] = 1.0
    return Ki


@njit(cache=True)
def intrinsics_residuals(params, T):
    S = _combine_slices(params, T)
    Ki = _inverse_k(params)
    A = np.empty((3, 3, 3))
    for k in range(3):
        A[k] = _axbt(Ki, S[k], Ki)
    g2 = 0.0
    for k in range(3):
        for i in range(3):
            for j in range(3):
                g2 += A[k, i, j] * A[k, i, j]
    g = np.sqrt(g2)
    if not g > 0.0:  # degenerate tensor: residuals undefined
        return np.full(15, np.nan)
    for k in range(3):
        for i in range(3):
            for j in range(3):
                A[k, i, j] /= g
    U, V = _products(A)
    return _phi(U, V)


@njit(cache=True)
def intrinsics_residuals_jac(params, T):
    fx, fy, cx, cy = params[0], params[1], params[2], params[3]
    Ki = _inverse_k(params)
    dKi = np.zeros((4, 3, 3))
    dKi[0, 0, 0] = -1.0 / (fx * fx)
    dKi[0, 0, 2] = cx / (fx * fx)
    dKi[1, 1, 1] = -1.0 / (fy * fy)
    dKi[1, 1, 2] = cy / (fy * fy)
    dKi[2, 0, 2] = -1.0 / fx
    dKi[3, 1, 2] = -1.0 / fy

    S = _combine_slices(params, T)
    dS = np.zeros((4, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            dS[0, 0, i, j] = T[0, i, j]
            dS[1, 1, i, j] = T[1, i, j]
            dS[2, 2, i, j] = T[0, i, j]
            dS[3, 2, i, j] = T[1, i, j]

    A = np.empty((3, 3, 3))
    for k in range(3):
        A[k] = _axbt(Ki, S[k], Ki)
    dA = np.empty((4, 3, 3, 3))
    for p in range(4):
        for k in range(3):
            dA[p, k] = (
                _axbt(dKi[p], S[k], Ki)
                + _axbt(Ki, dS[p, k], Ki)
                + _axbt(Ki, S[k], dKi[p])
            )

    g2 = 0.0
    for k in range(3):
        for i in range(3):
            for j in range(3):
                g2 += A[k, i, j] * A[k, i, j]
    g = np.sqrt(g2)
    if not g > 0.0:  # degenerate tensor: residuals undefined
        return np.full(15, np.nan), np.full((15, 4), np.nan)
    dG = np.zeros(4)
    for p in range(4):
        acc = 0.0
        for k in range(3):
            for i in range(3):
                for j in range(3):
                    acc += A[k, i, j] * dA[p, k, i, j]
        dG[p] = acc / g
    N = A / g
    dN = np.empty((4, 3, 3, 3))
    for p in range(4):
        for k in range(3):
            for i in range(3):
                for j in range(3):
                    dN[p, k, i, j] = dA[p, k, i, j] / g - N[k, i, j] * dG[p] / g

    U, V = _products(N)
    dU = np.empty((4, 3, 3, 3))
    dV = np.empty((4, 3, 3, 3))
    for p in range(4):
        for k in range(3):
            kk = (k + 1) % 3
            for i in range(3):
                for j in range(3):
                    du = 0.0
                    dv = 0.0
                    for m in range(3):
                        du += dN[p, k, i, m] * N[k, j, m] + N[k, i, m] * dN[p, k, j, m]
                        dv += (
                            dN[p, k, i, m] * N[kk, j, m]
                            + N[k, i, m] * dN[p, kk, j, m]
                            + dN[p, kk, i, m] * N[k, j, m]
                            + N[kk, i, m] * dN[p, k, j, m]
                        )
                    dU[p, k, i, j] = du
                    dV[p, k, i, j] = dv

    res = _phi(U, V)
    jac = np.empty((15, 4))
    for s in range(3):
        a = s
        b = (s + 1) % 3
        c = (s + 2) % 3
        W = U[c] - U[a]
        X = U[a] - U[b]
        trW = _tr(W)
        trUa = _tr(U[a])
        trUb = _tr(U[b])
        trUc = _tr(U[c])
        trVa = _tr(V[a])
        trVb = _tr(V[b])
        trVc = _tr(V[c])
        trM = trUa - 2.0 * trUb - trUc
        for p in range(4):
            dW = dU[p, c] - dU[p, a]
            dX = dU[p, a] - dU[p, b]
            dtrW = _tr(dW)
            dtrUa = _tr(dU[p, a])
            dtrUb = _tr(dU[p, b])
            dtrUc = _tr(dU[p, c])
            dtrVa = _tr(dV[p, a])
            dtrVb = _tr(dV[p, b])
            dtrVc = _tr(dV[p, c])
            jac[s, p] = (
                2.0 * trW * dtrW
                - 4.0 * _ip(dW, W)
                - (2.0 * trVc * dtrVc - 4.0 * _ip(dV[p, c], V[c]))
            )
            jac[3 + s, p] = (
                dtrW * trVa
                + trW * dtrVa
                - 2.0 * (_ip(dW, V[a]) + _ip(dV[p, a], W))
                + dtrVb * trVc
                + trVb * dtrVc
                - 2.0 * (_ip(dV[p, b], V[c]) + _ip(dV[p, c], V[b]))
            )
            jac[6 + s, p] = (
                (dtrUa - dtrUb) * trVa
                + (trUa - trUb) * dtrVa
                - 2.0 * (_ip(dX, V[a]) + _ip(dV[p, a], X))
            )
            jac[9 + s, p] = (
                2.0 * trUb * dtrUb
                - 2.0 * trVc * dtrVc
                - (
                    2.0 * _ip(dU[p, b], U[b])
                    - 2.0 * _ip(dV[p, c], V[c])
                    + 2.0 * _ip(dW, W)
                )
            )
            dtrM = dtrUa - 2.0 * dtrUb - dtrUc
            jac[12 + s, p] = (
                dtrVb * trM
                + trVb * dtrM
                - dtrVa * trVc
                - trVa * dtrVc
                + 2.0 * (_ip(dV[p, b], U[b]) + _ip(dU[p, b], V[b]))
            )
    return res, jac


@njit(cache=True)
def _cross3(x):
    C = np.zeros((3, 3))
    C[0, 1] = -x[2]
    C[0, 2] = x[1]
    C[1, 0] = x[2]
    C[1, 2] = -x[0]
    C[2, 0] = -x[1]
    C[2, 1] = x[0]
    return C


@njit(cache=True)
def trifocal_design_rows(x1, x2, x3):
    n = x1.shape[0]
    D = np.zeros((9 * n, 27))
    for nn in range(n):
        C2 = _cross3(x2[nn])
        C3 = _cross3(x3[nn])
        for a in range(3):
            for b in range(3):
                row = 9 * nn + 3 * a + b
                for i in range(3):
                    for c in range(3):
                        f = x1[nn, i] * C2[a, c]
                        for d in range(3):
                            D[row, 9 * i + 3 * c + d] = f * C3[d, b]
    return D


@njit(cache=True)
def transfer_errors(T, x1, x2, x3):
    n = x1.shape[0]
    errs = np.empty(n)
    S = np.empty((3, 3))
    B = np.empty((3, 3))
    for nn in range(n):
        for r in range(3):
            for c in range(3):
                S[r, c] = (
                    x1[nn, 0] * T[0, r, c]
                    + x1[nn, 1] * T[1, r, c]
                    + x1[nn, 2] * T[2, r, c]
                )
        s0 = x2[nn, 0]
        s1 = x2[nn, 1]
        s2 = x2[nn, 2]
        for c in range(3):
            B[0, c] = -s2 * S[1, c] + s1 * S[2, c]
            B[1, c] = s2 * S[0, c] - s0 * S[2, c]
            B[2, c] = -s1 * S[0, c] + s0 * S[1, c]
        _, sv, vh = np.linalg.svd(B)
        if sv[0] <= 1e-14 or abs(vh[0, 2]) <= 1e-14:
            errs[nn] = np.inf
            continue
        px = vh[0, 0] / vh[0, 2]
        py = vh[0, 1] / vh[0, 2]
        errs[nn] = np.hypot(px - x3[nn, 0], py - x3[nn, 1])
    return errs
