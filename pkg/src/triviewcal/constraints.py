"""The 15 quartic polynomial constraints satisfied by calibrated trifocal tensors.

A trifocal tensor built from rotations and translations alone (no intrinsics)
makes all 15 residuals vanish; a pixel-space tensor does not.  Calibration
searches for the K whose normalization transform drives them to zero.
"""

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import NotNormalized

# Residual vector layout: five templates, each at cyclic index shifts 0, 1, 2.
# Template formulas (1-based slice indices, psi(X,Y) = tr X tr Y - 2 tr XY):
#   A1: psi(U3-U1, U3-U1) - psi(V3, V3)
#   A2: psi(U3-U1, V1) + psi(V2, V3)
#   A3: psi(U1-U2, V1)
#   B1: tr(U2)^2 - tr(V3)^2 - tr(U2^2 - V3^2 + (U3-U1)^2)
#   B2: tr(V2) tr(U1-2U2-U3) - tr(V1) tr(V3) + 2 tr(V2 U2)
# A shift s replaces every index k by k+s (mod 3) throughout a template.
RESIDUAL_LABELS = tuple(
    f"{tmpl}s{s}" for tmpl in ("A1", "A2", "A3", "B1", "B2") for s in range(3)
)

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class SymmetricProducts:
    """Stacked products U[k] = T_k T_k^T and V[k] = T_k T_{k+1}^T + T_{k+1} T_k^T."""

    U: np.ndarray
    V: np.ndarray


def sym_products(T: np.ndarray) -> SymmetricProducts:
    """Symmetric slice products with cyclic wraparound 3+1 = 1."""
    T = np.asarray(T, dtype=float)
    nxt = T[[1, 2, 0]]
    U = np.einsum("kim,kjm->kij", T, T)
    V = np.einsum("kim,kjm->kij", T, nxt) + np.einsum("kim,kjm->kij", nxt, T)
    return SymmetricProducts(U=U, V=V)


def psi(X: np.ndarray, Y: np.ndarray) -> float:
    """psi(X, Y) = tr(X) tr(Y) - 2 tr(X Y)."""
    return float(np.trace(X) * np.trace(Y) - 2.0 * np.trace(X @ Y))


def quartic_residuals_unchecked(T: np.ndarray) -> np.ndarray:
    """The 15 residuals without the unit-norm precondition (quartic in scale)."""
    return kernels.quartic_residuals(np.ascontiguousarray(T, dtype=float))


def quartic_residuals(T: np.ndarray) -> np.ndarray:
    """The 15 residuals of a unit-Frobenius-norm tensor, in RESIDUAL_LABELS order.

    Raises NotNormalized unless ||T||_F is within 1e-9 of 1; residual
    magnitudes are only comparable on unit-scale tensors.
    """
    T = np.ascontiguousarray(T, dtype=float)
    norm = np.sqrt(np.sum(T * T))
    if abs(norm - 1.0) > _NORM_TOL:
        raise NotNormalized(f"tensor Frobenius norm {norm!r} is not 1 within {_NORM_TOL}")
    return kernels.quartic_residuals(T)
