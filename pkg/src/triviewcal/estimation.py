"""Linear trifocal tensor estimation from point triples, and point transfer.

Triples are (N, 6) arrays of pixel coordinates (x, y, x', y', x'', y'') for
views 1, 2, 3.  Each triple contributes the 9 equations of the incidence
relation [x']_x (sum_i x^i T_i) [x'']_x = 0; the tensor is the smallest right
singular vector of the stacked design matrix, estimated in Hartley-normalized
coordinates and mapped back to pixels.
"""

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import DegenerateCloud, IllConditioned, TooFewTriples, TransferSingular
from .geometry import cross_matrix, normalize_tensor, transform_tensor

MIN_TRIPLES = 7


@dataclass(frozen=True)
class NormalizationTransform:
    """Per-view similarity transforms taking pixels to conditioned coordinates."""

    view1: np.ndarray
    view2: np.ndarray
    view3: np.ndarray

    @property
    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.view1, self.view2, self.view3)


@dataclass
class EstimationDiagnostics:
    """Conditioning and fit quality of one linear estimate."""

    sv_ratio: float
    n_triples: int
    mean_transfer_error: float
    max_transfer_error: float


def hartley_transform(points: np.ndarray) -> np.ndarray:
    """Similarity moving the centroid to the origin and mean radius to sqrt(2)."""
    points = np.asarray(points, dtype=float)
    centroid = points.mean(axis=0)
    dist = np.linalg.norm(points - centroid, axis=1).mean()
    if dist < 1e-12:
        raise DegenerateCloud("all points coincide; similarity scale undefined")
    s = np.sqrt(2.0) / dist
    return np.array(
        [[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]]
    )


def _lift(points: np.ndarray) -> np.ndarray:
    """Homogeneous lift with last coordinate exactly 1."""
    return np.hstack([points, np.ones((points.shape[0], 1))])


def normalize_points(triples: np.ndarray) -> tuple[NormalizationTransform, np.ndarray]:
    """Hartley-normalize each view of an (N, 6) triple array."""
    triples = np.asarray(triples, dtype=float)
    if triples.shape[0] < 2:
        raise DegenerateCloud("need at least 2 distinct points per view")
    transforms = []
    cols = []
    for v in range(3):
        pts = triples[:, 2 * v : 2 * v + 2]
        N = hartley_transform(pts)
        h = _lift(pts) @ N.T
        cols.append(h[:, :2] / h[:, 2:3])
        transforms.append(N)
    out = np.hstack(cols)
    return NormalizationTransform(*transforms), out


def linear_estimate(
    triples: np.ndarray, min_conditioning: float = 10.0
) -> tuple[np.ndarray, EstimationDiagnostics]:
    """Least-squares tensor from >= 7 triples via SVD of the incidence system.

    Returns the unit-norm pixel-coordinate tensor and diagnostics.  Raises
    TooFewTriples below the 26-DOF minimum and IllConditioned when the
    design matrix's sigma_26/sigma_27 ratio falls under `min_conditioning`.
    """
    triples = np.asarray(triples, dtype=float)
    if triples.ndim != 2 or triples.shape[1] != 6:
        raise ValueError(f"triples must be (N, 6), got {triples.shape}")
    if triples.shape[0] < MIN_TRIPLES:
        raise TooFewTriples(f"{triples.shape[0]} triples < minimum {MIN_TRIPLES}")

    transforms, norm_triples = normalize_points(triples)
    x1 = np.ascontiguousarray(_lift(norm_triples[:, 0:2]))
    x2 = np.ascontiguousarray(_lift(norm_triples[:, 2:4]))
    x3 = np.ascontiguousarray(_lift(norm_triples[:, 4:6]))
    design = kernels.trifocal_design_rows(x1, x2, x3)

    _, sv, Vh = np.linalg.svd(design, full_matrices=False)
    ratio = float(sv[-2] / sv[-1]) if sv[-1] > 0 else float("inf")
    if ratio < min_conditioning:
        raise IllConditioned(
            f"design matrix ratio sigma26/sigma27 = {ratio:.3g} < {min_conditioning}"
        )
    T_norm = Vh[-1].reshape(3, 3, 3)

    # undo the similarity transforms (they acted on the points, so the pixel
    # tensor is recovered by transforming with their inverses)
    N1, N2, N3 = transforms.matrices
    T = transform_tensor(T_norm, np.linalg.inv(N1), np.linalg.inv(N2), np.linalg.inv(N3))
    T = normalize_tensor(T)

    errs = transfer_errors(T, triples)
    diag = EstimationDiagnostics(
        sv_ratio=ratio,
        n_triples=int(triples.shape[0]),
        mean_transfer_error=float(np.mean(errs)),
        max_transfer_error=float(np.max(errs)),
    )
    return T, diag


def transfer_point(T: np.ndarray, x, xp) -> np.ndarray:
    """Predict the third-view pixel point from (x, x') under the tensor.

    The matrix [x']_x (sum_i x^i T_i) has rank one with rows proportional to
    the homogeneous target; its top right singular vector is the transfer.
    """
    x = np.asarray(x, dtype=float).reshape(2)
    xp = np.asarray(xp, dtype=float).reshape(2)
    S = x[0] * T[0] + x[1] * T[1] + T[2]
    B = cross_matrix(np.array([xp[0], xp[1], 1.0])) @ S
    _, sv, Vh = np.linalg.svd(B)
    v = Vh[0]
    if sv[0] <= 1e-14 or abs(v[2]) <= 1e-14:
        raise TransferSingular("transfer system is rank-deficient")
    return v[:2] / v[2]


def transfer_error(T: np.ndarray, triple: np.ndarray) -> float:
    """Pixel transfer error of one triple; +inf sentinel on degenerate transfer."""
    triple = np.asarray(triple, dtype=float).reshape(6)
    try:
        pred = transfer_point(T, triple[0:2], triple[2:4])
    except TransferSingular:
        return float("inf")
    return float(np.hypot(pred[0] - triple[4], pred[1] - triple[5]))


def transfer_errors(T: np.ndarray, triples: np.ndarray) -> np.ndarray:
    """Vector of transfer errors for an (N, 6) triple array (inf on degenerate)."""
    triples = np.asarray(triples, dtype=float)
    x1 = np.ascontiguousarray(_lift(triples[:, 0:2]))
    x2 = np.ascontiguousarray(_lift(triples[:, 2:4]))
    x3 = np.ascontiguousarray(triples[:, 4:6])
    return kernels.transfer_errors(np.ascontiguousarray(T, dtype=float), x1, x2, x3)
