"""Core projective geometry: intrinsics, poses, trifocal tensor constructions.

All tensors are (3, 3, 3) float64 arrays holding the three correlation slices
T[0], T[1], T[2]; they are meaningful only up to a global nonzero scale.
Projection matrices are plain (3, 4) arrays with the first camera canonical
[I | 0].
"""

from dataclasses import dataclass

import numpy as np

from .errors import DepthZero, SingularIntrinsics, ZeroTensor

_DEPTH_EPS = 1e-12


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole intrinsics with zero skew: focal lengths and principal point, in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        vals = (self.fx, self.fy, self.cx, self.cy)
        if not all(np.isfinite(v) for v in vals):
            raise SingularIntrinsics(f"non-finite intrinsics {vals}")
        if self.fx <= 0 or self.fy <= 0:
            raise SingularIntrinsics(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )

    def inverse_matrix(self) -> np.ndarray:
        return np.array(
            [
                [1.0 / self.fx, 0.0, -self.cx / self.fx],
                [0.0, 1.0 / self.fy, -self.cy / self.fy],
                [0.0, 0.0, 1.0],
            ]
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.fx, self.fy, self.cx, self.cy])

    @classmethod
    def from_array(cls, params) -> "Intrinsics":
        fx, fy, cx, cy = (float(v) for v in params)
        return cls(fx, fy, cx, cy)


@dataclass(frozen=True)
class CameraPose:
    """World-to-camera rigid transform x_cam = R @ X + t."""

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        t = np.asarray(self.t, dtype=float).reshape(3)
        if R.shape != (3, 3):
            raise ValueError(f"rotation must be 3x3, got {R.shape}")
        if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-12:
            raise ValueError("rotation is not orthonormal within 1e-12")
        if abs(np.linalg.det(R) - 1.0) > 1e-12:
            raise ValueError("rotation determinant is not +1 within 1e-12")
        R = R.copy()
        t = t.copy()
        R.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)

    def matrix(self) -> np.ndarray:
        """The 3x4 projection matrix [R | t] (no intrinsics applied)."""
        return np.hstack([self.R, self.t[:, None]])

    def center(self) -> np.ndarray:
        return -self.R.T @ self.t


def cross_matrix(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix [v]_x with [v]_x w = v x w."""
    return np.array(
        [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]]
    )


def project(K: Intrinsics, pose: CameraPose, X) -> np.ndarray:
    """Project a single 3D point to pixel coordinates."""
    X = np.asarray(X, dtype=float).reshape(3)
    cam = pose.R @ X + pose.t
    if abs(cam[2]) < _DEPTH_EPS:
        raise DepthZero(f"point depth {cam[2]:.3e} below {_DEPTH_EPS}")
    h = K.matrix() @ cam
    return h[:2] / h[2]


def project_points(K: Intrinsics, pose: CameraPose, X: np.ndarray) -> np.ndarray:
    """Project (N, 3) points; raises DepthZero if any point has ~zero depth."""
    X = np.asarray(X, dtype=float)
    cam = X @ pose.R.T + pose.t
    if np.any(np.abs(cam[:, 2]) < _DEPTH_EPS):
        raise DepthZero("at least one point lies on a principal plane")
    h = cam @ K.matrix().T
    return h[:, :2] / h[:, 2:3]


def relative_pose(base: CameraPose, other: CameraPose) -> CameraPose:
    """Pose of `other` in the frame where `base` is the canonical camera."""
    R = other.R @ base.R.T
    t = other.t - R @ base.t
    return CameraPose(R, t)


def calibrated_trifocal_from_poses(pose2: CameraPose, pose3: CameraPose) -> np.ndarray:
    """Calibrated tensor of the canonical triple (I|0), (R2|t2), (R3|t3).

    Slice k is R2 e_k t3^T - t2 (R3 e_k)^T, i.e. built from the k-th columns
    of the two rotations.
    """
    T = np.empty((3, 3, 3))
    for k in range(3):
        T[k] = np.outer(pose2.R[:, k], pose3.t) - np.outer(pose2.t, pose3.R[:, k])
    return T


def trifocal_from_projections(P2: np.ndarray, P3: np.ndarray) -> np.ndarray:
    """Projective tensor of (P1=[I|0], P2, P3): T_i = a_i b4^T - a4 b_i^T."""
    P2 = np.asarray(P2, dtype=float)
    P3 = np.asarray(P3, dtype=float)
    T = np.empty((3, 3, 3))
    for i in range(3):
        T[i] = np.outer(P2[:, i], P3[:, 3]) - np.outer(P2[:, 3], P3[:, i])
    return T


def transform_tensor(T: np.ndarray, M1: np.ndarray, M2: np.ndarray, M3: np.ndarray) -> np.ndarray:
    """Tensor after the per-view point substitutions x_v -> M_v x_v.

    New slice i mixes the old slices with the columns of M1^-1 and conjugates
    by the second- and third-view maps:  T'_i = M2 (sum_r inv(M1)[r,i] T_r) M3^T.
    """
    M1i = np.linalg.inv(M1)
    out = np.empty((3, 3, 3))
    for i in range(3):
        S = M1i[0, i] * T[0] + M1i[1, i] * T[1] + M1i[2, i] * T[2]
        out[i] = M2 @ S @ M3.T
    return out


def apply_intrinsics_transform(T: np.ndarray, K: Intrinsics) -> np.ndarray:
    """Express a pixel-coordinate tensor in normalized coordinates x -> K^-1 x."""
    T = np.asarray(T, dtype=float)
    if not np.any(T):
        raise ZeroTensor("cannot transform the all-zero tensor")
    Ki = K.inverse_matrix()
    return transform_tensor(T, Ki, Ki, Ki)


def normalize_tensor(T: np.ndarray) -> np.ndarray:
    """Scale to unit Frobenius norm, sign fixed so the largest-|entry| is positive."""
    T = np.asarray(T, dtype=float)
    norm = np.sqrt(np.sum(T * T))
    if not norm > np.finfo(float).tiny:
        raise ZeroTensor("tensor norm is zero")
    out = T / norm
    flat = out.reshape(-1)
    if flat[np.argmax(np.abs(flat))] < 0:
        out = -out
    return out


def tensor_distance(Ta: np.ndarray, Tb: np.ndarray) -> float:
    """Entry-wise max difference after unit normalization, minimized over sign."""
    A = normalize_tensor(Ta)
    B = normalize_tensor(Tb)
    return float(min(np.max(np.abs(A - B)), np.max(np.abs(A + B))))
