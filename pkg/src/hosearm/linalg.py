"""Fixed-size rotation and homogeneous-transform helpers.

Transforms are plain 4x4 numpy arrays; rotations are 3x3 arrays. Angles are
radians throughout.
"""

from typing import NamedTuple

import numpy as np

ROTATION_TOL = 1e-9
# printed 4-figure matrices miss orthonormality by ~2e-5
EXTERNAL_ROTATION_TOL = 1e-4
EULER_SINGULAR_TOL = 1e-9

TWO_PI = 2.0 * np.pi


class EulerZYZ(NamedTuple):
    z_first: float
    y_prime: float
    z_second: float


def rot_x(alpha):
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[1.0, 0.0, 0.0, 0.0],
                     [0.0, c, -s, 0.0],
                     [0.0, s, c, 0.0],
                     [0.0, 0.0, 0.0, 1.0]])


def rot_y(beta):
    c, s = np.cos(beta), np.sin(beta)
    return np.array([[c, 0.0, s, 0.0],
                     [0.0, 1.0, 0.0, 0.0],
                     [-s, 0.0, c, 0.0],
                     [0.0, 0.0, 0.0, 1.0]])


def rot_z(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0, 0.0],
                     [s, c, 0.0, 0.0],
                     [0.0, 0.0, 1.0, 0.0],
                     [0.0, 0.0, 0.0, 1.0]])


def trans(x=0.0, y=0.0, z=0.0):
    T = np.eye(4)
    T[:3, 3] = (x, y, z)
    return T


def trans_x(a):
    return trans(x=a)


def trans_z(d):
    return trans(z=d)


def make_transform(rotation, translation):
    T = np.eye(4)
    T[:3, :3] = rotation
    T[:3, 3] = translation
    return T


def compose(a, b):
    """Return ``a @ b`` with the homogeneous bottom row reset exactly."""
    T = a @ b
    T[3] = (0.0, 0.0, 0.0, 1.0)
    return T


def inverse(T):
    R = T[:3, :3]
    return make_transform(R.T, -R.T @ T[:3, 3])


def is_rotation(R, tol=ROTATION_TOL):
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        return False
    return (np.abs(R.T @ R - np.eye(3)).max() <= tol
            and abs(np.linalg.det(R) - 1.0) <= tol)


def is_transform(T, tol=ROTATION_TOL):
    T = np.asarray(T, dtype=float)
    return (T.shape == (4, 4) and np.array_equal(T[3], [0.0, 0.0, 0.0, 1.0])
            and np.all(np.isfinite(T[:3, 3])) and is_rotation(T[:3, :3], tol))


def wrap_angle(x):
    """Wrap to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), TWO_PI)


def angle_diff(a, b):
    """Signed difference a - b wrapped to (-pi, pi]."""
    return wrap_angle(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))


def rotation_from_euler_zyz(e):
    z1, y, z2 = e
    return (rot_z(z1) @ rot_y(y) @ rot_z(z2))[:3, :3]


def euler_zyz_from_rotation(R):
    """ZY'Z'' angles of ``R`` plus a flag marking the gimbal case.

    The tilt angle uses the positive square root, so ``y_prime`` lies in
    [0, pi]. When the approach axis is (anti)parallel to base z the first
    angle is pinned to zero and the whole spin goes into ``z_second``.
    """
    R = np.asarray(R, dtype=float)
    n, o, a = R[:, 0], R[:, 1], R[:, 2]
    az = float(np.clip(a[2], -1.0, 1.0))
    if abs(az) > 1.0 - EULER_SINGULAR_TOL:
        if az > 0:
            return EulerZYZ(0.0, 0.0, float(np.arctan2(n[1], n[0]))), True
        return EulerZYZ(0.0, float(np.pi), float(np.arctan2(n[1], o[1]))), True
    z1 = np.arctan2(a[1], a[0])
    y = np.arctan2(np.sqrt(1.0 - az * az), az)
    z2 = np.arctan2(o[2], -n[2])
    return EulerZYZ(float(z1), float(y), float(z2)), False


def skew(w):
    x, y, z = w
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def so3_log(R):
    """Rotation vector (axis times angle) of a rotation matrix."""
    R = np.asarray(R, dtype=float)
    cos_t = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arccos(cos_t)
    v = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    if theta < 1e-6:
        # first-order series; the vee part is 2 sin(t) * axis
        return 0.5 * (1.0 + theta * theta / 6.0) * v
    if np.pi - theta < 1e-6:
        # near pi the antisymmetric part vanishes; use the symmetric part
        B = (R + np.eye(3)) / 2.0
        k = int(np.argmax(np.diag(B)))
        axis = B[:, k] / np.sqrt(B[k, k])
        if axis @ v < 0:
            axis = -axis
        return theta * axis / np.linalg.norm(axis)
    return theta / (2.0 * np.sin(theta)) * v


def pose_error_inf(T, target):
    """Max absolute elementwise difference over the 4x4 matrices."""
    return float(np.abs(np.asarray(T) - np.asarray(target)).max())
