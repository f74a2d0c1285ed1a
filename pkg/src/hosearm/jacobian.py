"""Geometric Jacobian of a revolute serial chain and a numerical check."""

import numpy as np

from .chain import _check_q, forward_kinematics, intermediate_frames
from .errors import ValidationError
from .linalg import so3_log


def geometric_jacobian(chain, q):
    """6 x n Jacobian in the base frame.

    Rows 0-2 map joint rates to tip linear velocity, rows 3-5 to angular
    velocity. Column i is ``[z × (p_tip - o); z]`` where ``z`` and ``o`` are
    the axis and origin of the frame preceding joint i.
    """
    frames = intermediate_frames(chain, q)
    p_tip = frames[-1][:3, 3]
    J = np.zeros((6, chain.n))
    prev = np.eye(4)
    for i, T in enumerate(frames):
        z, o = prev[:3, 2], prev[:3, 3]
        J[:3, i] = np.cross(z, p_tip - o)
        J[3:, i] = z
        prev = T
    return J


def finite_difference_jacobian(chain, q, h=1e-6):
    """Central-difference Jacobian.

    Angular columns come from the log map of ``R(q)^T R(q ± h e_i)``, re-expressed
    in the base frame.
    """
    if not 1e-9 <= h <= 1e-3:
        raise ValidationError(f"step {h} outside [1e-9, 1e-3]", field="h")
    q = _check_q(chain, q)
    T0 = forward_kinematics(chain, q)
    R0 = T0[:3, :3]
    J = np.zeros((6, chain.n))
    for i in range(chain.n):
        dq = np.zeros(chain.n)
        dq[i] = h
        Tp = forward_kinematics(chain, q + dq)
        Tm = forward_kinematics(chain, q - dq)
        J[:3, i] = (Tp[:3, 3] - Tm[:3, 3]) / (2 * h)
        wp = so3_log(R0.T @ Tp[:3, :3])
        wm = so3_log(R0.T @ Tm[:3, :3])
        J[3:, i] = R0 @ (wp - wm) / (2 * h)
    return J


def jacobian_rank(J, tol=1e-9):
    return int(np.linalg.matrix_rank(J, tol=tol))
