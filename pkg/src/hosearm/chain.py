"""Denavit-Hartenberg serial chains and forward kinematics.

Rows use the classic (distal) convention: the joint variable adds to the
row's constant ``theta_offset`` and the link transform is
``Rz(theta) Tz(d) Tx(a) Rx(alpha)``.
"""

from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .errors import LengthMismatch, ValidationError

MAX_JOINTS = 12


@dataclass(frozen=True)
class DhRow:
    theta_offset: float
    alpha: float
    d: float
    a: float

    def __post_init__(self):
        for name in ("theta_offset", "alpha", "d", "a"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v!r}", field=name)
            object.__setattr__(self, name, float(v))
        if not -np.pi <= self.alpha <= np.pi:
            raise ValidationError(f"alpha {self.alpha} outside [-pi, pi]", field="alpha")


@dataclass(frozen=True)
class KinematicChain:
    name: str
    rows: Tuple[DhRow, ...]
    joint_limits: Tuple[Tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        rows = tuple(self.rows)
        if not 1 <= len(rows) <= MAX_JOINTS:
            raise ValidationError(
                f"chain needs 1..{MAX_JOINTS} rows, got {len(rows)}", field="rows")
        limits = tuple(self.joint_limits) or ((-np.pi, np.pi),) * len(rows)
        if len(limits) != len(rows):
            raise ValidationError(
                f"{len(limits)} joint limits for {len(rows)} rows", field="joint_limits")
        clean = []
        for i, lim in enumerate(limits):
            lo, hi = (float(v) for v in lim)
            if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
                raise ValidationError(f"joint {i}: bad limits [{lo}, {hi}]",
                                      field="joint_limits")
            clean.append((lo, hi))
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "joint_limits", tuple(clean))

    @property
    def n(self):
        return len(self.rows)

    def within_limits(self, q, tol=0.0):
        q = np.asarray(q, dtype=float)
        return all(lo - tol <= v <= hi + tol for v, (lo, hi) in zip(q, self.joint_limits))


def _check_q(chain, q):
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.shape[0] != chain.n:
        raise LengthMismatch(f"expected {chain.n} joint values, got {q.shape[0]}")
    return q


def link_transform(row, theta_var):
    """Closed-form link matrix for one DH row at joint value ``theta_var``."""
    th = row.theta_offset + theta_var
    ct, st = np.cos(th), np.sin(th)
    ca, sa = np.cos(row.alpha), np.sin(row.alpha)
    return np.array([
        [ct, -ca * st, sa * st, row.a * ct],
        [st, ca * ct, -sa * ct, row.a * st],
        [0.0, sa, ca, row.d],
        [0.0, 0.0, 0.0, 1.0],
    ])


def intermediate_frames(chain, q):
    """Base-frame poses T^0_1 ... T^0_n."""
    q = _check_q(chain, q)
    frames = []
    T = np.eye(4)
    for row, qi in zip(chain.rows, q):
        T = T @ link_transform(row, qi)
        frames.append(T)
    return frames


def forward_kinematics(chain, q):
    return intermediate_frames(chain, q)[-1]


# Watering arm. Its DH table reproduces the reference pose only when each row
# is read as a fixed transform followed by the joint rotation (rigid-body-tree
# style) with joints 3 and 4 turning about -z. Regrouping that product gives
# the classic rows below: base and shoulder heights merge into row 1, alpha = pi
# on row 2 carries the reversed axes, and joints 5 and 6 share one roll axis.
BASE_HEIGHT = 0.0793
SHOULDER_RISE = 0.03
UPPER_ARM = 0.127
FOREARM = 0.1842
TOOL_LENGTH = 0.1635

ARM_ROWS = (
    DhRow(0.0, np.pi / 2, BASE_HEIGHT + SHOULDER_RISE, 0.0),
    DhRow(-np.pi / 2, np.pi, 0.0, UPPER_ARM),
    DhRow(0.0, 0.0, 0.0, FOREARM),
    DhRow(np.pi / 2, np.pi / 2, 0.0, 0.0),
    DhRow(0.0, 0.0, TOOL_LENGTH, 0.0),
    DhRow(0.0, 0.0, 0.0, 0.0),
)

# reference configuration and its tip pose (4 significant figures)
GOLDEN_Q = (3.808, 0.106, 5.92, 2.33, 0.864, 1.99)
GOLDEN_T = np.array([
    [0.3863, -0.5324, 0.7532, 0.04677],
    [-0.0466, 0.8043, 0.5924, 0.03679],
    [-0.9212, -0.2639, 0.2859, -0.1343],
    [0.0, 0.0, 0.0, 1.0],
])


def reference_arm():
    return KinematicChain("reference_arm", ARM_ROWS)


def make_chain(name, rows: Sequence[Sequence[float]], joint_limits=()):
    """Build a chain from ``(theta_offset, alpha, d, a)`` tuples."""
    return KinematicChain(name, tuple(DhRow(*r) for r in rows), tuple(joint_limits))
