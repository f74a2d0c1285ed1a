"""Inverse kinematics: closed-form geometric solver plus a damped least-squares fallback.

The geometric solver handles the watering arm's layout: a base yaw, a planar
shoulder/elbow pair that places the wrist center, a wrist pitch whose axis is
perpendicular to a tool roll axis, and two joints sharing that roll axis. The
shared roll axis makes joints 5 and 6 redundant; solutions put all roll into
joint 6 and hold joint 5 at a caller-chosen value (zero by default).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .chain import _check_q, forward_kinematics, link_transform
from .errors import (Diverged, MaxIterations, NotWristPartitioned,
                     ShoulderSingularity, Unreachable, ValidationError)
from .jacobian import geometric_jacobian
from .linalg import (EXTERNAL_ROTATION_TOL, inverse, pose_error_inf, rot_x,
                     rot_z, so3_log, wrap_angle)

log = logging.getLogger(__name__)

COS_CLAMP_BAND = 1e-9
SHOULDER_AXIS_TOL = 1e-12
_STRUCT_TOL = 1e-12

SHOULDER_RIGHT, SHOULDER_LEFT = "SHOULDER_RIGHT", "SHOULDER_LEFT"
ELBOW_UP, ELBOW_DOWN = "ELBOW_UP", "ELBOW_DOWN"
WRIST_NOFLIP, WRIST_FLIP = "WRIST_NOFLIP", "WRIST_FLIP"


@dataclass(frozen=True)
class IkSolution:
    q: Tuple[float, ...]
    branch: Tuple[str, str, str]
    residual: float
    flags: frozenset = frozenset()
    iterations: int = 0


@dataclass(frozen=True)
class IkDiagnostics:
    wrist_center: np.ndarray
    beta1: float = float("nan")
    beta2: float = float("nan")
    phi: float = float("nan")
    zeta: float = 0.0
    reachable: bool = False


@dataclass
class IkReport:
    solutions: List[IkSolution]
    diagnostics: List[IkDiagnostics] = field(default_factory=list)
    rejected_by_limits: int = 0
    rejected_by_residual: int = 0


def _safe_acos(x, what):
    if abs(x) > 1.0 + COS_CLAMP_BAND:
        raise Unreachable(f"{what}: cosine argument {x:.12g} outside [-1, 1]")
    return float(np.arccos(np.clip(x, -1.0, 1.0)))


def wrist_center(target, d6):
    """Wrist center: tip position pulled back along the approach axis."""
    target = np.asarray(target, dtype=float)
    return target[:3, 3] - d6 * target[:3, 2]


def solve_theta1(p04):
    """Base yaw facing the wrist center, and the flipped-shoulder alternative."""
    x, y = float(p04[0]), float(p04[1])
    if x * x + y * y < SHOULDER_AXIS_TOL:
        raise ShoulderSingularity("wrist center lies on the base axis")
    primary = float(np.arctan2(y, x))
    return [float(wrap_angle(primary)), float(wrap_angle(primary + np.pi))]


def planar_triangle(p14, a2, a3, d4=0.0):
    """Shoulder/elbow triangle quantities for a wrist offset ``p14``.

    ``p14`` is the shoulder-to-wrist vector in the shoulder frame: x and y span
    the arm plane (angles measured from x toward y), z is the pitch axis.
    Returns a dict with beta1, beta2, phi, zeta, l1 and the planar distance.
    """
    x, y = float(p14[0]), float(p14[1])
    dist = float(np.hypot(x, y))
    l1 = float(np.hypot(a3, d4))
    zeta = float(np.arctan2(d4, a3))
    if dist < 1e-12:
        raise Unreachable("wrist center coincides with the shoulder")
    beta1 = float(np.arctan2(y, x))
    beta2 = _safe_acos((a2 * a2 + dist * dist - l1 * l1) / (2 * a2 * dist), "shoulder angle")
    phi = _safe_acos((l1 * l1 + a2 * a2 - dist * dist) / (2 * l1 * a2), "elbow angle")
    return {"beta1": beta1, "beta2": beta2, "phi": phi, "zeta": zeta,
            "l1": l1, "dist": dist}


def solve_theta2_theta3(p14, a2, a3, d4=0.0):
    """Upper-arm and relative forearm angles for both elbow configurations.

    Returns ``[(shoulder, elbow), ...]`` in plane angles: the upper arm's
    direction from the shoulder-frame x axis, then the forearm's turn relative
    to the upper arm. Elbow-up comes first; both coincide when fully stretched.
    """
    t = planar_triangle(p14, a2, a3, d4)
    b1, phi, zeta, l1 = t["beta1"], t["phi"], t["zeta"], t["l1"]
    out = []
    for gamma in (phi - np.pi, np.pi - phi):
        # shoulder from exact closure rather than a second acos, so near full
        # stretch both angles share one rounding error
        shoulder = b1 - np.arctan2(l1 * np.sin(gamma), a2 + l1 * np.cos(gamma))
        out.append((float(shoulder), float(gamma - zeta)))
    return out


def _wrist_layout(chain):
    """Check the rows follow the yaw / planar pair / pitch / coaxial roll layout."""
    if chain.n != 6:
        raise NotWristPartitioned(f"need 6 joints, chain has {chain.n}")
    r = chain.rows

    def near(v, target):
        return abs(v - target) <= _STRUCT_TOL

    half = np.pi / 2
    ok = (near(r[0].a, 0) and near(abs(r[0].alpha), half)
          and near(r[1].d, 0) and (near(r[1].alpha, 0) or near(abs(r[1].alpha), np.pi))
          and near(r[2].d, 0) and near(r[2].alpha, 0)
          and near(r[3].a, 0) and near(r[3].d, 0) and near(abs(r[3].alpha), half)
          and near(r[4].a, 0) and near(r[4].alpha, 0)
          and near(r[5].a, 0) and near(r[5].alpha, 0))
    if not ok:
        raise NotWristPartitioned(f"chain {chain.name!r} does not match the arm layout")
    return {"a2": r[1].a, "a3": r[2].a, "tool": r[4].d + r[5].d,
            "elbow_sign": float(np.cos(r[1].alpha))}


def solve_wrist(theta123, target_rotation, chain, tol=1e-6, q5=0.0):
    """Wrist pitch and roll for a fixed arm placement.

    With the first three joints set, the remaining rotation must be
    ``Rz(pitch) Rx(±pi/2) Rz(roll)``. The angle between the joint-4 axis and
    the tool axis therefore has to match the fixed wrist twist; a mismatch
    beyond ``tol`` means the tool axis leaves the arm plane and the target
    orientation is out of reach. Joints 5 and 6 share the roll axis, so ``q5``
    is taken as given and joint 6 absorbs the rest. Returns ``[(q4, q5, q6)]``.
    """
    _wrist_layout(chain)
    rows = chain.rows
    T03 = np.eye(4)
    for row, qi in zip(rows[:3], theta123):
        T03 = T03 @ link_transform(row, qi)
    R36 = T03[:3, :3].T @ np.asarray(target_rotation, dtype=float)
    c = R36[:, 2] / np.linalg.norm(R36[:, 2])

    alpha4 = rows[3].alpha
    tilt = _safe_acos(float(c[2]), "wrist tilt")
    if abs(tilt - abs(alpha4)) > tol:
        raise Unreachable(
            f"tool axis is {tilt - abs(alpha4):+.3g} rad off the arm plane")
    s = np.sign(np.sin(alpha4))
    pitch = float(np.arctan2(s * c[0], -s * c[1]))
    M = (rot_z(pitch) @ rot_x(alpha4))[:3, :3].T @ R36
    roll = float(np.arctan2(M[1, 0] - M[0, 1], M[0, 0] + M[1, 1]))

    q4 = pitch - rows[3].theta_offset
    q5 = float(wrap_angle(q5))
    q6 = roll - rows[4].theta_offset - rows[5].theta_offset - q5
    return [(float(wrap_angle(q4)), q5, float(wrap_angle(q6)))]


def _validate_target(target):
    T = np.asarray(target, dtype=float)
    if T.shape != (4, 4) or not np.all(np.isfinite(T)):
        raise ValidationError("target must be a finite 4x4 matrix", field="target")
    if not np.allclose(T[3], [0, 0, 0, 1], atol=1e-12, rtol=0):
        raise ValidationError("target bottom row must be [0, 0, 0, 1]", field="target")
    R = T[:3, :3]
    if (np.abs(R.T @ R - np.eye(3)).max() > EXTERNAL_ROTATION_TOL
            or abs(np.linalg.det(R) - 1) > EXTERNAL_ROTATION_TOL):
        raise ValidationError("target rotation is not a proper rotation", field="target")
    return T


def analyze_ik(target, chain, tol=1e-6, q5=0.0):
    """Enumerate geometric IK branches and keep those reproducing ``target``.

    ``tol`` bounds the max-abs 4x4 pose residual of accepted solutions; the
    default suits exact targets, externally rounded poses need a looser value.
    """
    T = _validate_target(target)
    lay = _wrist_layout(chain)
    rows = chain.rows
    w = wrist_center(T, lay["tool"])
    report = IkReport(solutions=[])

    o1 = np.array([0.0, 0.0, rows[0].d])
    base_flags = set()
    try:
        yaws = solve_theta1(w - o1)
    except ShoulderSingularity:
        # any yaw keeps the wrist center in place; take the one that puts the
        # approach axis in the arm plane (or zero if it is vertical too)
        base_flags.add("SHOULDER_SINGULARITY")
        a = T[:3, 2]
        yaws = (solve_theta1(a) if a[0] ** 2 + a[1] ** 2 >= SHOULDER_AXIS_TOL
                else [0.0, float(np.pi)])
    seen = []
    for s_label, yaw in zip((SHOULDER_RIGHT, SHOULDER_LEFT), yaws):
        q1 = float(wrap_angle(yaw - rows[0].theta_offset))
        T01 = link_transform(rows[0], q1)
        p14 = (inverse(T01) @ np.append(w, 1.0))[:3]
        try:
            tri = planar_triangle(p14, lay["a2"], lay["a3"])
            pairs = solve_theta2_theta3(p14, lay["a2"], lay["a3"])
        except Unreachable:
            report.diagnostics.append(IkDiagnostics(wrist_center=w))
            continue
        report.diagnostics.append(IkDiagnostics(
            wrist_center=w, beta1=tri["beta1"], beta2=tri["beta2"],
            phi=tri["phi"], zeta=tri["zeta"], reachable=True))

        flags = set(base_flags)
        if abs(tri["phi"] - np.pi) < 1e-6 or tri["phi"] < 1e-6:
            flags.add("ELBOW_STRETCHED")
        if np.hypot(w[0], w[1]) < 1e-6:
            flags.add("SHOULDER_NEAR_AXIS")

        for e_label, (shoulder, elbow) in zip((ELBOW_UP, ELBOW_DOWN), pairs):
            q2 = shoulder - rows[1].theta_offset
            q3 = lay["elbow_sign"] * elbow - rows[2].theta_offset
            try:
                wrists = solve_wrist((q1, q2, q3), T[:3, :3], chain,
                                     tol=max(tol, 1e-9), q5=q5)
            except Unreachable:
                continue
            for q456 in wrists:
                q = tuple(float(v) for v in wrap_angle(np.array((q1, q2, q3) + q456)))
                if any(np.abs(wrap_angle(np.subtract(q, s))).max() < 1e-9 for s in seen):
                    continue
                seen.append(q)
                if not chain.within_limits(q):
                    report.rejected_by_limits += 1
                    continue
                res = pose_error_inf(forward_kinematics(chain, q), T)
                if res >= tol:
                    report.rejected_by_residual += 1
                    continue
                report.solutions.append(IkSolution(
                    q=q, branch=(s_label, e_label, WRIST_NOFLIP),
                    residual=res, flags=frozenset(flags)))
    if report.rejected_by_limits:
        log.debug("%d IK branches outside joint limits", report.rejected_by_limits)
    return report


def ik_geometric(target, chain, tol=1e-6, q5=0.0):
    """All closed-form solutions (at most 4 for this layout), best first.

    ``q5`` fixes the first of the two coaxial roll joints.

    Raises :class:`Unreachable` when no branch reproduces the target.
    """
    report = analyze_ik(target, chain, tol, q5)
    if not report.solutions:
        raise Unreachable("no IK branch reproduces the target pose")
    # residuals at rounding level tie, keeping the enumeration order
    return sorted(report.solutions, key=lambda s: max(s.residual, 1e-12))


def pose_twist_error(T, target):
    """Base-frame (linear, angular) error taking ``T`` toward ``target``."""
    dp = target[:3, 3] - T[:3, 3]
    dw = so3_log(target[:3, :3] @ T[:3, :3].T)
    return np.concatenate([dp, dw])


def ik_numeric(target, chain, seed, lam=1e-3, max_iter=200, tol=1e-10):
    """Levenberg-style damped least squares on the pose twist error.

    A step is accepted only if it lowers the max-abs pose residual; otherwise
    damping grows tenfold and the step is retried. Every attempt counts
    against ``max_iter``. On failure :class:`MaxIterations` carries the best
    iterate and the residual trace of accepted steps.
    """
    T_target = _validate_target(target)
    q = _check_q(chain, seed).copy()
    res = pose_error_inf(forward_kinematics(chain, q), T_target)
    trace = [res]
    accepted = 0

    def best():
        return IkSolution(q=tuple(q.tolist()), branch=("NUMERIC", "", ""),
                          residual=res, iterations=accepted)

    if res < tol:
        return best()
    for _ in range(max_iter):
        T = forward_kinematics(chain, q)
        e = pose_twist_error(T, T_target)
        J = geometric_jacobian(chain, q)
        H = J.T @ J
        dq = np.linalg.solve(H + lam * np.eye(chain.n), J.T @ e)
        q_new = q + dq
        res_new = pose_error_inf(forward_kinematics(chain, q_new), T_target)
        if not np.isfinite(res_new):
            raise Diverged("non-finite residual", best=best(), trace=trace)
        if res_new < res:
            q, res = q_new, res_new
            accepted += 1
            trace.append(res)
            lam = max(lam / 10.0, 1e-15)
            if res < tol:
                return best()
        else:
            lam *= 10.0
            if lam > 1e12:
                break
        if res > 10 * trace[0]:
            raise Diverged("residual grew tenfold", best=best(), trace=trace)
    raise MaxIterations(f"residual {res:.3g} after {accepted} accepted steps",
                        best=best(), trace=trace)
