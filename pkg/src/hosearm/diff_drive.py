"""Linear lateral/yaw/steer model of a differential-steering vehicle.

State ``x = [beta, gamma, delta_f]`` (sideslip, yaw rate, front steer angle),
input ``u = dM`` (left/right drive-torque difference). The plant is
``x' = A x + B u`` with A and B assembled entry by entry below.

The A matrix is stable only when cornering stiffnesses are negative (force
opposing slip); see ``REFERENCE_PARAMS``.
"""

import bisect
import math
from dataclasses import asdict, dataclass, fields
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .errors import UnsortedProfile, ValidationError

MAX_DT = 0.1


@dataclass(frozen=True)
class VehicleParams:
    m: float
    u_x: float
    I_z: float
    l_s: float
    R: float
    l_f: float
    l_r: float
    k_f: float
    k_r: float
    J_e: float
    b_e: float
    r_sigma: float
    l: float
    tau_f: float

    def __post_init__(self):
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise ValidationError(f"{f.name} must be finite", field=f.name)
        for name in ("m", "u_x", "I_z", "R", "b_e"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive", field=name)

    def as_dict(self):
        return asdict(self)


# Small field robot: chassis plus two full 18 L tanks. Cornering stiffnesses
# are negative; with positive values the same geometry has an unstable mode.
REFERENCE_PARAMS = VehicleParams(
    m=60.0, u_x=1.0, I_z=2.5, l_s=0.15, R=0.065, l_f=0.25, l_r=0.15,
    k_f=-400.0, k_r=-800.0, J_e=0.05, b_e=0.5, r_sigma=0.02, l=0.03, tau_f=0.1,
)


class VehicleState(NamedTuple):
    beta: float = 0.0
    gamma: float = 0.0
    delta_f: float = 0.0

    def as_array(self):
        return np.array(self, dtype=float)

    @classmethod
    def from_array(cls, x):
        return cls(*(float(v) for v in x))


@dataclass(frozen=True)
class StateMatrices:
    A: np.ndarray
    B: np.ndarray


def build_state_matrices(p):
    kf, kr, lf, lr = p.k_f, p.k_r, p.l_f, p.l_r
    m, ux, Iz, be, l2 = p.m, p.u_x, p.I_z, p.b_e, p.l * p.l
    A = np.array([
        [(2 * kf + 2 * kr) / (m * ux),
         (2 * kf * lf - 2 * kr * lr) / (m * ux * ux) - 1.0,
         2 * kf / (m * ux)],
        [(2 * kf * lf - 2 * kr * lr) / Iz,
         (2 * kf * lf * lf - 2 * kr * lr * lr) / (Iz * ux),
         -2 * kf * lf / Iz],
        # beta enters with l^2/2 while the other two slip terms carry l^2/3;
        # kept as assembled in the source model
        [kf * l2 / (2 * be),
         kf * l2 * lf / (3 * be * ux),
         -kf * l2 / (3 * be)],
    ])
    B = np.array([0.0, p.l_s / (Iz * p.R), p.r_sigma / (p.R * be)])
    return StateMatrices(A=A, B=B)


def slip_angle_front(x, p):
    beta, gamma, delta = x
    return beta + p.l_f * gamma / p.u_x - delta


def tire_forces(x, p):
    """Per-wheel lateral forces ``(F_yf, F_yr)`` in newtons."""
    beta, gamma, _ = x
    return (p.k_f * slip_angle_front(x, p), p.k_r * (beta - p.l_r * gamma / p.u_x))


def steering_terms(x, p):
    """Front slip angle and the tire self-aligning torque it produces."""
    alpha_f = slip_angle_front(x, p)
    return alpha_f, p.k_f * alpha_f * p.l * p.l / 3.0


def _deriv(mats, x, u):
    return mats.A @ x + mats.B * u


def step_rk4(mats, x, u, dt):
    """One classical Runge-Kutta step with ``u`` held constant."""
    if not 0 < dt <= MAX_DT:
        raise ValidationError(f"dt must lie in (0, {MAX_DT}]", field="dt")
    xa = np.asarray(x, dtype=float)
    k1 = _deriv(mats, xa, u)
    k2 = _deriv(mats, xa + 0.5 * dt * k1, u)
    k3 = _deriv(mats, xa + 0.5 * dt * k2, u)
    k4 = _deriv(mats, xa + dt * k3, u)
    return VehicleState.from_array(xa + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))


def torque_at(profile, t):
    """Zero-order hold: the last breakpoint value at or before ``t`` (0 before the first)."""
    times = [bp[0] for bp in profile]
    i = bisect.bisect_right(times, t + 1e-12) - 1
    return float(profile[i][1]) if i >= 0 else 0.0


def step_count(t_end, dt):
    return int(math.floor(t_end / dt + 1e-9))


def simulate(p, torque_profile: Sequence[Tuple[float, float]], t_end, dt,
             x0=VehicleState()) -> List[Tuple[float, VehicleState]]:
    """Integrate from ``x0``; returns ``floor(t_end/dt) + 1`` samples starting at t = 0."""
    profile = [(float(t), float(u)) for t, u in torque_profile]
    if any(b[0] < a[0] for a, b in zip(profile, profile[1:])):
        raise UnsortedProfile("torque profile times must be nondecreasing",
                              field="torque_profile")
    if not dt > 0:
        raise ValidationError("dt must be positive", field="dt")
    if t_end < 0:
        raise ValidationError("t_end must be >= 0", field="t_end")
    mats = build_state_matrices(p)
    x = VehicleState(*x0)
    out = [(0.0, x)]
    for k in range(step_count(t_end, dt)):
        t = k * dt
        x = step_rk4(mats, x, torque_at(profile, t), dt)
        out.append(((k + 1) * dt, x))
    return out


def steady_state(mats, u):
    """Equilibrium ``-A^-1 B u`` for a constant input."""
    return -np.linalg.solve(mats.A, mats.B * u)


def eigenvalue_report(p=REFERENCE_PARAMS):
    ev = np.linalg.eigvals(build_state_matrices(p).A)
    ev = sorted(ev, key=lambda z: (z.real, z.imag))
    return {
        "eigenvalues": [[float(z.real), float(z.imag)] for z in ev],
        "max_real_part": float(max(z.real for z in ev)),
        "stable": bool(max(z.real for z in ev) < 0),
    }
