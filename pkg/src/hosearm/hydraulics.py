"""Hose flow, nozzle exit speed, jet ballistics and the head balance.

Flow and nozzle formulas work in US units (inches, feet, PSI, gallons per
minute, ft/s). Ballistics work in SI. The only ft->m conversion happens in
:func:`jet_trajectory`.

The flow law is the power form ``Q = (1946.6 D^1.857 P / L)^0.54`` as used by
the watering-robot design, not the textbook Hazen-Williams exponents.
"""

import math
from dataclasses import dataclass, fields, replace
from typing import Tuple

import numpy as np

from .errors import (NoRealSolution, NonpositiveLength, ValidationError,
                     VerticalJet, ZeroFlow)

FT_TO_M = 0.3048
G_DEFAULT = 9.8
VERTICAL_COS_TOL = 1e-9


@dataclass(frozen=True)
class HydraulicConfig:
    hose_diameter_in: float
    hose_length_ft: float
    pressure_psi: float
    discharge_coefficient: float
    nozzle_height_m: float = 0.0
    gravity: float = G_DEFAULT

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValidationError(f"{f.name} must be finite", field=f.name)
        for name in ("hose_diameter_in", "hose_length_ft", "pressure_psi"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0", field=name)
        if not 0 < self.discharge_coefficient <= 1:
            raise ValidationError("discharge coefficient must lie in (0, 1]",
                                  field="discharge_coefficient")
        if self.gravity <= 0:
            raise ValidationError("gravity must be positive", field="gravity")

    @property
    def exit_speed_mps(self):
        return exit_velocity(self.pressure_psi, self.discharge_coefficient) * FT_TO_M

    def flow_gpm(self):
        return flow_rate_gpm(self.hose_diameter_in, self.pressure_psi, self.hose_length_ft)


@dataclass(frozen=True)
class JetTrajectory:
    launch_angle: float
    exit_velocity: float
    samples: Tuple[Tuple[float, float], ...]
    impact_x: float


def flow_rate_gpm(D, P, L):
    """Hose flow in gallons per minute from diameter (in), pressure (PSI), length (ft)."""
    if L <= 0:
        raise NonpositiveLength(f"hose length must be positive, got {L}", field="L")
    if D < 0 or P < 0:
        raise ValidationError("diameter and pressure must be >= 0",
                              field="D" if D < 0 else "P")
    return (1946.6 * D ** 1.857 * P / L) ** 0.54


def watering_time(volume, q):
    """Minutes to deliver ``volume`` gallons at ``q`` GPM."""
    if not q > 0:
        raise ZeroFlow(f"flow must be positive, got {q}", field="q")
    if volume < 0:
        raise ValidationError("volume must be >= 0", field="volume")
    return volume / q


def exit_velocity(psi, cd):
    """Nozzle exit speed in ft/s, ``sqrt(2 psi) / cd``."""
    if psi < 0:
        raise ValidationError("pressure must be >= 0", field="psi")
    if not 0 < cd <= 1:
        raise ValidationError("discharge coefficient must lie in (0, 1]", field="cd")
    return math.sqrt(2.0 * psi) / cd


def projectile_range(v, theta, g=G_DEFAULT):
    """Level-ground range of a projectile launched at speed ``v`` and angle ``theta``."""
    if v < 0 or g <= 0:
        raise ValidationError("need v >= 0 and g > 0", field="v" if v < 0 else "g")
    return v * v * math.sin(2.0 * theta) / g


def jet_impact_distance(v, theta, H, g=G_DEFAULT):
    """Horizontal distance at which a jet launched from height ``H`` reaches y = 0.

    Written in the cancellation-free form of the positive quadratic root.
    """
    c = math.cos(theta)
    if abs(c) < VERTICAL_COS_TOL:
        raise VerticalJet("launch direction is vertical", field="theta")
    if H < 0:
        raise ValidationError("launch height must be >= 0", field="H")
    vx, vy = v * c, v * math.sin(theta)
    if vx == 0.0:
        return 0.0
    disc = math.sqrt(vy * vy + 2.0 * g * H)
    if vy >= 0:
        return vx * (vy + disc) / g
    # descending jet: same root, rationalized to avoid subtracting near-equals
    return 2.0 * vx * H / (disc - vy)


def jet_height(x, v, theta, H, g=G_DEFAULT):
    """Jet parabola ``y(x)``; ``v`` in m/s."""
    c = math.cos(theta)
    vx, vy = v * c, v * math.sin(theta)
    return H + x * (vy / vx) - x * x * (g / (2.0 * vx * vx))


def jet_trajectory(cfg, theta, n_samples=50):
    """Sample the water arc from the nozzle to ground impact.

    The exit speed is converted from ft/s to m/s here. Samples are evenly
    spaced in x from 0 to the impact point, inclusive.
    """
    if n_samples < 2:
        raise ValidationError("need at least 2 samples", field="n_samples")
    if not -math.pi / 2 < theta < math.pi / 2:
        if abs(math.cos(theta)) < VERTICAL_COS_TOL:
            raise VerticalJet("launch direction is vertical", field="theta")
        raise ValidationError("launch angle must lie in (-pi/2, pi/2)", field="theta")
    v = cfg.exit_speed_mps
    if not v > 0:
        raise ValidationError("exit velocity must be positive", field="pressure_psi")
    H, g = cfg.nozzle_height_m, cfg.gravity
    x_end = jet_impact_distance(v, theta, H, g)
    xs = np.linspace(0.0, x_end, int(n_samples))
    samples = tuple((float(x), float(jet_height(x, v, theta, H, g))) for x in xs)
    return JetTrajectory(launch_angle=float(theta), exit_velocity=v,
                         samples=samples, impact_x=x_end)


@dataclass(frozen=True)
class EnergyHeads:
    """Both ends of a pipe run plus pump, motor and friction heads (SI)."""

    p1: float = 0.0
    p2: float = 0.0
    z1: float = 0.0
    z2: float = 0.0
    v1: float = 0.0
    v2: float = 0.0
    h_A: float = 0.0
    h_R: float = 0.0
    h_L: float = 0.0
    rho: float = 1000.0
    g: float = G_DEFAULT

    def __post_init__(self):
        if not (self.rho > 0 and self.g > 0):
            raise ValidationError("rho and g must be positive",
                                  field="rho" if not self.rho > 0 else "g")
        for name in ("h_A", "h_R", "h_L"):
            v = getattr(self, name)
            if v < 0:
                raise ValidationError(f"{name} must be >= 0", field=name)


SOLVABLE_FIELDS = ("p1", "p2", "z1", "z2", "v1", "v2", "h_A", "h_R", "h_L")


def energy_balance_residual(h):
    """Upstream head plus added head minus removed and lost head minus downstream head."""
    rg = h.rho * h.g
    upstream = h.p1 / rg + h.z1 + h.v1 ** 2 / (2 * h.g)
    downstream = h.p2 / rg + h.z2 + h.v2 ** 2 / (2 * h.g)
    return upstream + h.h_A - h.h_R - h.h_L - downstream


def solve_energy_unknown(h, unknown):
    """Value of field ``unknown`` that closes the head balance.

    The current value of ``unknown`` in ``h`` is ignored. Speeds take the
    nonnegative root. Raises :class:`NoRealSolution` when the balance needs a
    negative squared speed or a negative pump, motor or friction head.
    """
    if unknown not in SOLVABLE_FIELDS:
        raise ValidationError(f"cannot solve for {unknown!r}", field="unknown")
    base = replace(h, **{unknown: 0.0})
    r0 = energy_balance_residual(base)  # residual with the unknown zeroed
    rg, two_g = h.rho * h.g, 2.0 * h.g
    if unknown == "p1":
        return -r0 * rg
    if unknown == "p2":
        return r0 * rg
    if unknown == "z1":
        return -r0
    if unknown == "z2":
        return r0
    if unknown in ("v1", "v2"):
        sq = (-r0 if unknown == "v1" else r0) * two_g
        if sq < 0:
            if sq > -1e-12:
                return 0.0
            raise NoRealSolution(f"{unknown} would need v^2 = {sq:.6g}", field=unknown)
        return math.sqrt(sq)
    value = -r0 if unknown == "h_A" else r0
    if value < 0:
        raise NoRealSolution(f"{unknown} would be negative ({value:.6g} m)", field=unknown)
    return value
