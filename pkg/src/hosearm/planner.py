"""Watering plans: where to point the nozzle, which joints get it there, how long to run.

The arm faces the plant along base +x. In jet mode the wrist center is held
at a fixed spot in that vertical plane (by default straight above the
shoulder with the arm fully raised) and only the wrist pitch changes the
launch angle. The nozzle tip sits one tool length from the wrist center along
the launch direction, so both the launch point and its height move with the
angle. The reach curve ``D(theta) = tip_x + impact(theta, base + tip_z)``
is solved for the requested plant distance.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .chain import forward_kinematics
from .errors import NoSolution, OutOfRange, UnreachablePose, ValidationError
from .hydraulics import jet_impact_distance, jet_trajectory, watering_time
from .ik import _wrist_layout, ik_geometric
from .linalg import make_transform

ANGLE_MARGIN = 1e-6
REACH_SLACK = 1e-9


class WateringMode(str, Enum):
    JET_SPRAY = "JET_SPRAY"
    POUR_TUBE = "POUR_TUBE"


@dataclass(frozen=True)
class WateringPlan:
    standoff_x: float
    nozzle_angle: float
    nozzle_pose: np.ndarray
    joints: tuple
    water_time: float
    mode: WateringMode
    nozzle_height: float = 0.0
    launch_x: float = 0.0


def needs_watering(moisture, threshold):
    """Soil-probe rule: water when the reading is below the threshold."""
    return moisture < threshold


def _arm_geometry(chain):
    lay = _wrist_layout(chain)
    return lay["tool"], chain.rows[0].d, lay["a2"] + lay["a3"]


def default_wrist_center(chain):
    """(horizontal offset, height) of the wrist center with the arm pointing straight up."""
    _, shoulder_z, reach = _arm_geometry(chain)
    return 0.0, shoulder_z + reach


def nozzle_pose(theta, wrist_xz, tool):
    """Tip pose: approach axis along the launch direction in the x-z plane."""
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[s, 0.0, c], [0.0, 1.0, 0.0], [-c, 0.0, s]])
    tip = (wrist_xz[0] + tool * c, 0.0, wrist_xz[1] + tool * s)
    return make_transform(R, tip)


def _reach_fn(chain, base_height, cfg, wrist_xz):
    tool = _arm_geometry(chain)[0]
    v, g = cfg.exit_speed_mps, cfg.gravity

    def reach(theta):
        tip_x = wrist_xz[0] + tool * math.cos(theta)
        H = base_height + wrist_xz[1] + tool * math.sin(theta)
        return tip_x + jet_impact_distance(v, theta, H, g)

    return reach


def _best_angle(reach):
    lo, hi = -math.pi / 2 + ANGLE_MARGIN, math.pi / 2 - ANGLE_MARGIN
    res = minimize_scalar(lambda t: -reach(t), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x), float(-res.fun)


def _check_inputs(base_height, cfg):
    if not math.isfinite(base_height) or base_height < 0:
        raise ValidationError("base height must be >= 0", field="base_height")
    if not cfg.exit_speed_mps > 0:
        raise ValidationError("jet planning needs positive pressure", field="pressure_psi")


def max_watering_reach(chain, base_height, cfg, wrist_xz=None):
    """Farthest plant distance the jet can hit from the given wrist placement.

    The best launch angle is found numerically. It is 45 degrees only when
    the launch height is zero; any height tilts the optimum lower.
    """
    _check_inputs(base_height, cfg)
    wrist_xz = wrist_xz or default_wrist_center(chain)
    return _best_angle(_reach_fn(chain, base_height, cfg, wrist_xz))[1]


def _solve_pose(chain, pose):
    try:
        sols = ik_geometric(pose, chain)
    except NoSolution as exc:
        raise UnreachablePose(f"nozzle pose not reachable ({exc})") from exc
    return sols[0].q


def plan_watering(plant_distance, plant_volume, chain, base_height, cfg,
                  mode=WateringMode.JET_SPRAY, steep=False, wrist_xz=None):
    """Build a watering plan for a plant ``plant_distance`` metres ahead.

    Jet mode returns the flatter of the two angles hitting the plant unless
    ``steep`` is set. Pour mode places the wrist center above the plant at
    shoulder height and points the nozzle straight down.
    """
    mode = WateringMode(mode)
    if not (math.isfinite(plant_distance) and plant_distance > 0):
        raise ValidationError("plant distance must be positive", field="plant_distance")
    if not (math.isfinite(plant_volume) and plant_volume >= 0):
        raise ValidationError("plant volume must be >= 0", field="plant_volume")
    minutes = watering_time(plant_volume, cfg.flow_gpm())
    tool, shoulder_z, _ = _arm_geometry(chain)

    if mode is WateringMode.POUR_TUBE:
        theta = -math.pi / 2
        pose = nozzle_pose(theta, (plant_distance, shoulder_z), tool)
        q = _solve_pose(chain, pose)
        return WateringPlan(plant_distance, theta, pose, q, minutes, mode,
                            nozzle_height=base_height + pose[2, 3],
                            launch_x=plant_distance)

    _check_inputs(base_height, cfg)
    wrist_xz = wrist_xz or default_wrist_center(chain)
    reach = _reach_fn(chain, base_height, cfg, wrist_xz)
    theta_best, d_max = _best_angle(reach)
    if plant_distance > d_max + REACH_SLACK:
        raise OutOfRange(f"plant at {plant_distance:.6g} m, jet reaches {d_max:.6g} m")

    if plant_distance >= d_max:
        theta = theta_best
    else:
        lo, hi = ((theta_best, math.pi / 2 - ANGLE_MARGIN) if steep
                  else (-math.pi / 2 + ANGLE_MARGIN, theta_best))
        f = lambda t: reach(t) - plant_distance
        if f(lo) * f(hi) > 0:
            raise OutOfRange(f"plant at {plant_distance:.6g} m is inside the minimum jet reach")
        theta = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)

    pose = nozzle_pose(theta, wrist_xz, tool)
    q = _solve_pose(chain, pose)
    tip = forward_kinematics(chain, q)[:3, 3]
    return WateringPlan(plant_distance, float(theta), pose, q, minutes, mode,
                        nozzle_height=base_height + float(tip[2]),
                        launch_x=float(tip[0]))


def simulate_plan(plan, cfg, n_samples=50):
    """Re-fly the jet of a jet-mode plan; returns the absolute impact x."""
    traj = jet_trajectory(replace(cfg, nozzle_height_m=plan.nozzle_height),
                          plan.nozzle_angle, n_samples)
    return plan.launch_x + traj.impact_x
