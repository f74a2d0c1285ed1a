"""Kinematics, jet hydraulics and drive dynamics for a hose-holding watering robot."""

__version__ = "0.1.0"

from .chain import (DhRow, KinematicChain, forward_kinematics, intermediate_frames,
                    link_transform, make_chain, reference_arm)
from .diff_drive import (REFERENCE_PARAMS, StateMatrices, VehicleParams, VehicleState,
                         build_state_matrices, simulate, steering_terms, step_rk4,
                         tire_forces)
from .errors import HosearmError
from .hydraulics import (EnergyHeads, HydraulicConfig, JetTrajectory,
                         energy_balance_residual, exit_velocity, flow_rate_gpm,
                         jet_trajectory, projectile_range, solve_energy_unknown,
                         watering_time)
from .ik import IkSolution, analyze_ik, ik_geometric, ik_numeric
from .jacobian import finite_difference_jacobian, geometric_jacobian
from .planner import WateringMode, WateringPlan, max_watering_reach, plan_watering
from .symbolic import verify_symbolic_elements
