"""Command-line front end.

Exit statuses: 0 success, 2 bad input (parse, validation, I/O), 3 no
solution (unreachable pose, out-of-range plant), 4 numerical failure.
"""

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .chain import forward_kinematics, reference_arm
from .diff_drive import REFERENCE_PARAMS, simulate
from .errors import (HosearmError, NoSolution, NumericalFailure, Unreachable,
                     ValidationError)
from .hydraulics import (HydraulicConfig, exit_velocity, flow_rate_gpm, jet_trajectory,
                         watering_time)
from .ik import analyze_ik, ik_numeric
from .io import emit_csv, load_bundled_chain, load_chain, load_pose, load_scenario
from .jacobian import finite_difference_jacobian, geometric_jacobian
from .linalg import make_transform, rotation_from_euler_zyz
from .planner import needs_watering, plan_watering

FD_CHECK_TOL = 1e-5


def _floats(text, name, count=None):
    try:
        vals = [float(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise ValidationError(f"--{name}: expected comma-separated numbers", field=name) from None
    if count is not None and len(vals) != count:
        raise ValidationError(f"--{name}: expected {count} values, got {len(vals)}", field=name)
    if not all(math.isfinite(v) for v in vals):
        raise ValidationError(f"--{name}: values must be finite", field=name)
    return vals


def _chain(path):
    if path is None:
        return load_bundled_chain()
    return load_chain(path)


def _dump(obj):
    print(json.dumps(obj, indent=2))


def _matrix_rows(M):
    return [[float(v) for v in row] for row in np.asarray(M)]


def cmd_fk(args):
    chain = _chain(args.chain)
    q = _floats(args.q, "q")
    T = forward_kinematics(chain, q)
    if args.csv:
        emit_csv(_matrix_rows(T), "-", ["c0", "c1", "c2", "c3"])
    elif args.json:
        _dump({"q": q, "position": T[:3, 3].tolist(), "rotation": _matrix_rows(T[:3, :3]),
               "matrix": _matrix_rows(T)})
    else:
        for row in T:
            print(" ".join(f"{v: .9g}" for v in row))
    return 0


def _target_pose(args):
    if args.pose:
        return load_pose(args.pose)
    x, y, z, e1, e2, e3 = _floats(args.xyzeuler, "xyzeuler", 6)
    return make_transform(rotation_from_euler_zyz((e1, e2, e3)), (x, y, z))


def _solution_record(s):
    return {"q": list(s.q), "branch": list(s.branch), "residual": s.residual,
            "flags": sorted(s.flags)}


def cmd_ik(args):
    chain = _chain(args.chain)
    T = _target_pose(args)
    if args.seed:
        seed = _floats(args.seed, "seed", chain.n)
        _dump(_solution_record(ik_numeric(T, chain, seed, tol=args.tol)))
        return 0
    report = analyze_ik(T, chain, tol=args.tol)
    if not report.solutions:
        raise Unreachable(
            f"no IK branch reproduces the pose within {args.tol:g}"
            f" ({report.rejected_by_limits} outside joint limits)")
    sols = sorted(report.solutions, key=lambda s: max(s.residual, 1e-12))
    if not args.all_branches:
        sols = sols[:1]
    _dump({"solutions": [_solution_record(s) for s in sols],
           "rejected_by_limits": report.rejected_by_limits})
    return 0


def cmd_jac(args):
    chain = _chain(args.chain)
    q = _floats(args.q, "q")
    J = geometric_jacobian(chain, q)
    out = {"jacobian": _matrix_rows(J)}
    status = 0
    if args.check_fd:
        err = float(np.abs(J - finite_difference_jacobian(chain, q)).max())
        out["fd_max_error"] = err
        if not err < FD_CHECK_TOL:
            status = NumericalFailure.exit_status
            print(f"{NumericalFailure.code}: FD mismatch {err:.3g}", file=sys.stderr)
    _dump(out)
    return status


def cmd_jet(args):
    cfg = HydraulicConfig(0.0, 1.0, args.psi, args.cd, nozzle_height_m=args.height)
    traj = jet_trajectory(cfg, math.radians(args.angle), args.samples)
    if args.csv:
        emit_csv(traj.samples, args.csv, ["x_m", "y_m"])
        if args.csv == "-":
            return 0
    _dump({"exit_velocity_fps": exit_velocity(args.psi, args.cd),
           "exit_velocity_mps": traj.exit_velocity,
           "launch_angle_rad": traj.launch_angle, "height_m": args.height,
           "impact_x_m": traj.impact_x})
    return 0


def cmd_flow(args):
    q = flow_rate_gpm(args.diameter_in, args.psi, args.length_ft)
    out = {"flow_gpm": q}
    if args.volume_gal is not None:
        out["time_min"] = watering_time(args.volume_gal, q)
    _dump(out)
    return 0


def cmd_drive(args):
    sc = load_scenario(args.scenario)
    params = sc.vehicle or REFERENCE_PARAMS
    traj = simulate(params, sc.torque_profile, args.t_end, args.dt, sc.initial_state)
    emit_csv([(t, *x) for t, x in traj], args.out, ["t", "beta", "gamma", "delta_f"])
    return 0


PLAN_COLUMNS = ["name", "status", "distance_m", "mode", "nozzle_angle_rad",
                "water_time_min", "nozzle_height_m", "q1", "q2", "q3", "q4", "q5", "q6"]


def _plan_one(plant, sc, chain):
    base = {"name": plant.name, "distance_m": plant.distance_m, "mode": plant.mode.value}
    if (plant.moisture is not None and sc.moisture_threshold is not None
            and not needs_watering(plant.moisture, sc.moisture_threshold)):
        return dict(base, status="SKIP_MOIST"), 0
    try:
        p = plan_watering(plant.distance_m, plant.volume_gal, chain, sc.base_height_m,
                          sc.hydraulics, plant.mode)
    except NoSolution as exc:
        return dict(base, status=exc.code), exc.exit_status
    rec = dict(base, status="OK", nozzle_angle_rad=p.nozzle_angle,
               water_time_min=p.water_time, nozzle_height_m=p.nozzle_height)
    rec.update({f"q{i + 1}": v for i, v in enumerate(p.joints)})
    return rec, 0


def cmd_plan(args):
    sc = load_scenario(args.scenario)
    if sc.hydraulics is None:
        raise ValidationError("plan scenario needs a hydraulics section", field="hydraulics")
    chain = sc.chain or reference_arm()
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda pl: _plan_one(pl, sc, chain), sc.plants))
    rows = [{c: r.get(c) for c in PLAN_COLUMNS} for r, _ in results]
    emit_csv(rows, args.out, PLAN_COLUMNS)
    return max((code for _, code in results), default=0)


def build_parser():
    ver = f"hosearm {__version__}"
    parser = argparse.ArgumentParser(prog="hosearm", description="Watering-arm kinematics, "
                                     "jet hydraulics and drive dynamics.")
    parser.add_argument("--version", action="version", version=ver)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, helptext, fn):
        p = sub.add_parser(name, help=helptext, description=helptext)
        p.add_argument("--version", action="version", version=ver)
        p.set_defaults(func=fn)
        return p

    p = add("fk", "forward kinematics at a joint vector", cmd_fk)
    p.add_argument("--chain", help="chain JSON (default: bundled arm)")
    p.add_argument("--q", required=True, help="comma-separated joint angles, rad")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")

    p = add("ik", "inverse kinematics for a tip pose", cmd_ik)
    p.add_argument("--chain")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--pose", help="JSON file holding a 4x4 matrix")
    src.add_argument("--xyzeuler", help="x,y,z (m), then ZYZ Euler angles (rad)")
    p.add_argument("--all-branches", action="store_true")
    p.add_argument("--tol", type=float, default=1e-6, help="max-abs pose residual")
    p.add_argument("--seed", help="comma-separated seed; switches to the iterative solver")

    p = add("jac", "geometric Jacobian at a joint vector", cmd_jac)
    p.add_argument("--chain")
    p.add_argument("--q", required=True)
    p.add_argument("--check-fd", action="store_true",
                   help="compare with central differences")

    p = add("jet", "water jet from nozzle pressure and angle", cmd_jet)
    p.add_argument("--psi", type=float, required=True)
    p.add_argument("--cd", type=float, required=True)
    p.add_argument("--height", type=float, default=0.0, help="nozzle height, m")
    p.add_argument("--angle", type=float, required=True, metavar="DEG",
                   help="launch angle in degrees")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--csv", metavar="PATH", help="write x_m,y_m samples ('-' for stdout)")

    p = add("flow", "hose flow rate and watering time", cmd_flow)
    p.add_argument("--diameter-in", type=float, required=True)
    p.add_argument("--psi", type=float, required=True)
    p.add_argument("--length-ft", type=float, required=True)
    p.add_argument("--volume-gal", type=float)

    p = add("drive", "simulate the steering dynamics", cmd_drive)
    p.add_argument("--scenario", required=True)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--out", default="-", help="CSV path ('-' for stdout)")

    p = add("plan", "plan watering for each plant in a scenario", cmd_plan)
    p.add_argument("--scenario", required=True)
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.add_argument("--out", default="-")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HosearmError as exc:
        print(str(exc), file=sys.stderr)
        return exc.exit_status
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(f"{NumericalFailure.code}: {exc}", file=sys.stderr)
        return NumericalFailure.exit_status
    except OSError as exc:
        print(f"IO_ERROR: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
