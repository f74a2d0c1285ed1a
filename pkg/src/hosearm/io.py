"""Chain and scenario files (strict JSON) and CSV output.

Chain files::

    {"name": "...",
     "rows": [{"theta_offset_rad": 0, "alpha_rad": 1.57, "d_m": 0.1, "a_m": 0}, ...],
     "joint_limits_rad": [[-3.14, 3.14], ...]}

Unknown keys are a parse error; values that break a chain invariant are a
validation error naming the field. Scenario layout is documented in
``docs/scenario_schema.md``.
"""

import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from .chain import KinematicChain, make_chain
from .diff_drive import VehicleParams, VehicleState
from .errors import IoFailure, LengthMismatch, ParseError, ValidationError
from .hydraulics import HydraulicConfig
from .planner import WateringMode

CHAIN_KEYS = ("name", "rows", "joint_limits_rad")
ROW_KEYS = ("theta_offset_rad", "alpha_rad", "d_m", "a_m")
CSV_DIGITS = 9


def fmt17(x):
    """17 significant digits (trailing zeros dropped); always reads back exactly."""
    x = float(x)
    if x == 0.0 and math.copysign(1.0, x) < 0:
        return "-0.0"  # "-0" would read back as integer zero
    return format(x, ".17g")


def _read_text(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}", field="path") from exc


def parse_json(text, source="<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _expect_keys(obj, allowed, where, required=None):
    if not isinstance(obj, dict):
        raise ParseError(f"{where} must be a JSON object")
    unknown = [k for k in obj if k not in allowed]
    if unknown:
        raise ParseError(f"unknown key {unknown[0]!r} in {where}", field=unknown[0])
    for k in (allowed if required is None else required):
        if k not in obj:
            raise ValidationError(f"missing key {k!r} in {where}", field=k)


def _number(v, name):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{name} must be a number", field=name)
    if not math.isfinite(v):
        raise ValidationError(f"{name} must be finite", field=name)
    return float(v)


def chain_from_dict(doc):
    _expect_keys(doc, CHAIN_KEYS, "chain", required=("name", "rows"))
    if not isinstance(doc["name"], str):
        raise ValidationError("name must be a string", field="name")
    rows_in = doc["rows"]
    if not isinstance(rows_in, list):
        raise ValidationError("rows must be a list", field="rows")
    rows = []
    for i, r in enumerate(rows_in):
        _expect_keys(r, ROW_KEYS, f"rows[{i}]")
        rows.append(tuple(_number(r[k], k) for k in ROW_KEYS))
    limits = doc.get("joint_limits_rad", [])
    if not isinstance(limits, list) or any(
            not isinstance(p, list) or len(p) != 2 for p in limits):
        raise ValidationError("joint_limits_rad must be a list of [lo, hi]",
                              field="joint_limits_rad")
    limits = [tuple(_number(v, "joint_limits_rad") for v in p) for p in limits]
    return make_chain(doc["name"], rows, limits)


def chain_to_text(chain):
    """Deterministic JSON text with every float at 17 significant digits."""
    rows = ",\n".join(
        "    {" + ", ".join(f'"{k}": {fmt17(getattr(r, a))}' for k, a in
                           zip(ROW_KEYS, ("theta_offset", "alpha", "d", "a"))) + "}"
        for r in chain.rows)
    limits = ",\n".join(f"    [{fmt17(lo)}, {fmt17(hi)}]" for lo, hi in chain.joint_limits)
    return (f'{{\n  "name": {json.dumps(chain.name)},\n  "rows": [\n{rows}\n  ],\n'
            f'  "joint_limits_rad": [\n{limits}\n  ]\n}}\n')


def load_chain(path):
    return chain_from_dict(parse_json(_read_text(path), str(path)))


def save_chain(chain, path):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(chain_to_text(chain))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc.strerror or exc}", field="path") from exc


def bundled_path(name):
    return resources.files("hosearm") / "data" / name


def load_bundled_chain(name="reference_arm.json"):
    return chain_from_dict(parse_json(bundled_path(name).read_text(encoding="utf-8"), name))


# ---------------------------------------------------------------- scenarios

VEHICLE_KEYS = {
    "m_kg": "m", "u_x_mps": "u_x", "I_z_kgm2": "I_z", "l_s_m": "l_s", "R_m": "R",
    "l_f_m": "l_f", "l_r_m": "l_r", "k_f_npr": "k_f", "k_r_npr": "k_r",
    "J_e_kgm2": "J_e", "b_e_nms": "b_e", "r_sigma_m": "r_sigma", "l_m": "l",
    "tau_f_nm": "tau_f",
}
STATE_KEYS = {"beta_rad": "beta", "gamma_radps": "gamma", "delta_f_rad": "delta_f"}
HYDRAULIC_KEYS = {
    "hose_diameter_in": "hose_diameter_in", "hose_length_ft": "hose_length_ft",
    "pressure_psi": "pressure_psi", "discharge_coefficient": "discharge_coefficient",
    "gravity_mps2": "gravity",
}
PLANT_KEYS = ("name", "distance_m", "volume_gal", "mode", "moisture")
SCENARIO_KEYS = ("chain", "vehicle", "initial_state", "torque_profile_s_nm",
                 "hydraulics", "base_height_m", "moisture_threshold", "plants")


@dataclass
class PlantTarget:
    name: str
    distance_m: float
    volume_gal: float
    mode: WateringMode = WateringMode.JET_SPRAY
    moisture: Optional[float] = None


@dataclass
class Scenario:
    chain: Optional[KinematicChain] = None
    vehicle: Optional[VehicleParams] = None
    initial_state: VehicleState = VehicleState()
    torque_profile: List[Tuple[float, float]] = field(default_factory=list)
    hydraulics: Optional[HydraulicConfig] = None
    base_height_m: float = 0.0
    moisture_threshold: Optional[float] = None
    plants: List[PlantTarget] = field(default_factory=list)


def _mapped(obj, keymap, where, optional=()):
    _expect_keys(obj, tuple(keymap), where,
                 required=tuple(k for k in keymap if k not in optional))
    return {keymap[k]: _number(v, k) for k, v in obj.items()}


def _plant(obj, i):
    _expect_keys(obj, PLANT_KEYS, f"plants[{i}]", required=("distance_m", "volume_gal"))
    name = obj.get("name", f"plant{i}")
    if not isinstance(name, str):
        raise ValidationError("plant name must be a string", field="name")
    try:
        mode = WateringMode(obj.get("mode", "JET_SPRAY"))
    except ValueError:
        raise ValidationError(f"unknown mode {obj.get('mode')!r}", field="mode") from None
    moisture = obj.get("moisture")
    return PlantTarget(name, _number(obj["distance_m"], "distance_m"),
                       _number(obj["volume_gal"], "volume_gal"), mode,
                       None if moisture is None else _number(moisture, "moisture"))


def scenario_from_dict(doc, base_dir="."):
    _expect_keys(doc, SCENARIO_KEYS, "scenario", required=())
    sc = Scenario()
    if "chain" in doc:
        ref = doc["chain"]
        if isinstance(ref, str):
            sc.chain = load_chain(os.path.join(base_dir, ref))
        else:
            sc.chain = chain_from_dict(ref)
    if "vehicle" in doc:
        sc.vehicle = VehicleParams(**_mapped(doc["vehicle"], VEHICLE_KEYS, "vehicle"))
    if "initial_state" in doc:
        sc.initial_state = VehicleState(**_mapped(doc["initial_state"], STATE_KEYS,
                                                  "initial_state", optional=tuple(STATE_KEYS)))
    if "torque_profile_s_nm" in doc:
        prof = doc["torque_profile_s_nm"]
        if not isinstance(prof, list) or any(
                not isinstance(p, list) or len(p) != 2 for p in prof):
            raise ValidationError("torque_profile_s_nm must be a list of [t, dM]",
                                  field="torque_profile_s_nm")
        sc.torque_profile = [(_number(t, "torque_profile_s_nm"),
                              _number(u, "torque_profile_s_nm")) for t, u in prof]
    if "hydraulics" in doc:
        sc.hydraulics = HydraulicConfig(**_mapped(doc["hydraulics"], HYDRAULIC_KEYS,
                                                  "hydraulics", optional=("gravity_mps2",)))
    if "base_height_m" in doc:
        sc.base_height_m = _number(doc["base_height_m"], "base_height_m")
    if "moisture_threshold" in doc:
        sc.moisture_threshold = _number(doc["moisture_threshold"], "moisture_threshold")
    if "plants" in doc:
        if not isinstance(doc["plants"], list):
            raise ValidationError("plants must be a list", field="plants")
        sc.plants = [_plant(p, i) for i, p in enumerate(doc["plants"])]
    return sc


def load_scenario(path):
    return scenario_from_dict(parse_json(_read_text(path), str(path)),
                              base_dir=os.path.dirname(os.path.abspath(path)))


def load_pose(path):
    """4x4 pose from JSON: either a bare nested list or ``{"matrix": [...]}``."""
    doc = parse_json(_read_text(path), str(path))
    if isinstance(doc, dict):
        _expect_keys(doc, ("matrix",), "pose")
        doc = doc["matrix"]
    if (not isinstance(doc, list) or len(doc) != 4
            or any(not isinstance(r, list) or len(r) != 4 for r in doc)):
        raise ValidationError("pose must be a 4x4 nested list", field="matrix")
    return np.array([[_number(v, "matrix") for v in r] for r in doc])


# ---------------------------------------------------------------- CSV

def format_cell(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        return "" if v is None else str(v)
    return format(float(v), f".{CSV_DIGITS}g")


def write_csv(records: Sequence[Any], columns: Sequence[str], stream):
    """Write header plus rows; records are mappings or sequences aligned with ``columns``."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for rec in records:
        vals = [rec[c] for c in columns] if isinstance(rec, dict) else list(rec)
        if len(vals) != len(columns):
            raise LengthMismatch(f"record has {len(vals)} fields, expected {len(columns)}")
        w.writerow([format_cell(v) for v in vals])


def emit_csv(records, path, columns):
    """Write records to ``path`` (``"-"`` or None for standard output)."""
    if path in (None, "-"):
        write_csv(records, columns, sys.stdout)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write_csv(records, columns, fh)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc.strerror or exc}", field="path") from exc
