import csv
import dataclasses
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hosearm.diff_drive import (REFERENCE_PARAMS, VehicleParams, VehicleState,
                                build_state_matrices, eigenvalue_report, simulate,
                                steady_state, steering_terms, step_rk4, tire_forces,
                                torque_at)
from hosearm.errors import UnsortedProfile, ValidationError

from dsv_oracle import exact_response, expm_series

REF_DIR = Path(__file__).resolve().parents[1] / "docs" / "dsv_reference"
P = REFERENCE_PARAMS
state = st.tuples(st.floats(-0.5, 0.5), st.floats(-2, 2), st.floats(-0.5, 0.5))


def test_expm_oracle_sanity():
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    E = expm_series(A * 0.7)
    assert np.abs(E - [[math.cos(0.7), math.sin(0.7)], [-math.sin(0.7), math.cos(0.7)]]).max() < 1e-14


def test_matrices_match_committed_oracle():
    M = build_state_matrices(P)
    with open(REF_DIR / "state_matrix_oracle.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12
    for r in rows:
        exact = float(Fraction(r["exact_fraction"]))
        name = r["entry"]
        idx = [int(c) for c in name[2:-1].replace("][", ",").split(",")]
        got = M.A[idx[0], idx[1]] if name[0] == "A" else M.B[idx[0]]
        assert got == pytest.approx(exact, rel=1e-14, abs=1e-15), name


def test_b_first_entry_exact_zero():
    assert build_state_matrices(P).B[0] == 0.0


def test_entry_formulas():
    M = build_state_matrices(P)
    assert M.A[0, 0] == (2 * P.k_f + 2 * P.k_r) / (P.m * P.u_x)
    assert M.B[1] == P.l_s / (P.I_z * P.R)
    assert M.B[2] == P.r_sigma / (P.R * P.b_e)


def test_inertia_scaling():
    a = build_state_matrices(P)
    b = build_state_matrices(dataclasses.replace(P, I_z=2 * P.I_z))
    assert np.allclose(b.A[1], a.A[1] / 2, rtol=1e-15)
    assert b.B[1] == pytest.approx(a.B[1] / 2)


def test_reference_set_is_stable_and_report_committed():
    rep = eigenvalue_report()
    assert rep["stable"] and rep["max_real_part"] < 0
    committed = json.loads((REF_DIR / "eigenvalues.json").read_text())
    assert np.allclose(committed["eigenvalues"], rep["eigenvalues"], rtol=1e-12)
    # flipping stiffness signs destabilizes the same vehicle
    assert max(e[0] for e in committed["positive_stiffness_eigenvalues"]) > 0
    flip = dataclasses.replace(P, k_f=-P.k_f, k_r=-P.k_r)
    assert not eigenvalue_report(flip)["stable"]


def test_params_validation():
    with pytest.raises(ValidationError) as e:
        dataclasses.replace(P, u_x=0.0)
    assert e.value.field == "u_x"
    with pytest.raises(ValidationError):
        dataclasses.replace(P, k_f=float("inf"))


def test_tire_forces_examples():
    assert tire_forces(VehicleState(), P) == (0.0, 0.0)
    f, r = tire_forces(VehicleState(0.1, 0.0, 0.1), P)
    assert f == 0.0 and r == pytest.approx(P.k_r * 0.1)
    x = VehicleState(0.03, -0.4, 0.02)
    f, r = tire_forces(x, P)
    assert f == pytest.approx(P.k_f * (0.03 + P.l_f * -0.4 / P.u_x - 0.02))
    assert r == pytest.approx(P.k_r * (0.03 - P.l_r * -0.4 / P.u_x))


def test_steering_terms_examples():
    assert steering_terms(VehicleState(), P) == (0.0, 0.0)
    p = dataclasses.replace(P, k_f=1000.0, l=0.06)
    a, tau = steering_terms(VehicleState(0.1, 0.0, 0.0), p)
    assert a == pytest.approx(0.1) and tau == pytest.approx(0.12)


@given(state, state, st.floats(-3, 3))
def test_forces_linear(x, y, c):
    comb = tuple(c * a + b for a, b in zip(x, y))
    for fn in (tire_forces, steering_terms):
        fx, fy, fc = fn(x, P), fn(y, P), fn(comb, P)
        for i in range(2):
            assert abs(fc[i] - (c * fx[i] + fy[i])) < 1e-9 * max(1, abs(fc[i]))


def test_rk4_equilibrium_and_first_derivative():
    M = build_state_matrices(P)
    assert step_rk4(M, VehicleState(), 0.0, 0.01) == VehicleState(0.0, 0.0, 0.0)
    dt, u = 1e-7, 2.0
    x = np.array(step_rk4(M, VehicleState(), u, dt)) / dt
    assert abs(x[0]) < 1e-6
    assert x[1] == pytest.approx(P.l_s / (P.I_z * P.R) * u, rel=1e-5)
    assert x[2] == pytest.approx(P.r_sigma / (P.R * P.b_e) * u, rel=1e-5)
    with pytest.raises(ValidationError):
        step_rk4(M, VehicleState(), 0.0, 0.2)


@pytest.mark.parametrize("u", [0.5, 1.0, -3.0])
def test_rk4_vs_exact(u):
    M = build_state_matrices(P)
    x0 = np.array([0.01, -0.05, 0.02])
    traj = simulate(P, [(0.0, u)], 1.0, 1e-3, VehicleState(*x0))
    worst = max(np.abs(np.array(x) - exact_response(M.A, M.B, x0, u, t)).max()
                for t, x in traj[::50])
    assert worst < 1e-8


def test_simulate_zero_input():
    traj = simulate(P, [], 0.5, 0.01)
    assert len(traj) == 51
    assert all(x == (0.0, 0.0, 0.0) for _, x in traj)


def test_simulate_length():
    for t_end, dt in [(1.0, 1e-3), (0.3, 0.1), (0.25, 0.1), (0.0, 0.05)]:
        assert len(simulate(P, [], t_end, dt)) == math.floor(t_end / dt + 1e-9) + 1


def test_steady_state_convergence():
    M = build_state_matrices(P)
    u = 1.5
    traj = simulate(P, [(0.0, u)], 45.0, 0.01)
    assert np.abs(np.array(traj[-1][1]) - steady_state(M, u)).max() < 1e-6


def test_zero_order_hold():
    prof = [(0.0, 1.0), (0.5, -2.0), (1.0, 0.0)]
    assert torque_at(prof, -0.1) == 0.0
    assert torque_at(prof, 0.0) == 1.0 and torque_at(prof, 0.49) == 1.0
    assert torque_at(prof, 0.5) == -2.0 and torque_at(prof, 3.0) == 0.0
    # piecewise run equals chaining two constant-input runs
    M = build_state_matrices(P)
    traj = simulate(P, prof[:2], 1.0, 1e-3)
    mid = exact_response(M.A, M.B, np.zeros(3), 1.0, 0.5)
    end = exact_response(M.A, M.B, mid, -2.0, 0.5)
    assert np.abs(np.array(traj[-1][1]) - end).max() < 1e-8


def test_unsorted_profile():
    with pytest.raises(UnsortedProfile):
        simulate(P, [(1.0, 1.0), (0.5, 0.0)], 1.0, 0.01)


def test_superposition():
    a = simulate(P, [(0.0, 1.0)], 1.0, 1e-2)
    b = simulate(P, [(0.0, 3.7)], 1.0, 1e-2)
    for (_, xa), (_, xb) in zip(a, b):
        assert np.abs(3.7 * np.array(xa) - np.array(xb)).max() < 1e-9


def test_convergence_order():
    M = build_state_matrices(P)
    u, x0 = 1.0, np.zeros(3)
    ref = exact_response(M.A, M.B, x0, u, 1.0)
    e1 = np.abs(np.array(simulate(P, [(0, u)], 1.0, 0.02)[-1][1]) - ref).max()
    e2 = np.abs(np.array(simulate(P, [(0, u)], 1.0, 0.01)[-1][1]) - ref).max()
    assert e2 < e1 and e1 / e2 < 16 * 1.2
    assert e1 / e2 > 16 / 1.5
