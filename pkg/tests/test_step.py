"""Fixed-step integrator tests against closed-form and fine-step oracles."""

import math
from dataclasses import replace

import numpy as np
import pytest

from rovsim.dynamics import (BodyForce, DivergedState, DragModel, Hydrostatics,
                             MassMatrix, VehicleState, assemble_mass_matrix,
                             step)
from rovsim.vehicle import VehicleParams

THRUST = 2.0       # N, both horizontal thrusters
V_INF = 0.135      # m/s, calibrated cruise speed
D_SURGE = THRUST / V_INF ** 2
TAU = 11.0 * V_INF / THRUST  # s, ramp time constant of the quadratic-drag ODE


def surge_ramp_oracle(t: float) -> float:
    """Closed form of m v' = F - d v^2 from rest: v = v_inf tanh(t / tau)."""
    return V_INF * math.tanh(t / TAU)


def run_constant_force(params, force, dt, t_end, integrator="rk4"):
    state = VehicleState()
    out = [state]
    for _ in range(round(t_end / dt)):
        state = step(state, force, params, dt, integrator)
        out.append(state)
    return out


class TestStepBasics:

    def test_fixed_point_at_rest(self, default_params):
        s0 = VehicleState()
        s1 = step(s0, BodyForce(), default_params, 0.01)
        assert s1 == replace(s0, t=0.01)

    def test_dt_bounds(self, default_params):
        with pytest.raises(ValueError):
            step(VehicleState(), BodyForce(), default_params, 0.0)
        with pytest.raises(ValueError):
            step(VehicleState(), BodyForce(), default_params, 0.2)

    def test_nan_guard(self, default_params):
        with pytest.raises(DivergedState):
            step(VehicleState(v1=math.nan), BodyForce(), default_params, 0.01)
        with pytest.raises(DivergedState):
            step(VehicleState(x=math.inf), BodyForce(), default_params, 0.01)

    def test_speed_sanity_bound(self, default_params):
        with pytest.raises(DivergedState):
            step(VehicleState(v1=11.0), BodyForce(), default_params, 0.01)
        relaxed = replace(default_params, speed_limit=20.0)
        step(VehicleState(v1=11.0), BodyForce(), relaxed, 0.01)

    def test_unknown_integrator(self, default_params):
        with pytest.raises(ValueError):
            step(VehicleState(), BodyForce(), default_params, 0.01, "euler3")

    def test_gripper_and_sway_untouched_by_pure_surge(self, default_params):
        s = VehicleState(gripper_angle=0.4)
        s = step(s, BodyForce(f1=2.0), default_params, 0.01)
        assert s.gripper_angle == 0.4
        assert s.v2 == 0.0 and s.y == 0.0


class TestSurgeRamp:

    def test_follows_tanh_closed_form(self, default_params):
        states = run_constant_force(default_params, BodyForce(f1=THRUST),
                                    dt=0.01, t_end=5.0)
        for s in states[5::7]:
            assert s.v1 == pytest.approx(surge_ramp_oracle(s.t), rel=1e-4)

    def test_95pct_of_cruise_at_1p36_s(self, default_params):
        # atanh(0.95) * tau = 1.36 s
        states = run_constant_force(default_params, BodyForce(f1=THRUST),
                                    dt=0.01, t_end=1.36)
        assert states[-1].v1 == pytest.approx(0.95 * V_INF, rel=1e-3)

    def test_semi_implicit_euler_reaches_same_terminal(self, default_params):
        states = run_constant_force(default_params, BodyForce(f1=THRUST),
                                    dt=0.01, t_end=8.0,
                                    integrator="semi_implicit_euler")
        assert states[-1].v1 == pytest.approx(V_INF, rel=1e-3)


class TestConvergence:

    def test_halving_dt_moves_endpoint_below_1e6_m(self, default_params):
        force = BodyForce(f1=THRUST, f6=0.2)
        end_a = run_constant_force(default_params, force, 0.01, 10.0)[-1]
        end_b = run_constant_force(default_params, force, 0.005, 10.0)[-1]
        assert abs(end_a.x - end_b.x) < 1e-6
        assert abs(end_a.y - end_b.y) < 1e-6

    def test_rk4_matches_fine_step_euler(self):
        """Short cross-check against an independent hand-rolled Euler loop.

        The oracle integrates the same equations from the printed matrix
        forms, sharing no code with step().
        """
        params = VehicleParams(
            mass=MassMatrix(m11=11.0, m22=11.0, m66=0.831),
            drag=DragModel(),
        )
        force = BodyForce(f1=2.0, f6=0.3)
        t_end = 3.0

        rk4 = run_constant_force(params, force, 0.01, t_end)[-1]

        d_surge = params.drag.d1[0][0]
        d_sway = params.drag.d2[1][1]
        d_yaw = params.drag.d6[2][2]
        m = assemble_mass_matrix(params.mass)
        minv = np.linalg.inv(m)
        v = np.zeros(3)
        x = y = psi = 0.0
        dt = 1e-5
        for _ in range(round(t_end / dt)):
            c = np.array([[0.0, -v[2] * params.mass.m26, v[1] * params.mass.m22],
                          [v[2] * params.mass.m16, 0.0, -v[0] * params.mass.m12],
                          [-v[1] * params.mass.m12, v[0] * params.mass.m11, 0.0]])
            drag_v = np.array([abs(v[0]) * d_surge * v[0],
                               abs(v[1]) * d_sway * v[1],
                               abs(v[2]) * d_yaw * v[2]])
            acc = minv @ (np.array([force.f1, force.f2, force.f6])
                          - c @ v - drag_v)
            x += dt * (math.cos(psi) * v[0] - math.sin(psi) * v[1])
            y += dt * (math.sin(psi) * v[0] + math.cos(psi) * v[1])
            psi += dt * v[2]
            v = v + dt * acc
        assert rk4.v1 == pytest.approx(v[0], rel=1e-4)
        assert rk4.v6 == pytest.approx(v[2], rel=1e-4)
        assert rk4.x == pytest.approx(x, rel=1e-4)
        assert rk4.y == pytest.approx(y, rel=1e-4)
        assert rk4.psi == pytest.approx(psi, rel=1e-4)


class TestEnergy:

    def test_kinetic_energy_dissipates_under_skew_coriolis(self):
        params = VehicleParams(
            mass=MassMatrix(m11=11.0, m12=0.4, m16=0.05, m22=12.0, m26=0.1,
                            m66=0.9),
            coriolis_variant="skew",
        )
        m = assemble_mass_matrix(params.mass)
        state = VehicleState(v1=1.2, v2=-0.6, v6=0.8)
        nu = np.array([state.v1, state.v2, state.v6])
        energy = 0.5 * nu @ m @ nu
        for _ in range(400):
            state = step(state, BodyForce(), params, 0.01)
            nu = np.array([state.v1, state.v2, state.v6])
            e_next = 0.5 * nu @ m @ nu
            assert e_next <= energy + 1e-12
            energy = e_next
        assert energy < 0.1  # drag actually bled the motion off

    def test_heave_terminal_descent(self):
        # heavy vehicle: 10 N net weight, dz = 100 -> w_inf = sqrt(0.1)
        params = VehicleParams(
            hydro=Hydrostatics(weight=117.91, buoyancy=107.91),
            drag=replace(DragModel(), dz=100.0),
        )
        state = VehicleState()
        for _ in range(3000):
            state = step(state, BodyForce(), params, 0.01)
        assert state.w == pytest.approx(math.sqrt(0.1), rel=1e-6)
        assert state.z > 0.0  # sank, z positive down
