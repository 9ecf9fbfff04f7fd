"""Thruster allocation, gripper, sensor and battery model tests."""

import math
from random import Random

import pytest

from rovsim.dynamics import VehicleState
from rovsim.environment import EnvironmentConfig
from rovsim.vehicle import (Buttons, CommandRejected, GripperState,
                            SensorReadings, ThrusterLayout, VehicleParams,
                            allocate_thrust, battery_model, gripper_step,
                            read_sensors, validate_buttons)


def valid_masks():
    """All 256 masks minus the contradictory ones."""
    for mask in range(256):
        try:
            validate_buttons(mask)
        except CommandRejected:
            continue
        yield Buttons(mask)


class TestCommandValidation:

    def test_rejects_contradictions(self):
        for bad in (Buttons.FWD | Buttons.BACK,
                    Buttons.UP | Buttons.DOWN,
                    Buttons.GRIP_OPEN | Buttons.GRIP_CLOSE):
            with pytest.raises(CommandRejected):
                validate_buttons(bad)

    def test_left_right_cancel_but_are_allowed(self):
        _, body = allocate_thrust(Buttons.LEFT | Buttons.RIGHT, ThrusterLayout())
        assert body.f1 == body.f6 == 0.0

    def test_mask_range(self):
        with pytest.raises(CommandRejected):
            validate_buttons(0x1FF)


class TestAllocation:

    def test_idle(self):
        thr, body = allocate_thrust(Buttons.NONE, ThrusterLayout())
        assert thr.port == thr.starboard == 0.0
        assert thr.vertical == (0.0, 0.0, 0.0, 0.0)
        assert (body.f1, body.f2, body.f6, body.fz) == (0.0, 0.0, 0.0, 0.0)

    def test_forward(self):
        thr, body = allocate_thrust(Buttons.FWD, ThrusterLayout(max_force=1.0))
        assert thr.port == thr.starboard == 1.0
        assert body.f1 == 2.0 and body.f6 == 0.0 and body.fz == 0.0

    def test_left_is_positive_yaw(self):
        layout = ThrusterLayout(max_force=1.0, lever_arm=0.3)
        thr, body = allocate_thrust(Buttons.LEFT, layout)
        assert (thr.port, thr.starboard) == (-1.0, 1.0)
        assert body.f1 == 0.0
        assert body.f6 == pytest.approx(0.6)

    def test_down_is_positive_heave(self):
        _, body = allocate_thrust(Buttons.DOWN, ThrusterLayout(max_force=1.0))
        assert body.fz == 4.0 and body.f1 == body.f6 == 0.0
        _, body = allocate_thrust(Buttons.UP, ThrusterLayout(max_force=1.0))
        assert body.fz == -4.0

    def test_forward_left_clamps_per_thruster(self):
        layout = ThrusterLayout(max_force=1.0, lever_arm=0.3)
        thr, body = allocate_thrust(Buttons.FWD | Buttons.LEFT, layout)
        assert (thr.port, thr.starboard) == (0.0, 1.0)
        assert body.f1 == 1.0
        assert body.f6 == pytest.approx(0.3)

    def test_body_force_reconstructs_from_thrusters(self):
        layout = ThrusterLayout(max_force=1.3, lever_arm=0.25)
        for mask in valid_masks():
            thr, body = allocate_thrust(mask, layout)
            assert body.f1 == thr.port + thr.starboard
            assert body.f2 == 0.0
            assert body.f6 == (thr.starboard - thr.port) * layout.lever_arm
            assert body.fz == sum(thr.vertical)
            for force in (thr.port, thr.starboard, *thr.vertical):
                assert -layout.max_force <= force <= layout.max_force

    def test_pure_surge_commands_make_no_yaw_or_heave(self):
        for mask in (Buttons.FWD, Buttons.BACK):
            _, body = allocate_thrust(mask, ThrusterLayout())
            assert body.f6 == 0.0 and body.fz == 0.0

    def test_pure_vertical_commands_make_no_planar_force(self):
        for mask in (Buttons.UP, Buttons.DOWN):
            _, body = allocate_thrust(mask, ThrusterLayout())
            assert body.f1 == 0.0 and body.f2 == 0.0 and body.f6 == 0.0

    def test_contradiction_rejected(self):
        with pytest.raises(CommandRejected):
            allocate_thrust(Buttons.FWD | Buttons.BACK, ThrusterLayout())

    def test_layout_is_fixed(self):
        with pytest.raises(ValueError):
            ThrusterLayout(vertical_count=6)
        with pytest.raises(ValueError):
            ThrusterLayout(max_force=0.0)


class TestGripper:

    def test_no_button_leaves_state_alone(self):
        g = GripperState(angle=0.4, status="MOVING")
        assert gripper_step(g, Buttons.FWD, 0.1) == g

    def test_linear_slew(self):
        g = gripper_step(GripperState(), Buttons.GRIP_OPEN, dt=0.1,
                         rate=1.0, max_open=1.0)
        assert g.angle == pytest.approx(0.1)
        assert g.status == "MOVING"

    def test_endpoint_clamp_and_status(self):
        g = gripper_step(GripperState(angle=0.9995, status="MOVING"),
                         Buttons.GRIP_OPEN, dt=0.1, rate=1.0, max_open=1.0)
        assert g.angle == 1.0
        assert g.status == "OPEN"

    def test_close_converges_in_finite_steps(self):
        g = GripperState(angle=1.0, status="OPEN")
        for _ in range(20):
            g = gripper_step(g, Buttons.GRIP_CLOSE, dt=0.1)
            assert 0.0 <= g.angle <= 1.0
            if g.status == "CLOSED":
                break
        assert g.status == "CLOSED" and g.angle == 0.0

    def test_angle_never_leaves_range(self):
        g = GripperState()
        for _ in range(50):
            g = gripper_step(g, Buttons.GRIP_OPEN, dt=0.07, rate=1.3,
                             max_open=0.8)
            assert 0.0 <= g.angle <= 0.8
        assert g.status == "OPEN"

    def test_bad_dt(self):
        with pytest.raises(ValueError):
            gripper_step(GripperState(), Buttons.GRIP_OPEN, dt=0.0)


class TestBattery:

    def test_full_at_start(self):
        assert battery_model(0.0) == 12.5

    def test_cutoff_at_rated_endurance(self):
        assert battery_model(45.0 * 60.0, 1.0) == 10.0

    def test_midpoint(self):
        assert battery_model(22.5 * 60.0, 1.0) == pytest.approx(11.25)

    def test_monotone_and_floored(self):
        prev = battery_model(0.0)
        for minutes in range(0, 120, 5):
            v = battery_model(minutes * 60.0, 1.0)
            assert v <= prev
            assert v >= 10.0
            prev = v

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            battery_model(-1.0)


class TestSensors:

    def test_quantization_and_depth(self):
        env = EnvironmentConfig(temperature_c=25.4, humidity_pct=61.7)
        s = read_sensors(VehicleState(z=0.5), env, t=0.0)
        assert s == SensorReadings(temperature=25, humidity=62, depth=0.5,
                                   battery=12.5)

    def test_dht11_range_clamp(self):
        env = EnvironmentConfig(temperature_c=70.0, humidity_pct=5.0)
        s = read_sensors(VehicleState(), env, t=0.0)
        assert s.temperature == 50 and s.humidity == 20

    def test_battery_reaches_cutoff_at_endurance(self):
        s = read_sensors(VehicleState(), EnvironmentConfig(), t=45.0 * 60.0)
        assert s.battery == 10.0

    def test_surface_depth_floor(self):
        s = read_sensors(VehicleState(z=-0.2), EnvironmentConfig(), t=0.0)
        assert s.depth == 0.0

    def test_noise_is_seed_deterministic(self):
        params = VehicleParams(sensor_noise_std=0.5)
        env = EnvironmentConfig()
        a = read_sensors(VehicleState(z=1.0), env, 0.0, params, Random(9))
        b = read_sensors(VehicleState(z=1.0), env, 0.0, params, Random(9))
        assert a == b
        c = read_sensors(VehicleState(z=1.0), env, 0.0, params, Random(10))
        assert a != c  # different seed, different draw (with overwhelming odds)
