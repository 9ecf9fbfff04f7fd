"""Actuation and payload model: push-button commands, six thrusters, gripper,
environmental sensors and battery.

The vehicle carries two fixed forward-facing horizontal thrusters (surge and,
run differentially, yaw) and four vertical thrusters (heave).  Commands are
bang-bang push buttons with no analog axes, so every thruster is either off
or at its force limit before clamping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import IntFlag
from random import Random

from .dynamics import BodyForce, DragModel, Hydrostatics, MassMatrix, VehicleState


class Buttons(IntFlag):
    """Operator push-buttons, one bit each (wire bit order)."""

    NONE = 0
    FWD = 1
    BACK = 2
    LEFT = 4
    RIGHT = 8
    UP = 16
    DOWN = 32
    GRIP_OPEN = 64
    GRIP_CLOSE = 128


# Mutually exclusive pairs; LEFT+RIGHT merely cancel so they are tolerated.
_CONTRADICTIONS = (
    (Buttons.FWD, Buttons.BACK),
    (Buttons.UP, Buttons.DOWN),
    (Buttons.GRIP_OPEN, Buttons.GRIP_CLOSE),
)


class CommandRejected(ValueError):
    """Command bitmask sets both buttons of an exclusive pair."""


def validate_buttons(mask: int) -> Buttons:
    """Return the mask as Buttons, rejecting contradictory pairs."""
    if not 0 <= int(mask) <= 0xFF:
        raise CommandRejected(f"button mask {mask:#x} outside one byte")
    buttons = Buttons(int(mask))
    for a, b in _CONTRADICTIONS:
        if a in buttons and b in buttons:
            raise CommandRejected(f"contradictory buttons {a.name}+{b.name}")
    return buttons


@dataclass(frozen=True)
class ThrusterLayout:
    """Geometry and limits of the fixed 4-vertical / 2-horizontal layout.

    ``lever_arm`` is the lateral offset of each horizontal thruster from the
    centerline, which sets the yaw moment of differential thrust.
    """

    max_force: float = 1.0  # N per thruster
    lever_arm: float = 0.3  # m
    vertical_count: int = 4
    horizontal_count: int = 2

    def __post_init__(self):
        if self.max_force <= 0.0 or self.lever_arm <= 0.0:
            raise ValueError("max_force and lever_arm must be positive")
        if self.vertical_count != 4 or self.horizontal_count != 2:
            raise ValueError("layout is fixed at 4 vertical + 2 horizontal thrusters")


@dataclass(frozen=True)
class ThrusterForces:
    """Individual thruster outputs (N): port/starboard horizontal pair plus
    the four vertical units (positive = downward body force)."""

    port: float = 0.0
    starboard: float = 0.0
    vertical: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)


def allocate_thrust(cmd: Buttons | int,
                    layout: ThrusterLayout) -> tuple[ThrusterForces, BodyForce]:
    """Map a button mask to per-thruster forces and the resulting body force.

    FWD/BACK drive both horizontal thrusters together; LEFT/RIGHT drive them
    differentially (LEFT = positive yaw).  UP/DOWN drive all four vertical
    thrusters.  Per-thruster output is clamped to the force limit first and
    the body force is then the exact geometric sum of the clamped outputs.
    """
    buttons = validate_buttons(cmd)
    f = layout.max_force

    port = starboard = 0.0
    if Buttons.FWD in buttons:
        port += f
        starboard += f
    if Buttons.BACK in buttons:
        port -= f
        starboard -= f
    if Buttons.LEFT in buttons:  # positive yaw: starboard pushes, port brakes
        port -= f
        starboard += f
    if Buttons.RIGHT in buttons:
        port += f
        starboard -= f
    port = min(max(port, -f), f)
    starboard = min(max(starboard, -f), f)

    vert = 0.0
    if Buttons.DOWN in buttons:
        vert += f
    if Buttons.UP in buttons:
        vert -= f
    vert = min(max(vert, -f), f)

    thr = ThrusterForces(port, starboard, (vert, vert, vert, vert))
    body = BodyForce(
        f1=thr.port + thr.starboard,
        f2=0.0,
        f6=(thr.starboard - thr.port) * layout.lever_arm,
        fz=sum(thr.vertical),
    )
    return thr, body


GRIPPER_SNAP = 1e-3  # rad, endpoint capture band


@dataclass(frozen=True)
class GripperState:
    """Servo gripper opening angle (rad) and motion status."""

    angle: float = 0.0
    status: str = "CLOSED"  # CLOSED | OPEN | MOVING


def gripper_step(g: GripperState, cmd: Buttons | int, dt: float,
                 rate: float = 1.0, max_open: float = 1.0) -> GripperState:
    """Slew the gripper toward the commanded endpoint at a fixed rate.

    Without a grip button the state is returned unchanged.  The angle is
    clamped to [0, max_open] and snaps to the endpoint once within 1e-3 rad,
    at which point the status becomes OPEN or CLOSED.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    buttons = validate_buttons(cmd)
    if Buttons.GRIP_OPEN in buttons:
        target = max_open
    elif Buttons.GRIP_CLOSE in buttons:
        target = 0.0
    else:
        return g
    move = min(rate * dt, abs(target - g.angle))
    angle = g.angle + math.copysign(move, target - g.angle)
    angle = min(max(angle, 0.0), max_open)
    if abs(angle - target) <= GRIPPER_SNAP:
        angle = target
        status = "OPEN" if target == max_open else "CLOSED"
    else:
        status = "MOVING"
    return GripperState(angle, status)


@dataclass(frozen=True)
class SensorReadings:
    """DHT11-class environment readings plus depth and battery voltage."""

    temperature: int  # degC, integer resolution, clamped to [0, 50]
    humidity: int     # %, integer resolution, clamped to [20, 90]
    depth: float      # m
    battery: float    # V


def battery_model(t: float, load_fraction: float = 1.0, *,
                  full_v: float = 12.5, cutoff_v: float = 10.0,
                  endurance_s: float = 45.0 * 60.0) -> float:
    """Linear pack discharge scaled so full load lasts the rated endurance.

    Voltage never rises and never drops below the cutoff.
    """
    if t < 0.0:
        raise ValueError("t must be non-negative")
    load = min(max(load_fraction, 0.0), 1.0)
    v = full_v - (full_v - cutoff_v) * load * (t / endurance_s)
    return max(v, cutoff_v)


@dataclass(frozen=True)
class VehicleParams:
    """Every physical constant of the simulated vehicle in one place."""

    mass: MassMatrix = MassMatrix()
    drag: DragModel = DragModel()
    hydro: Hydrostatics = Hydrostatics()
    yaw_bias: float = 0.0            # N*m, constant bias moment
    pitch: float = 0.0               # rad, exogenous trim angle
    coriolis_variant: str = "direct"
    restoring_variant: str = "component"
    speed_limit: float = 10.0        # m/s and rad/s sanity bound
    thrusters: ThrusterLayout = ThrusterLayout()
    gripper_rate: float = 1.0        # rad/s
    gripper_max_open: float = 1.0    # rad
    sensor_noise_std: float = 0.0    # degC / % / m, Gaussian, 0 = off
    battery_full_v: float = 12.5
    battery_cutoff_v: float = 10.0
    battery_endurance_s: float = 45.0 * 60.0

    def with_drag_surge(self, surge: float) -> "VehicleParams":
        """Copy of the params with the surge drag entry replaced."""
        d1 = tuple(tuple(row) for row in self.drag.d1)
        d1 = ((surge,) + d1[0][1:],) + d1[1:]
        return replace(self, drag=replace(self.drag, d1=d1))


def read_sensors(state: VehicleState, env, t: float,
                 params: VehicleParams = VehicleParams(),
                 rng: Random | None = None) -> SensorReadings:
    """Sample the vehicle's sensors at time t.

    Temperature and humidity come from the environment configuration with
    integer quantization and DHT11-class range clamping; depth is the pose z
    (floored at the surface); battery follows the linear discharge model at
    full nominal load.  Optional Gaussian noise is applied before quantizing.
    """
    temp = float(env.temperature_c)
    hum = float(env.humidity_pct)
    depth = max(state.z, 0.0)
    if params.sensor_noise_std > 0.0 and rng is not None:
        temp += rng.gauss(0.0, params.sensor_noise_std)
        hum += rng.gauss(0.0, params.sensor_noise_std)
        depth = max(depth + rng.gauss(0.0, params.sensor_noise_std), 0.0)
    return SensorReadings(
        temperature=int(min(max(round(temp), 0), 50)),
        humidity=int(min(max(round(hum), 20), 90)),
        depth=depth,
        battery=battery_model(
            t, 1.0, full_v=params.battery_full_v,
            cutoff_v=params.battery_cutoff_v,
            endurance_s=params.battery_endurance_s),
    )
