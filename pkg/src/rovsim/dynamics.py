"""Planar 3-DOF rigid-body dynamics of a small ROV plus a decoupled heave axis.

The horizontal motion (surge, sway, yaw) follows the standard marine-craft
force balance

    F = M vdot + C(v) v + D(v) v + b

with a symmetric mass matrix M, a velocity-dependent Coriolis matrix C(v),
quadratic drag D(v) = |v1| D1 + |v2| D2 + |v6| D6 and a constant bias b that
only acts in yaw.  Depth is a separate 1-DOF channel with quadratic drag,
which matches a vehicle trimmed close to neutral in roll and pitch.

Sign conventions: x forward, y starboard, z down.  Yaw angle psi and pitch
theta are right-handed about z and y.  Pitch carries no dynamics here; it is
an exogenous constant that feeds the kinematic transforms.

Two Coriolis constructions are provided because they genuinely differ:

* ``"direct"`` — per-entry products of single velocities with single mass
  entries.  This form is NOT skew-symmetric, so it can inject or remove
  kinetic energy on curved trajectories (nu' C nu = v1 v2 v6 *
  (m11 - 2 m12 + m16 + m22 - m26)).
* ``"skew"`` — the energy-consistent skew-symmetric form built from M nu,
  for which nu' C nu = 0 identically.

Likewise the hydrostatic restoring term has two selectable conventions
(``"component"`` and ``"matrix"``) whose third components differ in sign;
see :func:`restoring_force`.

All functions are pure; :func:`step` returns a new state and never mutates
its input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .vehicle import VehicleParams

SINGULAR_PITCH_MARGIN = 1e-6  # rad, distance from +-pi/2 where sec(theta) is rejected

CORIOLIS_VARIANTS = ("direct", "skew")
RESTORING_VARIANTS = ("component", "matrix")
INTEGRATORS = ("rk4", "semi_implicit_euler")


class SingularTransform(ValueError):
    """Pitch too close to +-pi/2 for the body-to-inertial velocity transform."""


class DivergedState(RuntimeError):
    """Integration produced a non-finite or absurdly fast state."""


@dataclass(frozen=True)
class BodyVelocity:
    """Body-frame velocities: surge v1, sway v2 (m/s), yaw rate v6 (rad/s),
    heave w (m/s, positive down)."""

    v1: float = 0.0
    v2: float = 0.0
    v6: float = 0.0
    w: float = 0.0

    def __post_init__(self):
        for name in ("v1", "v2", "v6", "w"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite body velocity {name}")


@dataclass(frozen=True)
class Pose:
    """Inertial position (m, z positive down), yaw psi and fixed pitch theta (rad)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    psi: float = 0.0
    theta: float = 0.0


@dataclass(frozen=True)
class BodyForce:
    """Applied body-frame force: surge f1, sway f2 (N), yaw moment f6 (N*m),
    heave fz (N, positive down)."""

    f1: float = 0.0
    f2: float = 0.0
    f6: float = 0.0
    fz: float = 0.0

    def __add__(self, other: "BodyForce") -> "BodyForce":
        return BodyForce(self.f1 + other.f1, self.f2 + other.f2,
                         self.f6 + other.f6, self.fz + other.fz)


@dataclass(frozen=True)
class MassMatrix:
    """Entries of the symmetric 3x3 planar mass matrix plus heave mass mz (kg).

    Off-diagonal couplings default to zero.  The yaw inertia default is the
    rectangular-slab estimate m (L^2 + W^2) / 12 for the 0.640 m x 0.705 m
    hull footprint at 11 kg; override when better data exists.
    Positive definiteness is enforced at construction through the leading
    principal minors.
    """

    m11: float = 11.0
    m12: float = 0.0
    m16: float = 0.0
    m22: float = 11.0
    m26: float = 0.0
    m66: float = 0.831
    mz: float = 11.0

    def __post_init__(self):
        if self.m11 <= 0.0:
            raise ValueError(f"mass matrix not positive definite: "
                             f"1st leading minor m11 = {self.m11} <= 0")
        minor2 = self.m11 * self.m22 - self.m12 ** 2
        if minor2 <= 0.0:
            raise ValueError(f"mass matrix not positive definite: "
                             f"2nd leading minor m11*m22 - m12^2 = {minor2} <= 0")
        det = (self.m11 * (self.m22 * self.m66 - self.m26 ** 2)
               - self.m12 * (self.m12 * self.m66 - self.m26 * self.m16)
               + self.m16 * (self.m12 * self.m26 - self.m22 * self.m16))
        if det <= 0.0:
            raise ValueError(f"mass matrix not positive definite: "
                             f"3rd leading minor det(M) = {det} <= 0")
        if self.mz <= 0.0:
            raise ValueError(f"heave mass mz = {self.mz} must be positive")

    @cached_property
    def inverse_entries(self) -> tuple[float, ...]:
        """Row-major entries of M^-1 (cofactor formula, cached)."""
        a, b, c = self.m11, self.m12, self.m16
        d, e = self.m22, self.m26
        f = self.m66
        det = a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c)
        i11 = (d * f - e * e) / det
        i12 = (c * e - b * f) / det
        i13 = (b * e - c * d) / det
        i22 = (a * f - c * c) / det
        i23 = (b * c - a * e) / det
        i33 = (a * d - b * b) / det
        return (i11, i12, i13, i12, i22, i23, i13, i23, i33)


@dataclass(frozen=True)
class DragModel:
    """Quadratic drag matrices for surge/sway/yaw speed scaling plus heave dz.

    ``d1``, ``d2``, ``d6`` are 3x3 (stored as nested tuples); the effective
    drag matrix is |v1| d1 + |v2| d2 + |v6| d6.  Defaults are diagonal with
    the surge entry calibrated so 2 N of thrust balances at 0.135 m/s.
    """

    d1: tuple = ((109.73936899862825, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    d2: tuple = ((0.0, 0.0, 0.0), (0.0, 109.73936899862825, 0.0), (0.0, 0.0, 0.0))
    d6: tuple = ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 5.0))
    dz: float = 109.73936899862825

    @staticmethod
    def diagonal(surge: float, sway: float, yaw: float, dz: float) -> "DragModel":
        return DragModel(
            d1=((surge, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
            d2=((0.0, 0.0, 0.0), (0.0, sway, 0.0), (0.0, 0.0, 0.0)),
            d6=((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, yaw)),
            dz=dz,
        )

    def __post_init__(self):
        object.__setattr__(self, "d1", tuple(tuple(float(x) for x in row) for row in self.d1))
        object.__setattr__(self, "d2", tuple(tuple(float(x) for x in row) for row in self.d2))
        object.__setattr__(self, "d6", tuple(tuple(float(x) for x in row) for row in self.d6))
        if self.dz < 0.0:
            raise ValueError("heave drag dz must be non-negative")


@dataclass(frozen=True)
class Hydrostatics:
    """Weight and buoyancy magnitudes (N).  Defaults: 11 kg, neutrally trimmed."""

    weight: float = 11.0 * 9.81
    buoyancy: float = 11.0 * 9.81

    def __post_init__(self):
        if self.weight <= 0.0 or self.buoyancy <= 0.0:
            raise ValueError("weight and buoyancy must be positive")


@dataclass(frozen=True)
class VehicleState:
    """Snapshot of the simulated vehicle: body velocities, inertial pose,
    gripper opening angle and elapsed time."""

    v1: float = 0.0
    v2: float = 0.0
    v6: float = 0.0
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    psi: float = 0.0
    gripper_angle: float = 0.0
    t: float = 0.0

    def velocity(self) -> BodyVelocity:
        return BodyVelocity(self.v1, self.v2, self.v6, self.w)

    def pose(self, theta: float = 0.0) -> Pose:
        return Pose(self.x, self.y, self.z, self.psi, theta)


def assemble_mass_matrix(mass: MassMatrix) -> np.ndarray:
    """Return the symmetric planar mass matrix as a 3x3 array."""
    return np.array([
        [mass.m11, mass.m12, mass.m16],
        [mass.m12, mass.m22, mass.m26],
        [mass.m16, mass.m26, mass.m66],
    ])


def coriolis_matrix(mass: MassMatrix, v: BodyVelocity,
                    variant: str = "direct") -> np.ndarray:
    """Velocity-dependent Coriolis matrix C(v), in the requested convention.

    ``"direct"`` is the per-entry product form (not skew-symmetric), kept as
    the default for fidelity with the plant model this simulator reproduces.
    ``"skew"`` is the standard energy-consistent skew-symmetrization.
    """
    if variant == "direct":
        return np.array([
            [0.0, -v.v6 * mass.m26, v.v2 * mass.m22],
            [v.v6 * mass.m16, 0.0, -v.v1 * mass.m12],
            [-v.v2 * mass.m12, v.v1 * mass.m11, 0.0],
        ])
    if variant == "skew":
        p1 = mass.m11 * v.v1 + mass.m12 * v.v2
        p2 = mass.m22 * v.v2 + mass.m26 * v.v6
        return np.array([
            [0.0, 0.0, -p2],
            [0.0, 0.0, p1],
            [p2, -p1, 0.0],
        ])
    raise ValueError(f"unknown coriolis variant {variant!r}")


def drag_matrix(drag: DragModel, v: BodyVelocity) -> np.ndarray:
    """Quadratic drag matrix |v1| D1 + |v2| D2 + |v6| D6."""
    return (abs(v.v1) * np.array(drag.d1)
            + abs(v.v2) * np.array(drag.d2)
            + abs(v.v6) * np.array(drag.d6))


def transform_matrix(theta: float) -> np.ndarray:
    """Body-to-inertial velocity transform [[1,0,tan th],[0,1,0],[0,0,sec th]].

    Raises SingularTransform within 1e-6 rad of +-pi/2 where sec blows up.
    """
    if abs(theta) >= math.pi / 2 - SINGULAR_PITCH_MARGIN:
        raise SingularTransform(f"pitch {theta} rad too close to +-pi/2")
    return np.array([
        [1.0, 0.0, math.tan(theta)],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0 / math.cos(theta)],
    ])


def rotation_matrix(theta: float, psi: float) -> np.ndarray:
    """Body-to-inertial rotation for yaw psi about z then pitch theta about y."""
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array([
        [cp * ct, -sp, cp * st],
        [sp * ct, cp, sp * st],
        [-st, 0.0, ct],
    ])


def restoring_force(hydro: Hydrostatics, theta: float, psi: float,
                    variant: str = "component") -> tuple[np.ndarray, float]:
    """Net weight/buoyancy force, as (planar 3-vector, heave component).

    The planar vector is (surge, sway, 0): gravity exerts no yaw moment in
    this model.  The heave component is reported separately with z positive
    down, so a heavy vehicle (W > B) sinks under the default convention.

    Variants (they disagree, deliberately both are available):

    * ``"component"`` — componentwise closed form
      ((B-W) cos psi sin th, (B-W) sin psi sin th, (W-B) cos th).
    * ``"matrix"`` — the explicit product R(theta, psi) @ [0, 0, B-W], whose
      third component is (B-W) cos th, i.e. opposite in sign whenever W != B.
    """
    net = hydro.buoyancy - hydro.weight  # B - W
    ct, st = math.cos(theta), math.sin(theta)
    f1 = net * math.cos(psi) * st
    f2 = net * math.sin(psi) * st
    if variant == "component":
        fz = -net * ct
    elif variant == "matrix":
        fz = net * ct
    else:
        raise ValueError(f"unknown restoring variant {variant!r}")
    return np.array([f1, f2, 0.0]), fz


def _planar_accel(mass: MassMatrix, drag: DragModel, variant: str,
                  v1: float, v2: float, v6: float,
                  f1: float, f2: float, f6: float,
                  b6: float) -> tuple[float, float, float]:
    """Scalar core of the planar force balance, solved for the accelerations.

    Kept free of array allocation: the fixed-step integrator calls this four
    times per tick and calibration loops run hundreds of thousands of ticks.
    """
    if variant == "direct":
        cv1 = (-v6 * mass.m26) * v2 + (v2 * mass.m22) * v6
        cv2 = (v6 * mass.m16) * v1 + (-v1 * mass.m12) * v6
        cv3 = (-v2 * mass.m12) * v1 + (v1 * mass.m11) * v2
    else:  # skew
        p1 = mass.m11 * v1 + mass.m12 * v2
        p2 = mass.m22 * v2 + mass.m26 * v6
        cv1 = -p2 * v6
        cv2 = p1 * v6
        cv3 = p2 * v1 - p1 * v2
    a1, a2, a6 = abs(v1), abs(v2), abs(v6)
    d1, d2, d6 = drag.d1, drag.d2, drag.d6
    dv1 = dv2 = dv3 = 0.0
    for j, vj in enumerate((v1, v2, v6)):
        if vj == 0.0:
            continue
        dv1 += (a1 * d1[0][j] + a2 * d2[0][j] + a6 * d6[0][j]) * vj
        dv2 += (a1 * d1[1][j] + a2 * d2[1][j] + a6 * d6[1][j]) * vj
        dv3 += (a1 * d1[2][j] + a2 * d2[2][j] + a6 * d6[2][j]) * vj
    r1 = f1 - cv1 - dv1
    r2 = f2 - cv2 - dv2
    r3 = f6 - cv3 - dv3 - b6
    inv = mass.inverse_entries
    return (inv[0] * r1 + inv[1] * r2 + inv[2] * r3,
            inv[3] * r1 + inv[4] * r2 + inv[5] * r3,
            inv[6] * r1 + inv[7] * r2 + inv[8] * r3)


def acceleration(mass: MassMatrix, drag: DragModel, v: BodyVelocity,
                 applied: BodyForce, restoring: np.ndarray,
                 b6: float = 0.0, variant: str = "direct") -> np.ndarray:
    """Planar acceleration M^-1 (F - C(v) v - D(v) v - b).

    F combines the applied thruster force with the planar part of the
    restoring force; b = (0, 0, b6) is the constant yaw bias moment.
    """
    if variant not in CORIOLIS_VARIANTS:
        raise ValueError(f"unknown coriolis variant {variant!r}")
    return np.array(_planar_accel(
        mass, drag, variant, v.v1, v.v2, v.v6,
        applied.f1 + float(restoring[0]),
        applied.f2 + float(restoring[1]),
        applied.f6 + float(restoring[2]),
        b6))


def heave_acceleration(mz: float, dz: float, w: float,
                       fz: float, restoring_z: float) -> float:
    """Depth-axis acceleration (fz + restoring_z - dz |w| w) / mz."""
    if mz <= 0.0:
        raise ValueError("heave mass mz must be positive")
    return (fz + restoring_z - dz * abs(w) * w) / mz


def pose_rate(v: BodyVelocity, pose: Pose) -> tuple[float, float, float, float]:
    """Inertial rates (xdot, ydot, psidot, zdot) for the given body velocities.

    The pitch transform maps (v1, v2, v6) to corrected planar velocities and
    the yaw rate; the planar pair is then rotated by psi onto the map.  Depth
    rate is the heave velocity directly (both positive down).
    """
    if abs(pose.theta) >= math.pi / 2 - SINGULAR_PITCH_MARGIN:
        raise SingularTransform(f"pitch {pose.theta} rad too close to +-pi/2")
    tt = math.tan(pose.theta)
    v1p = v.v1 + tt * v.v6
    v2p = v.v2
    psidot = v.v6 / math.cos(pose.theta)
    cp, sp = math.cos(pose.psi), math.sin(pose.psi)
    return (cp * v1p - sp * v2p, sp * v1p + cp * v2p, psidot, v.w)


def depth_pressure(rho: float, g: float, h: float) -> float:
    """Hydrostatic pressure rho * g * h (Pa) at depth h (m)."""
    if h < 0.0:
        raise ValueError(f"depth h = {h} must be non-negative")
    return rho * g * h


def _check_finite(state: VehicleState, limit: float) -> None:
    vals = (state.v1, state.v2, state.v6, state.w,
            state.x, state.y, state.z, state.psi)
    if not all(math.isfinite(s) for s in vals):
        raise DivergedState(f"non-finite state at t = {state.t}")
    if (abs(state.v1) > limit or abs(state.v2) > limit
            or abs(state.w) > limit or abs(state.v6) > limit):
        raise DivergedState(f"velocity beyond sanity bound {limit} at t = {state.t}")


def _state_rates(params: "VehicleParams", v1, v2, v6, w, psi, force: BodyForce):
    """Full 8-state derivative under a constant applied force."""
    mass, theta = params.mass, params.pitch
    net = params.hydro.buoyancy - params.hydro.weight
    st, ct = math.sin(theta), math.cos(theta)
    r1 = net * math.cos(psi) * st
    r2 = net * math.sin(psi) * st
    rz = -net * ct if params.restoring_variant == "component" else net * ct
    dv1, dv2, dv6 = _planar_accel(
        mass, params.drag, params.coriolis_variant,
        v1, v2, v6, force.f1 + r1, force.f2 + r2, force.f6,
        params.yaw_bias)
    dw = (force.fz + rz - params.drag.dz * abs(w) * w) / mass.mz
    tt = math.tan(theta)
    v1p = v1 + tt * v6
    cp, sp = math.cos(psi), math.sin(psi)
    return (dv1, dv2, dv6, dw,
            cp * v1p - sp * v2, sp * v1p + cp * v2, w, v6 / ct)


def step(state: VehicleState, forces: BodyForce, params: "VehicleParams",
         dt: float, integrator: str = "rk4") -> VehicleState:
    """Advance the vehicle one fixed step under a constant applied force.

    ``rk4`` is the classical 4th-order scheme; ``semi_implicit_euler``
    updates velocities first and moves the pose with the new velocities.
    Raises DivergedState if the state stops being finite (or breaches the
    configured speed sanity bound) so a bad run aborts instead of emitting
    NaNs downstream.
    """
    if not 0.0 < dt <= 0.1:
        raise ValueError(f"dt = {dt} outside (0, 0.1] s")
    if abs(params.pitch) >= math.pi / 2 - SINGULAR_PITCH_MARGIN:
        raise SingularTransform(f"pitch {params.pitch} rad too close to +-pi/2")
    limit = params.speed_limit
    _check_finite(state, limit)

    y0 = (state.v1, state.v2, state.v6, state.w,
          state.x, state.y, state.z, state.psi)

    if integrator == "rk4":
        def rhs(y):
            return _state_rates(params, y[0], y[1], y[2], y[3], y[7], forces)

        k1 = rhs(y0)
        k2 = rhs(tuple(y0[i] + 0.5 * dt * k1[i] for i in range(8)))
        k3 = rhs(tuple(y0[i] + 0.5 * dt * k2[i] for i in range(8)))
        k4 = rhs(tuple(y0[i] + dt * k3[i] for i in range(8)))
        y1 = tuple(y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                   for i in range(8))
    elif integrator == "semi_implicit_euler":
        dv1, dv2, dv6, dw, *_ = _state_rates(
            params, y0[0], y0[1], y0[2], y0[3], y0[7], forces)
        v1n, v2n, v6n, wn = (y0[0] + dt * dv1, y0[1] + dt * dv2,
                             y0[2] + dt * dv6, y0[3] + dt * dw)
        xd, yd, psid, zd = pose_rate(
            BodyVelocity(v1n, v2n, v6n, wn),
            Pose(psi=y0[7], theta=params.pitch))
        y1 = (v1n, v2n, v6n, wn,
              y0[4] + dt * xd, y0[5] + dt * yd, y0[6] + dt * zd,
              y0[7] + dt * psid)
    else:
        raise ValueError(f"unknown integrator {integrator!r}")

    out = replace(state, v1=y1[0], v2=y1[1], v6=y1[2], w=y1[3],
                  x=y1[4], y=y1[5], z=y1[6], psi=y1[7], t=state.t + dt)
    _check_finite(out, limit)
    return out
