"""Fixed-step closed-loop trial runner, metrics and log serialization.

A scenario advances one tick at a time: resolve the operator command (after
link latency), allocate thruster forces, add the environment disturbance,
integrate the dynamics and append one record to the trial log.  Runs are
bit-reproducible: every random draw derives from the scenario seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from random import Random
from typing import Optional

from . import dynamics
from .dynamics import BodyForce, DivergedState, VehicleState
from .environment import EnvironmentConfig, WaveConfig, disturbance_force
from .teleop import LatencyProfile, LinkEmulator, WaveFrame
from .vehicle import (Buttons, GripperState, VehicleParams, allocate_thrust,
                      gripper_step, read_sensors)

COMMAND_SOURCES = ("scripted_fwd", "live")

CSV_COLUMNS = ("t", "x", "y", "z", "psi", "v1", "v2", "v6", "w",
               "f1", "f2", "f6", "fz", "dist_f1", "cmd", "temp", "hum", "batt")
_CSV_HEADER = ",".join(CSV_COLUMNS)
_INT_COLUMNS = {"cmd", "temp", "hum"}


class LogFormatError(ValueError):
    """A serialized trial log failed to parse; carries the record index."""

    def __init__(self, record_index: int, message: str):
        super().__init__(f"record {record_index}: {message}")
        self.record_index = record_index


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete definition of one trial (or live session)."""

    goal: float = 4.0              # m of surge displacement to finish
    dt: float = 0.01               # s
    integrator: str = "rk4"
    vehicle: VehicleParams = VehicleParams()
    env: EnvironmentConfig = EnvironmentConfig()
    source: str = "scripted_fwd"
    latency: LatencyProfile = LatencyProfile()
    max_time: float = 120.0        # s
    seed: int = 0
    command_rate_hz: float = 10.0  # operator/console command rate
    telemetry_every: int = 10      # ticks between telemetry samples
    watchdog_s: float = 5.0        # silence before the failsafe neutralizes
    pace: float = 1.0              # live mode: sim seconds per wall second

    def __post_init__(self):
        if self.goal <= 0.0:
            raise ValueError("goal must be positive")
        if not 0.0 < self.dt <= 0.1:
            raise ValueError("dt must be in (0, 0.1] s")
        if self.max_time <= 0.0:
            raise ValueError("max_time must be positive")
        if self.integrator not in dynamics.INTEGRATORS:
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.source not in COMMAND_SOURCES:
            raise ValueError(f"unknown command source {self.source!r}")
        if self.command_rate_hz <= 0.0 or self.telemetry_every < 1:
            raise ValueError("command rate and telemetry decimation must be positive")


@dataclass(frozen=True)
class TickRecord:
    """One log row: state at time t plus the forces and command applied over
    the following step."""

    t: float
    x: float
    y: float
    z: float
    psi: float
    v1: float
    v2: float
    v6: float
    w: float
    f1: float
    f2: float
    f6: float
    fz: float
    dist_f1: float
    cmd: int
    temp: int
    hum: int
    batt: float


@dataclass
class TrialLog:
    """Per-tick records plus the terminal status of the run."""

    records: list = field(default_factory=list)
    status: Optional[str] = None  # FINISHED | TIMEOUT | DIVERGED
    goal: float = 0.0
    dt: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class TrialMetrics:
    time_taken: float
    avg_velocity_dist_over_time: float
    avg_velocity_instantaneous_mean: float
    time_to_95pct_vmax: float
    v_max: float


class ScenarioRunner:
    """Advances one scenario tick by tick; shared by scripted and live modes."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.state = VehicleState()
        self.gripper = GripperState()
        self.records: list[TickRecord] = []
        self.status: Optional[str] = None
        self.diverged_tick: Optional[int] = None
        self._env = cfg.env
        self._sensor_rng = Random(cfg.seed ^ 0x53E15)
        self.sensors = read_sensors(self.state, self._env, 0.0, cfg.vehicle,
                                    self._sensor_rng)

    @property
    def t(self) -> float:
        return self.state.t

    def inject_wave(self, frame: WaveFrame):
        """Schedule a console-requested disturbance starting now."""
        wave = WaveConfig(
            onset=self.t,
            duration=frame.duration_s,
            amplitude=frame.amplitude_n,
            profile="sinusoid" if frame.profile == 1 else "pulse",
            frequency=max(frame.frequency_hz, 1e-3),
        )
        self._env = replace(self._env, wave=wave)

    def tick(self, buttons: Buttons | int = Buttons.NONE):
        """Record the current tick, then step unless the run just ended."""
        if self.status is not None:
            return
        cfg = self.cfg
        t = self.state.t
        _, applied = allocate_thrust(buttons, cfg.vehicle.thrusters)
        disturb = disturbance_force(self._env, t)
        self.sensors = read_sensors(self.state, self._env, t, cfg.vehicle,
                                    self._sensor_rng)
        s = self.state
        self.records.append(TickRecord(
            t=t, x=s.x, y=s.y, z=s.z, psi=s.psi,
            v1=s.v1, v2=s.v2, v6=s.v6, w=s.w,
            f1=applied.f1, f2=applied.f2, f6=applied.f6, fz=applied.fz,
            dist_f1=disturb.f1, cmd=int(buttons),
            temp=self.sensors.temperature, hum=self.sensors.humidity,
            batt=self.sensors.battery))
        if s.x >= cfg.goal:
            self.status = "FINISHED"
            return
        if t >= cfg.max_time:
            self.status = "TIMEOUT"
            return
        try:
            self.state = dynamics.step(self.state, applied + disturb,
                                       cfg.vehicle, cfg.dt, cfg.integrator)
        except DivergedState as exc:
            self.status = "DIVERGED"
            self.diverged_tick = len(self.records) - 1
            exc.tick_index = self.diverged_tick
            exc.log = self.finish()
            raise
        self.gripper = gripper_step(self.gripper, buttons, cfg.dt,
                                    cfg.vehicle.gripper_rate,
                                    cfg.vehicle.gripper_max_open)
        self.state = replace(self.state, gripper_angle=self.gripper.angle)

    def finish(self) -> TrialLog:
        return TrialLog(records=self.records, status=self.status,
                        goal=self.cfg.goal, dt=self.cfg.dt, seed=self.cfg.seed)


def run_scenario(cfg: ScenarioConfig) -> TrialLog:
    """Run a scripted trial to completion.

    The scripted source models the paper-style trial: the operator holds FWD
    from t = 0 at the console command rate, and every frame still rides the
    latency link (startup already elapsed, so each command sees a
    navigation-delay sample).  Raises DivergedState (with ``tick_index`` and
    the partial ``log`` attached) if the integration blows up.
    """
    if cfg.source != "scripted_fwd":
        raise ValueError("run_scenario drives scripted trials; "
                         "use teleop.serve for live sessions")
    runner = ScenarioRunner(cfg)
    link = LinkEmulator.already_active(cfg.latency, cfg.seed)
    period = 1.0 / cfg.command_rate_hz
    next_send = 0.0
    current = Buttons.NONE
    last_delivery: Optional[float] = None
    while runner.status is None:
        t = runner.t
        while next_send <= t + 1e-12:
            link.enqueue(Buttons.FWD, next_send)
            next_send += period
        for deliver_at, buttons in link.poll(t):
            current = buttons
            last_delivery = deliver_at
        effective = current
        if last_delivery is not None and t - last_delivery > cfg.watchdog_s:
            effective = Buttons.NONE
        runner.tick(effective)
    return runner.finish()


def trial_metrics(log: TrialLog) -> TrialMetrics:
    """Table-style metrics for a finished trial.

    Two average velocities are reported because they genuinely differ: the
    unambiguous distance-over-time figure and the mean of the instantaneous
    surge velocity samples (which discounts the dead time before the first
    command bites differently).
    """
    if log.status != "FINISHED":
        raise ValueError(f"metrics need a FINISHED log, got {log.status!r}")
    if not log.records:
        raise ValueError("empty log")
    time_taken = log.records[-1].t
    if time_taken <= 0.0:
        raise ValueError("degenerate log: zero duration")
    v_max = max(r.v1 for r in log.records)
    t95 = next(r.t for r in log.records if r.v1 >= 0.95 * v_max)
    goal = log.goal if log.goal > 0.0 else log.records[-1].x
    return TrialMetrics(
        time_taken=time_taken,
        avg_velocity_dist_over_time=goal / time_taken,
        avg_velocity_instantaneous_mean=(
            math.fsum(r.v1 for r in log.records) / len(log.records)),
        time_to_95pct_vmax=t95,
        v_max=v_max,
    )


def _format_cell(name: str, value) -> str:
    return str(int(value)) if name in _INT_COLUMNS else repr(float(value))


def export_log(log: TrialLog, fmt: str = "csv") -> bytes:
    """Serialize a log; CSV carries the records, JSON-lines adds a first
    metadata line (schema, status, goal, dt, seed).  Both round-trip exactly:
    export -> import -> export is byte-identical."""
    if fmt == "csv":
        lines = [_CSV_HEADER]
        for r in log.records:
            lines.append(",".join(_format_cell(c, getattr(r, c))
                                  for c in CSV_COLUMNS))
        return ("\n".join(lines) + "\n").encode()
    if fmt == "jsonl":
        meta = {"schema": 1, "status": log.status, "goal": log.goal,
                "dt": log.dt, "seed": log.seed}
        lines = [json.dumps(meta, sort_keys=True, separators=(",", ":"))]
        for r in log.records:
            row = {c: getattr(r, c) for c in CSV_COLUMNS}
            lines.append(json.dumps(row, sort_keys=True, separators=(",", ":")))
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown log format {fmt!r}")


def _record_from_map(index: int, row: dict) -> TickRecord:
    try:
        kwargs = {c: (int(row[c]) if c in _INT_COLUMNS else float(row[c]))
                  for c in CSV_COLUMNS}
    except (KeyError, TypeError, ValueError) as exc:
        raise LogFormatError(index, f"bad field: {exc}") from exc
    return TickRecord(**kwargs)


def import_log(data: bytes, fmt: str = "csv") -> TrialLog:
    """Parse a serialized log back into a TrialLog.

    CSV does not carry run metadata, so status/goal/dt come back unset for
    that format; JSON-lines restores them.
    """
    text = data.decode()
    lines = [ln for ln in text.split("\n") if ln != ""]
    if fmt == "csv":
        if not lines or lines[0] != _CSV_HEADER:
            raise LogFormatError(0, "missing or wrong CSV header")
        records = []
        for i, line in enumerate(lines[1:]):
            cells = line.split(",")
            if len(cells) != len(CSV_COLUMNS):
                raise LogFormatError(i, f"expected {len(CSV_COLUMNS)} cells, "
                                        f"got {len(cells)}")
            records.append(_record_from_map(i, dict(zip(CSV_COLUMNS, cells))))
        return TrialLog(records=records)
    if fmt == "jsonl":
        if not lines:
            raise LogFormatError(0, "empty stream")
        try:
            meta = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise LogFormatError(0, f"bad metadata line: {exc}") from exc
        if meta.get("schema") != 1:
            raise LogFormatError(0, f"unsupported schema {meta.get('schema')!r}")
        records = []
        for i, line in enumerate(lines[1:]):
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LogFormatError(i, f"bad json: {exc}") from exc
            records.append(_record_from_map(i, row))
        return TrialLog(records=records, status=meta.get("status"),
                        goal=meta.get("goal", 0.0), dt=meta.get("dt", 0.0),
                        seed=meta.get("seed", 0))
    raise ValueError(f"unknown log format {fmt!r}")
