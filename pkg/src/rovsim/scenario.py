"""Human-readable scenario files.

The format is versioned, line-oriented `key: value` text grouped into
`[section]` blocks.  The first significant line must be ``schema: 1``.
Blank lines and full-line ``#`` comments are ignored.  Every section and key
is optional; anything omitted keeps its default (or the value from a base
configuration, which is how calibration files are applied on top of a
scenario).  Unknown sections or keys are hard errors with line numbers, so
typos never silently fall back to defaults.

Sections and keys::

    [scenario]  goal_m dt_s integrator source max_time_s seed
                command_rate_hz telemetry_every watchdog_s pace
    [mass]      m11 m12 m16 m22 m26 m66 heave
    [drag]      surge sway yaw heave
    [hydro]     weight_n buoyancy_n
    [body]      pitch_rad yaw_bias_nm speed_limit coriolis restoring
    [thrusters] max_force_n lever_arm_m
    [gripper]   rate_rad_s max_open_rad
    [battery]   full_v cutoff_v endurance_s
    [sensors]   noise_std
    [env]       rho g temperature_c humidity_pct
    [wave]      onset_s duration_s amplitude_n direction profile
                frequency_hz seed
    [latency]   startup_min_s startup_max_s nav_min_s nav_max_s loss
                delay_telemetry

``fit_target`` and ``fit_residual`` are additionally accepted in [drag] and
[wave]: calibration reports carry their provenance there.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Optional

from .dynamics import DragModel, Hydrostatics, MassMatrix
from .environment import EnvironmentConfig, WaveConfig
from .simengine import ScenarioConfig
from .teleop import LatencyProfile
from .vehicle import ThrusterLayout, VehicleParams

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Scenario file problem, pointing at the offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


_KNOWN_KEYS = {
    "scenario": {"goal_m", "dt_s", "integrator", "source", "max_time_s",
                 "seed", "command_rate_hz", "telemetry_every", "watchdog_s",
                 "pace"},
    "mass": {"m11", "m12", "m16", "m22", "m26", "m66", "heave"},
    "drag": {"surge", "sway", "yaw", "heave", "fit_target", "fit_residual"},
    "hydro": {"weight_n", "buoyancy_n"},
    "body": {"pitch_rad", "yaw_bias_nm", "speed_limit", "coriolis",
             "restoring"},
    "thrusters": {"max_force_n", "lever_arm_m"},
    "gripper": {"rate_rad_s", "max_open_rad"},
    "battery": {"full_v", "cutoff_v", "endurance_s"},
    "sensors": {"noise_std"},
    "env": {"rho", "g", "temperature_c", "humidity_pct"},
    "wave": {"onset_s", "duration_s", "amplitude_n", "direction", "profile",
             "frequency_hz", "seed", "fit_target", "fit_residual"},
    "latency": {"startup_min_s", "startup_max_s", "nav_min_s", "nav_max_s",
                "loss", "delay_telemetry"},
}


def parse_sections(text: str) -> dict:
    """Parse scenario text into {section: {key: (value, line_no)}}.

    Validates the schema line and key/section names, not value types.
    """
    sections: dict = {}
    current: Optional[str] = None
    saw_schema = False
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not saw_schema:
            if line.replace(" ", "") != "schema:1":
                raise ScenarioError(line_no, "first line must be 'schema: 1'")
            saw_schema = True
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _KNOWN_KEYS:
                raise ScenarioError(line_no, f"unknown section [{name}]")
            current = name
            sections.setdefault(name, {})
            continue
        if ":" not in line:
            raise ScenarioError(line_no, f"expected 'key: value', got {line!r}")
        if current is None:
            raise ScenarioError(line_no, "key/value outside any [section]")
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS[current]:
            raise ScenarioError(line_no, f"unknown key {key!r} in [{current}]")
        if key in sections[current]:
            raise ScenarioError(line_no, f"duplicate key {key!r} in [{current}]")
        sections[current][key] = (value, line_no)
    if not saw_schema:
        raise ScenarioError(1, "empty file: first line must be 'schema: 1'")
    return sections


def _take(sections: dict, section: str, key: str, convert, default):
    entry = sections.get(section, {}).get(key)
    if entry is None:
        return default
    value, line_no = entry
    try:
        return convert(value)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(line_no, f"bad value for {key}: {exc}") from exc


def _to_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _to_direction(value: str) -> tuple[float, float]:
    parts = value.split(",")
    if len(parts) != 2:
        raise ValueError("direction must be 'dx,dy'")
    return (float(parts[0]), float(parts[1]))


def build_config(sections: dict,
                 base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    """Turn parsed sections into a ScenarioConfig, overriding ``base``."""
    cfg = base if base is not None else ScenarioConfig()
    veh = cfg.vehicle

    def take(section, key, convert, default):
        return _take(sections, section, key, convert, default)

    mass = MassMatrix(
        m11=take("mass", "m11", float, veh.mass.m11),
        m12=take("mass", "m12", float, veh.mass.m12),
        m16=take("mass", "m16", float, veh.mass.m16),
        m22=take("mass", "m22", float, veh.mass.m22),
        m26=take("mass", "m26", float, veh.mass.m26),
        m66=take("mass", "m66", float, veh.mass.m66),
        mz=take("mass", "heave", float, veh.mass.mz),
    )
    drag = DragModel.diagonal(
        surge=take("drag", "surge", float, veh.drag.d1[0][0]),
        sway=take("drag", "sway", float, veh.drag.d2[1][1]),
        yaw=take("drag", "yaw", float, veh.drag.d6[2][2]),
        dz=take("drag", "heave", float, veh.drag.dz),
    )
    hydro = Hydrostatics(
        weight=take("hydro", "weight_n", float, veh.hydro.weight),
        buoyancy=take("hydro", "buoyancy_n", float, veh.hydro.buoyancy),
    )
    thrusters = ThrusterLayout(
        max_force=take("thrusters", "max_force_n", float,
                       veh.thrusters.max_force),
        lever_arm=take("thrusters", "lever_arm_m", float,
                       veh.thrusters.lever_arm),
    )
    vehicle = replace(
        veh, mass=mass, drag=drag, hydro=hydro, thrusters=thrusters,
        pitch=take("body", "pitch_rad", float, veh.pitch),
        yaw_bias=take("body", "yaw_bias_nm", float, veh.yaw_bias),
        speed_limit=take("body", "speed_limit", float, veh.speed_limit),
        coriolis_variant=take("body", "coriolis", str, veh.coriolis_variant),
        restoring_variant=take("body", "restoring", str,
                               veh.restoring_variant),
        gripper_rate=take("gripper", "rate_rad_s", float, veh.gripper_rate),
        gripper_max_open=take("gripper", "max_open_rad", float,
                              veh.gripper_max_open),
        sensor_noise_std=take("sensors", "noise_std", float,
                              veh.sensor_noise_std),
        battery_full_v=take("battery", "full_v", float, veh.battery_full_v),
        battery_cutoff_v=take("battery", "cutoff_v", float,
                              veh.battery_cutoff_v),
        battery_endurance_s=take("battery", "endurance_s", float,
                                 veh.battery_endurance_s),
    )

    wave = cfg.env.wave
    if "wave" in sections:
        prev = wave if wave is not None else WaveConfig()
        wave = WaveConfig(
            onset=take("wave", "onset_s", float, prev.onset),
            duration=take("wave", "duration_s", float, prev.duration),
            amplitude=take("wave", "amplitude_n", float, prev.amplitude),
            direction=take("wave", "direction", _to_direction, prev.direction),
            profile=take("wave", "profile", str, prev.profile),
            frequency=take("wave", "frequency_hz", float, prev.frequency),
            seed=take("wave", "seed", int, prev.seed),
        )
    env = EnvironmentConfig(
        rho=take("env", "rho", float, cfg.env.rho),
        g=take("env", "g", float, cfg.env.g),
        temperature_c=take("env", "temperature_c", float,
                           cfg.env.temperature_c),
        humidity_pct=take("env", "humidity_pct", float, cfg.env.humidity_pct),
        wave=wave,
    )

    latency = LatencyProfile(
        startup_range=(
            take("latency", "startup_min_s", float, cfg.latency.startup_range[0]),
            take("latency", "startup_max_s", float, cfg.latency.startup_range[1]),
        ),
        nav_range=(
            take("latency", "nav_min_s", float, cfg.latency.nav_range[0]),
            take("latency", "nav_max_s", float, cfg.latency.nav_range[1]),
        ),
        loss=take("latency", "loss", float, cfg.latency.loss),
        delay_telemetry=take("latency", "delay_telemetry", _to_bool,
                             cfg.latency.delay_telemetry),
    )

    return replace(
        cfg, vehicle=vehicle, env=env, latency=latency,
        goal=take("scenario", "goal_m", float, cfg.goal),
        dt=take("scenario", "dt_s", float, cfg.dt),
        integrator=take("scenario", "integrator", str, cfg.integrator),
        source=take("scenario", "source", str, cfg.source),
        max_time=take("scenario", "max_time_s", float, cfg.max_time),
        seed=take("scenario", "seed", int, cfg.seed),
        command_rate_hz=take("scenario", "command_rate_hz", float,
                             cfg.command_rate_hz),
        telemetry_every=take("scenario", "telemetry_every", int,
                             cfg.telemetry_every),
        watchdog_s=take("scenario", "watchdog_s", float, cfg.watchdog_s),
        pace=take("scenario", "pace", float, cfg.pace),
    )


def load_scenario(text: str,
                  base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    """Parse scenario (or calibration) text on top of ``base``.

    Wraps invariant violations raised by the config dataclasses into
    ScenarioError so callers always get a line-oriented diagnostic.
    """
    sections = parse_sections(text)
    try:
        return build_config(sections, base)
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(0, str(exc)) from exc


def load_scenario_file(path: str | Path,
                       base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    return load_scenario(Path(path).read_text(), base)


def default_scenario_text() -> str:
    """A fully spelled-out scenario file matching the built-in defaults."""
    cfg = ScenarioConfig()
    veh = cfg.vehicle
    lines = [
        "schema: 1",
        "",
        "[scenario]",
        f"goal_m: {cfg.goal!r}",
        f"dt_s: {cfg.dt!r}",
        f"integrator: {cfg.integrator}",
        f"source: {cfg.source}",
        f"max_time_s: {cfg.max_time!r}",
        f"seed: {cfg.seed}",
        f"command_rate_hz: {cfg.command_rate_hz!r}",
        f"telemetry_every: {cfg.telemetry_every}",
        f"watchdog_s: {cfg.watchdog_s!r}",
        f"pace: {cfg.pace!r}",
        "",
        "[mass]",
        f"m11: {veh.mass.m11!r}",
        f"m22: {veh.mass.m22!r}",
        f"m66: {veh.mass.m66!r}",
        f"heave: {veh.mass.mz!r}",
        "",
        "[drag]",
        f"surge: {veh.drag.d1[0][0]!r}",
        f"sway: {veh.drag.d2[1][1]!r}",
        f"yaw: {veh.drag.d6[2][2]!r}",
        f"heave: {veh.drag.dz!r}",
        "",
        "[hydro]",
        f"weight_n: {veh.hydro.weight!r}",
        f"buoyancy_n: {veh.hydro.buoyancy!r}",
        "",
        "[thrusters]",
        f"max_force_n: {veh.thrusters.max_force!r}",
        f"lever_arm_m: {veh.thrusters.lever_arm!r}",
        "",
        "[latency]",
        f"startup_min_s: {cfg.latency.startup_range[0]!r}",
        f"startup_max_s: {cfg.latency.startup_range[1]!r}",
        f"nav_min_s: {cfg.latency.nav_range[0]!r}",
        f"nav_max_s: {cfg.latency.nav_range[1]!r}",
        f"loss: {cfg.latency.loss!r}",
        "",
    ]
    return "\n".join(lines)
