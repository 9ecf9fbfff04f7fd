"""Command-line entry point: trials, calibration, live serving, log export.

Exit codes are the only success/failure channel: 0 success (trial FINISHED),
1 usage/config error, 2 trial TIMEOUT, 3 trial DIVERGED.  Summaries go to
stdout as machine-parseable ``key=value`` lines.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

from .calibrate import NoBracket, fit_report, fit_wave, verify_drag
from .dynamics import DivergedState
from .environment import WaveConfig
from .scenario import ScenarioError, load_scenario_file
from .simengine import (LogFormatError, ScenarioConfig, TrialLog, export_log,
                        import_log, run_scenario, trial_metrics)
from . import teleop

_INTEGRATORS = {"rk4": "rk4", "sie": "semi_implicit_euler"}


def _load_config(args) -> ScenarioConfig:
    cfg = ScenarioConfig()
    if getattr(args, "scenario", None):
        path = Path(args.scenario)
        if not path.exists():
            raise ScenarioError(0, f"scenario file not found: {path}")
        cfg = load_scenario_file(path)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "dt", None) is not None:
        cfg = replace(cfg, dt=args.dt)
    if getattr(args, "integrator", None) is not None:
        cfg = replace(cfg, integrator=_INTEGRATORS[args.integrator])
    return cfg


def _apply_wave_flag(cfg: ScenarioConfig, wave_arg) -> ScenarioConfig:
    """--wave [AMPLITUDE]: enable the disturbance, fitting the amplitude to
    the published 39 s completion time when none is given."""
    if wave_arg is None:
        return cfg
    if wave_arg == "auto":
        if cfg.env.wave is not None and cfg.env.wave.amplitude > 0.0:
            return cfg
        fit = fit_wave(39.0, cfg, cfg.env.wave)
        wave = replace(cfg.env.wave if cfg.env.wave else WaveConfig(),
                       amplitude=fit.amplitude)
    else:
        base = cfg.env.wave if cfg.env.wave is not None else WaveConfig()
        wave = replace(base, amplitude=float(wave_arg))
    return replace(cfg, env=replace(cfg.env, wave=wave))


def _emit(key: str, value):
    print(f"{key}={value}", flush=True)


def cmd_run_trial(args) -> int:
    try:
        cfg = _load_config(args)
        cfg = _apply_wave_flag(cfg, args.wave)
    except (ScenarioError, ValueError, NoBracket) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        log = run_scenario(cfg)
    except DivergedState as exc:
        _emit("status", "DIVERGED")
        _emit("diverged_tick", exc.tick_index)
        if args.out:
            Path(args.out).write_bytes(export_log(exc.log, args.format))
            _emit("log_path", args.out)
        return 3
    _emit("status", log.status)
    _emit("time_s", repr(log.records[-1].t))
    _emit("displacement_m", repr(log.records[-1].x))
    if log.status == "FINISHED":
        m = trial_metrics(log)
        _emit("time_taken_s", repr(m.time_taken))
        _emit("avg_velocity_dist_over_time_cm_s",
              repr(100.0 * m.avg_velocity_dist_over_time))
        _emit("avg_velocity_instantaneous_mean_cm_s",
              repr(100.0 * m.avg_velocity_instantaneous_mean))
        _emit("v_max_cm_s", repr(100.0 * m.v_max))
        _emit("time_to_95pct_vmax_s", repr(m.time_to_95pct_vmax))
    if args.out:
        Path(args.out).write_bytes(export_log(log, args.format))
        _emit("log_path", args.out)
    return 0 if log.status == "FINISHED" else 2


def cmd_serve(args) -> int:
    try:
        cfg = _load_config(args)
        cfg = replace(cfg, source="live")
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit("listening", f"{args.host}:{args.port}")
    try:
        log = teleop.serve(cfg, host=args.host, port=args.port, pace=args.pace)
    except OSError as exc:  # port busy and friends
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out and log is not None:
        Path(args.out).write_bytes(export_log(log, args.format))
        _emit("log_path", args.out)
    return 0


def cmd_calibrate(args) -> int:
    try:
        cfg = _load_config(args)
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fits = []
    try:
        thrust = 2.0 * cfg.vehicle.thrusters.max_force
        drag = verify_drag(thrust, args.target_velocity, cfg)
        fits.append(drag)
        _emit("drag_surge", repr(drag.coefficient))
        _emit("drag_residual_ms", repr(drag.residual))
        if args.wave_target is not None and math.isfinite(args.wave_target):
            calibrated = replace(
                cfg, vehicle=cfg.vehicle.with_drag_surge(drag.coefficient))
            wave = fit_wave(args.wave_target, calibrated, cfg.env.wave)
            fits.append(wave)
            _emit("wave_amplitude_n", repr(wave.amplitude))
            _emit("wave_residual_s", repr(wave.residual))
    except (ValueError, NoBracket) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = fit_report(fits)
    if args.out:
        Path(args.out).write_text(text)
        _emit("calibration_path", args.out)
    else:
        sys.stdout.write(text)
    return 0


def cmd_export(args) -> int:
    path = Path(args.log)
    if not path.exists():
        print(f"error: log file not found: {path}", file=sys.stderr)
        return 1
    in_fmt = "jsonl" if path.suffix == ".jsonl" else "csv"
    try:
        log: TrialLog = import_log(path.read_bytes(), in_fmt)
    except LogFormatError as exc:
        print(f"error: corrupt log: {exc}", file=sys.stderr)
        return 1
    rows = [(r.t, r.v1, r.x) for r in log.records]
    if args.format == "csv":
        lines = ["t,v1,x"] + [f"{t!r},{v!r},{x!r}" for t, v, x in rows]
        out = "\n".join(lines) + "\n"
    else:
        import json
        out = "".join(
            json.dumps({"t": t, "v1": v, "x": x},
                       sort_keys=True, separators=(",", ":")) + "\n"
            for t, v, x in rows)
    if args.out:
        Path(args.out).write_text(out)
        _emit("series_path", args.out)
        _emit("rows", len(rows))
    else:
        sys.stdout.write(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rovsim",
        description="Deterministic underwater ROV trial simulator and "
                    "teleoperation endpoint.")
    sub = parser.add_subparsers(dest="command", required=True)

    trial = sub.add_parser("run-trial", help="run a scripted trial")
    trial.add_argument("--scenario", help="scenario file (defaults built in)")
    trial.add_argument("--out", help="write the trial log here")
    trial.add_argument("--seed", type=int, default=None)
    trial.add_argument("--dt", type=float, default=None)
    trial.add_argument("--integrator", choices=sorted(_INTEGRATORS))
    trial.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    trial.add_argument("--wave", nargs="?", const="auto", default=None,
                       metavar="AMPLITUDE_N",
                       help="enable the wave disturbance (amplitude fitted "
                            "to the 39 s trial when omitted)")
    trial.set_defaults(func=cmd_run_trial)

    serve = sub.add_parser("serve", help="serve a live teleoperated session")
    serve.add_argument("--scenario")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8700)
    serve.add_argument("--seed", type=int, default=None)
    serve.add_argument("--dt", type=float, default=None)
    serve.add_argument("--integrator", choices=sorted(_INTEGRATORS))
    serve.add_argument("--pace", type=float, default=None,
                       help="sim seconds per wall second (default from scenario)")
    serve.add_argument("--out", help="write the session log on shutdown")
    serve.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    serve.set_defaults(func=cmd_serve)

    cal = sub.add_parser("calibrate", help="fit drag (and wave amplitude)")
    cal.add_argument("--scenario")
    cal.add_argument("--seed", type=int, default=None)
    cal.add_argument("--out", help="write the calibration file here")
    cal.add_argument("--target-velocity", type=float, default=0.135,
                     help="cruise speed to fit drag against (m/s)")
    cal.add_argument("--wave-target", type=float, default=39.0,
                     help="wave-trial completion time to fit (s); "
                          "use nan to skip")
    cal.set_defaults(func=cmd_calibrate)

    exp = sub.add_parser("export", help="emit velocity/displacement series "
                                        "from a saved log")
    exp.add_argument("--log", required=True, help="trial log (.csv or .jsonl)")
    exp.add_argument("--out", help="write the series here (stdout otherwise)")
    exp.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    exp.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream closed the pipe (e.g. | head): exit quietly
        import os
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
