"""Deterministic fits for the parameters no datasheet provides.

Thrust and drag are only identifiable up to the terminal-velocity ratio, so
thrust is fixed by convention (1 N per horizontal thruster) and the surge
drag coefficient is fitted to the observed cruise speed.  The wave amplitude
is fitted by bisection on the simulated completion time, since the only
ground truth for the disturbed trial is how long it took.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Union

from .environment import WaveConfig
from .simengine import ScenarioConfig, run_scenario
from .teleop import LatencyProfile


class NoBracket(RuntimeError):
    """The search interval cannot reach the target completion time."""


@dataclass(frozen=True)
class DragFit:
    coefficient: float   # N s^2/m^2
    thrust: float        # N, total forward thrust used for the fit
    v_target: float      # m/s
    v_achieved: float    # m/s, from the verification run
    residual: float      # |v_achieved - v_target|


@dataclass(frozen=True)
class WaveFit:
    amplitude: float     # N
    target_time: float   # s
    achieved_time: float  # s
    residual: float      # s
    evaluations: int
    onset: float
    duration: float
    profile: str
    frequency: float


def fit_drag(thrust: float, v_terminal: float) -> float:
    """Quadratic-drag coefficient from the terminal-velocity balance F = d v^2."""
    if thrust <= 0.0 or v_terminal <= 0.0:
        raise ValueError("thrust and v_terminal must be positive")
    return thrust / v_terminal ** 2


def measure_terminal_velocity(cfg: ScenarioConfig,
                              settle_time: float = 30.0) -> float:
    """Simulation oracle: steady-state surge speed under constant full thrust.

    Runs a latency-free hold-forward scenario long enough to settle and
    returns the final surge velocity.
    """
    probe = replace(
        cfg,
        goal=1e9,
        max_time=settle_time,
        latency=LatencyProfile(startup_range=(0.0, 0.0), nav_range=(0.0, 0.0)),
        env=replace(cfg.env, wave=None),
    )
    log = run_scenario(probe)
    return log.records[-1].v1


def verify_drag(thrust: float, v_terminal: float,
                base: Optional[ScenarioConfig] = None) -> DragFit:
    """Fit the surge drag coefficient and close the loop through simulation."""
    coeff = fit_drag(thrust, v_terminal)
    cfg = base if base is not None else ScenarioConfig()
    cfg = replace(cfg, vehicle=cfg.vehicle.with_drag_surge(coeff))
    v_sim = measure_terminal_velocity(cfg)
    return DragFit(coefficient=coeff, thrust=thrust, v_target=v_terminal,
                   v_achieved=v_sim, residual=abs(v_sim - v_terminal))


def _completion_time(cfg: ScenarioConfig) -> float:
    """Completion time of a scenario; +inf when it times out."""
    log = run_scenario(cfg)
    if log.status != "FINISHED":
        return math.inf
    return log.records[-1].t


def fit_wave(target_time: float, still_cfg: ScenarioConfig,
             wave_shape: Optional[WaveConfig] = None,
             amplitude_hi: float = 50.0, tol: float = 0.5,
             max_iter: int = 60) -> WaveFit:
    """Bisect the disturbance amplitude until the trial takes ``target_time``.

    The objective (simulated completion time) is monotone non-decreasing in
    the amplitude for a pulse opposing the direction of travel; that is
    asserted on every evaluation.  Converges when the achieved time is within
    ``tol`` seconds of the target.
    """
    shape = wave_shape if wave_shape is not None else WaveConfig()
    base = replace(still_cfg, env=replace(still_cfg.env, wave=None))
    t_still = _completion_time(base)
    if not math.isfinite(t_still):
        raise ValueError("still-water scenario does not finish; cannot fit a wave")
    if target_time < t_still - tol:
        raise ValueError(
            f"target {target_time} s not reachable: a wave can only slow the "
            f"vehicle and still water already takes {t_still:.2f} s")
    if target_time <= t_still + tol:  # boundary: the wave is not needed at all
        return WaveFit(amplitude=0.0, target_time=target_time,
                       achieved_time=t_still,
                       residual=abs(t_still - target_time), evaluations=1,
                       onset=shape.onset, duration=shape.duration,
                       profile=shape.profile, frequency=shape.frequency)

    def time_at(amplitude: float) -> float:
        wave = replace(shape, amplitude=amplitude)
        cfg = replace(still_cfg, env=replace(still_cfg.env, wave=wave))
        return _completion_time(cfg)

    evals = 2
    lo, t_lo = 0.0, t_still
    hi, t_hi = amplitude_hi, time_at(amplitude_hi)
    if t_hi < target_time - tol:
        raise NoBracket(
            f"even amplitude {amplitude_hi} N only stretches the trial to "
            f"{t_hi:.2f} s; achievable range is [{t_still:.2f}, {t_hi:.2f}] s")
    best = (hi, t_hi)
    for _ in range(max_iter):
        if abs(best[1] - target_time) <= tol:
            break
        mid = 0.5 * (lo + hi)
        t_mid = time_at(mid)
        evals += 1
        if not (t_lo - 1e-9 <= t_mid or t_mid == math.inf) or \
           not (t_mid <= t_hi + 1e-9 or t_hi == math.inf):
            raise RuntimeError(
                f"completion time not monotone in amplitude: "
                f"t({lo})={t_lo}, t({mid})={t_mid}, t({hi})={t_hi}")
        if abs(t_mid - target_time) < abs(best[1] - target_time):
            best = (mid, t_mid)
        if t_mid < target_time:
            lo, t_lo = mid, t_mid
        else:
            hi, t_hi = mid, t_mid
    amplitude, achieved = best
    residual = abs(achieved - target_time)
    if residual > tol:
        raise RuntimeError(
            f"bisection stalled at {achieved:.2f} s for target {target_time} s")
    return WaveFit(amplitude=amplitude, target_time=target_time,
                   achieved_time=achieved, residual=residual,
                   evaluations=evals, onset=shape.onset,
                   duration=shape.duration, profile=shape.profile,
                   frequency=shape.frequency)


def fit_report(fits: Iterable[Union[DragFit, WaveFit]]) -> str:
    """Render fits as calibration-file text (scenario-format blocks).

    Loading the report on top of the same base scenario reproduces the fitted
    behavior, and re-running the fits' oracles reproduces the residuals.
    """
    lines = ["schema: 1"]
    for fit in fits:
        if isinstance(fit, DragFit):
            lines += [
                "",
                "[drag]",
                f"surge: {fit.coefficient!r}",
                f"fit_target: terminal_v_ms={fit.v_target!r}",
                f"fit_residual: {fit.residual!r}",
            ]
        elif isinstance(fit, WaveFit):
            lines += [
                "",
                "[wave]",
                f"amplitude_n: {fit.amplitude!r}",
                f"onset_s: {fit.onset!r}",
                f"duration_s: {fit.duration!r}",
                f"profile: {fit.profile}",
                f"frequency_hz: {fit.frequency!r}",
                f"fit_target: time_s={fit.target_time!r}",
                f"fit_residual: {fit.residual!r}",
            ]
        else:
            raise TypeError(f"unknown fit type {type(fit).__name__}")
    return "\n".join(lines) + "\n"
