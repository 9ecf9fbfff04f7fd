"""Water properties and the wave-disturbance force used in disturbed trials."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .dynamics import BodyForce


@dataclass(frozen=True)
class WaveConfig:
    """A timed disturbance force acting in the horizontal plane.

    ``pulse`` applies a constant force opposing ``direction`` for the whole
    window; ``sinusoid`` oscillates along ``direction`` at ``frequency``.
    The window is the closed interval [onset, onset + duration].
    """

    onset: float = 30.0        # s
    duration: float = 4.0      # s
    amplitude: float = 0.0     # N peak
    direction: tuple[float, float] = (1.0, 0.0)  # unit vector, body frame
    profile: str = "pulse"     # pulse | sinusoid
    frequency: float = 0.5     # Hz, sinusoid only
    seed: int = 0              # reserved for jittered profiles

    def __post_init__(self):
        if self.onset < 0.0 or self.duration < 0.0 or self.amplitude < 0.0:
            raise ValueError("onset, duration and amplitude must be non-negative")
        if self.profile not in ("pulse", "sinusoid"):
            raise ValueError(f"unknown wave profile {self.profile!r}")
        norm = math.hypot(*self.direction)
        if norm == 0.0:
            raise ValueError("wave direction must be a nonzero vector")
        object.__setattr__(self, "direction",
                           (self.direction[0] / norm, self.direction[1] / norm))


@dataclass(frozen=True)
class EnvironmentConfig:
    """Water density/gravity, ambient sensor readings and an optional wave."""

    rho: float = 1000.0        # kg/m^3
    g: float = 9.81            # m/s^2
    temperature_c: float = 25.0
    humidity_pct: float = 60.0
    wave: Optional[WaveConfig] = None

    def __post_init__(self):
        if self.rho <= 0.0 or self.g <= 0.0:
            raise ValueError("rho and g must be positive")


def disturbance_force(cfg: EnvironmentConfig, t: float) -> BodyForce:
    """Disturbance force at time t; identically zero outside the wave window."""
    if t < 0.0:
        raise ValueError("t must be non-negative")
    wave = cfg.wave
    if wave is None or wave.amplitude == 0.0:
        return BodyForce()
    if not wave.onset <= t <= wave.onset + wave.duration:
        return BodyForce()
    dx, dy = wave.direction
    if wave.profile == "pulse":
        mag = -wave.amplitude  # opposes the configured direction
    else:
        mag = wave.amplitude * math.sin(
            2.0 * math.pi * wave.frequency * (t - wave.onset))
    return BodyForce(f1=mag * dx, f2=mag * dy)
