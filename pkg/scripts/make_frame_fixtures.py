#!/usr/bin/env python3
"""Regenerate shared/frame_fixtures.json, the wire-format conformance vectors.

Both the Python test suite and the operator console test against these exact
bytes, so the two components can never drift apart silently.  Run from the
repository root:

    python3 scripts/make_frame_fixtures.py
"""

import json
from pathlib import Path

from rovsim.dynamics import VehicleState
from rovsim.teleop import (HELLO, CommandFrame, TelemetryFrame, WaveFrame,
                           crc8, encode_command, encode_telemetry, encode_wave)
from rovsim.vehicle import Buttons, SensorReadings


def command_fixtures():
    frames = [
        CommandFrame(seq=0, buttons=0),
        CommandFrame(seq=1, buttons=int(Buttons.FWD)),
        CommandFrame(seq=2, buttons=int(Buttons.BACK | Buttons.UP)),
        CommandFrame(seq=513, buttons=int(Buttons.LEFT | Buttons.GRIP_OPEN)),
        CommandFrame(seq=65535, buttons=int(Buttons.DOWN | Buttons.RIGHT
                                            | Buttons.GRIP_CLOSE)),
    ]
    return [{"seq": f.seq, "buttons": f.buttons,
             "hex": encode_command(f).hex()} for f in frames]


def telemetry_fixtures():
    samples = [
        (VehicleState(), SensorReadings(25, 60, 0.0, 12.5), 0),
        (VehicleState(v1=0.135, x=1.2345, t=12.34),
         SensorReadings(25, 60, 0.0, 12.5), 7),
        (VehicleState(v1=-0.5, v2=0.25, v6=-1.5, w=0.316, x=-3.2, y=0.75,
                      z=2.5, psi=2.5, gripper_angle=1.0, t=99.99),
         SensorReadings(31, 88, 2.5, 11.25), 4242),
    ]
    out = []
    for state, sensors, seq in samples:
        frame = TelemetryFrame.from_state(state, sensors, seq)
        out.append({
            "fields": {k: getattr(frame, k) for k in (
                "seq", "t_ms", "x_mm", "y_mm", "z_mm", "psi_mrad", "v1_mms",
                "v2_mms", "w_mms", "v6_mrads", "temp_c", "humidity",
                "battery_mv", "gripper")},
            "hex": encode_telemetry(frame).hex(),
        })
    return out


def wave_fixtures():
    frames = [
        WaveFrame(seq=1, amplitude_cn=312, duration_ds=40, profile=0,
                  frequency_dhz=5),
        WaveFrame(seq=2, amplitude_cn=1000, duration_ds=80, profile=1,
                  frequency_dhz=10),
    ]
    return [{"seq": f.seq, "amplitude_cn": f.amplitude_cn,
             "duration_ds": f.duration_ds, "profile": f.profile,
             "frequency_dhz": f.frequency_dhz,
             "hex": encode_wave(f).hex()} for f in frames]


def build():
    return {
        "crc8": {"poly": 7, "init": 0,
                 "check_input": "313233343536373839",
                 "check_value": crc8(b"123456789")},
        "hello": HELLO.hex(),
        "command": command_fixtures(),
        "telemetry": telemetry_fixtures(),
        "wave": wave_fixtures(),
    }


def main():
    root = Path(__file__).resolve().parent.parent
    out = root / "shared" / "frame_fixtures.json"
    out.parent.mkdir(exist_ok=True)
    out.write_text(json.dumps(build(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
