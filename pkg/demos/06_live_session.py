"""Live teleoperation end to end, in one process: server, socket, client.

Starts the teleop endpoint on a loopback port (sim running at 50x real
time with a shortened startup delay so the demo finishes quickly), connects
a scripted operator over the raw socket, holds FWD for a while, then turns.
Telemetry frames stream back at 10 Hz; a few are printed as the vehicle
accelerates.  The operator console in frontend/ speaks to exactly this
endpoint.
"""

import asyncio
from dataclasses import replace

from rovsim.simengine import ScenarioConfig
from rovsim.teleop import (HELLO, CommandFrame, LatencyProfile, TeleopServer,
                           decode_telemetry, encode_command, frame_bytes)
from rovsim.vehicle import Buttons

cfg = ScenarioConfig(
    goal=1e6, max_time=25.0, source="live",
    latency=LatencyProfile(startup_range=(1.0, 1.5), nav_range=(0.3, 0.5)),
    pace=50.0)


async def operator(port):
    reader, writer = await asyncio.open_connection("127.0.0.1", port)
    writer.write(HELLO)
    assert await reader.readexactly(4) == HELLO
    print("operator: handshake complete, holding FWD")
    seq = 0

    async def send(buttons):
        nonlocal seq
        seq += 1
        writer.write(frame_bytes(encode_command(CommandFrame(seq, buttons))))
        await writer.drain()

    held = int(Buttons.FWD)
    await send(held)
    shown = 0
    turned = False
    try:
        while True:
            prefix = await asyncio.wait_for(reader.readexactly(1), timeout=10)
            frame = decode_telemetry(await reader.readexactly(prefix[0]))
            if frame.t_s > 12.0 and not turned:
                print("operator: turning left")
                held = int(Buttons.FWD | Buttons.LEFT)
                turned = True
            # a real console repeats the held buttons at the telemetry rate,
            # which keeps the failsafe watchdog fed
            await send(held)
            if frame.t_ms % 2000 < 100 and shown < 12:
                print(f"  t={frame.t_s:6.2f}s  v1={frame.v1_ms:6.3f} m/s  "
                      f"x={frame.x_m:6.3f} m  psi={frame.psi_rad:+.3f} rad  "
                      f"battery={frame.battery_v:.2f} V")
                shown += 1
    except (asyncio.IncompleteReadError, asyncio.TimeoutError):
        pass
    writer.close()


async def main():
    server = TeleopServer(cfg, port=0)
    await server.start()
    port = server._server.sockets[0].getsockname()[1]
    print(f"server: listening on 127.0.0.1:{port} (pace {cfg.pace}x)")
    run = asyncio.create_task(server.run())
    op = asyncio.create_task(operator(port))
    log = await run
    op.cancel()
    print(f"server: session over ({log.status}), {len(log.records)} ticks, "
          f"{server.session.malformed} malformed frames")


asyncio.run(main())
