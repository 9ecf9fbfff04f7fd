"""End-to-end socket tests: a scripted client drives the live endpoint."""

import asyncio
from dataclasses import replace

import pytest

from rovsim.simengine import ScenarioConfig
from rovsim.teleop import (HELLO, CommandFrame, LatencyProfile, TeleopServer,
                           decode_telemetry, encode_command, frame_bytes)
from rovsim.vehicle import Buttons

FAST_LINK = LatencyProfile(startup_range=(0.1, 0.15), nav_range=(0.02, 0.05))


def live_cfg(**kw):
    base = ScenarioConfig(
        goal=1e6, dt=0.01, max_time=kw.pop("max_time", 8.0),
        latency=FAST_LINK, source="live", telemetry_every=10, pace=0.0)
    return replace(base, **kw)


async def read_frame(reader):
    prefix = await asyncio.wait_for(reader.readexactly(1), timeout=5.0)
    return await asyncio.wait_for(reader.readexactly(prefix[0]), timeout=5.0)


async def connect(port):
    reader, writer = await asyncio.open_connection("127.0.0.1", port)
    writer.write(HELLO)
    ack = await asyncio.wait_for(reader.readexactly(4), timeout=5.0)
    assert ack == HELLO
    return reader, writer


def test_command_drives_vehicle_and_telemetry_flows():
    async def main():
        server = TeleopServer(live_cfg(), port=0)
        await server.start()
        port = server._server.sockets[0].getsockname()[1]
        run_task = asyncio.create_task(server.run())

        reader, writer = await connect(port)
        writer.write(frame_bytes(encode_command(
            CommandFrame(1, int(Buttons.FWD)))))
        await writer.drain()

        frames = []
        while len(frames) < 40:
            frames.append(decode_telemetry(await read_frame(reader)))
        writer.close()
        log = await run_task
        return frames, log, server

    frames, log, server = asyncio.run(main())
    assert frames[0].v1_mms == 0  # pre-delivery: still at rest
    assert max(f.v1_mms for f in frames) > 100  # and then it moved
    times = [f.t_ms for f in frames]
    assert times == sorted(times)
    assert log.status == "TIMEOUT"  # ran to max_time after the disconnect


def test_disconnect_neutralizes_within_one_tick():
    async def main():
        server = TeleopServer(live_cfg(max_time=6.0), port=0)
        await server.start()
        port = server._server.sockets[0].getsockname()[1]
        run_task = asyncio.create_task(server.run())

        reader, writer = await connect(port)
        writer.write(frame_bytes(encode_command(
            CommandFrame(1, int(Buttons.FWD)))))
        await writer.drain()
        # wait until the command actually bites, then drop the link
        while True:
            frame = decode_telemetry(await read_frame(reader))
            if frame.v1_mms > 0:
                break
        writer.close()
        return await run_task

    log = asyncio.run(main())
    cmds = [r.cmd for r in log.records]
    assert int(Buttons.FWD) in cmds  # drove for a while
    assert cmds[-1] == 0             # neutral after the disconnect
    first_cmd = cmds.index(int(Buttons.FWD))
    last_cmd = len(cmds) - 1 - cmds[::-1].index(int(Buttons.FWD))
    assert all(c == 0 for c in cmds[last_cmd + 1:])
    assert last_cmd > first_cmd


def test_second_operator_rejected_and_garbage_tolerated():
    async def main():
        server = TeleopServer(live_cfg(max_time=5.0), port=0)
        await server.start()
        port = server._server.sockets[0].getsockname()[1]
        run_task = asyncio.create_task(server.run())

        reader, writer = await connect(port)
        # a second operator gets the door closed on it (EOF or reset)
        r2, w2 = await asyncio.open_connection("127.0.0.1", port)
        try:
            w2.write(HELLO)
            got = await r2.read(4)
        except ConnectionResetError:
            got = b""
        assert got == b""
        w2.close()

        # garbage is counted and dropped without killing the session
        writer.write(frame_bytes(b"\xde\xad\xbe\xef\x00\x00"))
        writer.write(frame_bytes(encode_command(
            CommandFrame(2, int(Buttons.FWD)))))
        await writer.drain()
        frame = decode_telemetry(await read_frame(reader))
        assert frame is not None
        writer.close()
        log = await run_task
        return server, log

    server, log = asyncio.run(main())
    assert server.rejected_operators == 1
    assert server.session.malformed == 1
    assert log.status == "TIMEOUT"


def test_wrong_hello_magic_closes_connection():
    async def main():
        server = TeleopServer(live_cfg(max_time=2.0), port=0)
        await server.start()
        port = server._server.sockets[0].getsockname()[1]
        run_task = asyncio.create_task(server.run())
        reader, writer = await asyncio.open_connection("127.0.0.1", port)
        writer.write(b"NOPE")
        assert await reader.read(4) == b""  # server hangs up
        writer.close()
        server.stop()
        await run_task

    asyncio.run(main())


def test_wave_injection_disturbs_the_run():
    from rovsim.teleop import WaveFrame, encode_wave

    async def main():
        server = TeleopServer(live_cfg(max_time=6.0), port=0)
        await server.start()
        port = server._server.sockets[0].getsockname()[1]
        run_task = asyncio.create_task(server.run())

        reader, writer = await connect(port)
        writer.write(frame_bytes(encode_command(
            CommandFrame(1, int(Buttons.FWD)))))
        await writer.drain()
        while True:
            frame = decode_telemetry(await read_frame(reader))
            if frame.v1_mms > 120:  # close to cruise speed
                break
        writer.write(frame_bytes(encode_wave(
            WaveFrame(seq=2, amplitude_cn=1000, duration_ds=30, profile=0,
                      frequency_dhz=5))))
        await writer.drain()
        dipped = False
        for _ in range(200):
            frame = decode_telemetry(await read_frame(reader))
            if frame.v1_mms < 60:
                dipped = True
                break
        writer.close()
        await run_task
        return dipped

    assert asyncio.run(main())
