"""Teleoperation link: binary frame codecs, a seeded latency/loss emulator and
the socket endpoint that connects an operator console to a live simulation.

Wire format (all multi-byte fields little-endian, CRC-8 poly 0x07 init 0x00
over every preceding byte of the frame):

    command   (6 bytes):  A7 01 | seq u16 | buttons u8 | crc8
    telemetry (36 bytes): A7 02 | seq u16 | t_ms u32 | x,y,z i32 mm |
                          psi i16 mrad | v1,v2,w i16 mm/s | v6 i16 mrad/s |
                          temp i8 | humidity u8 | battery u16 mV |
                          gripper u8 (0 closed .. 255 open) | crc8
    wave      (10 bytes): A7 03 | seq u16 | amplitude u16 cN | duration u8 ds |
                          profile u8 (0 pulse, 1 sinusoid) | freq u8 dHz | crc8

The wave frame is the console's disturbance-injection control; the simulator
schedules the requested wave at the current simulation time on receipt.

Frames travel over a plain bidirectional byte-stream socket.  Each frame is
prefixed with one length byte; the session starts with a raw 4-byte hello
("TRZ1") in each direction.  The latency model, not the transport, supplies
the radio-like behavior: the first command of a session is held for the
startup-delay sample (6-8 s by default) and every later command for a
navigation-delay sample (2-3 s), with optional seeded loss.
"""

from __future__ import annotations

import asyncio
import math
import struct
from collections import deque
from dataclasses import dataclass
from random import Random
from typing import Optional

from .vehicle import Buttons, CommandRejected, validate_buttons

MAGIC = 0xA7
TYPE_COMMAND = 0x01
TYPE_TELEMETRY = 0x02
TYPE_WAVE = 0x03
HELLO = b"TRZ1"

COMMAND_SIZE = 6
TELEMETRY_SIZE = 36
WAVE_SIZE = 10

_TELEMETRY_STRUCT = struct.Struct("<BBHIiiihhhhhbBHB")
_COMMAND_STRUCT = struct.Struct("<BBHB")
_WAVE_STRUCT = struct.Struct("<BBHHBBB")


def _make_crc_table(poly: int = 0x07) -> tuple[int, ...]:
    table = []
    for byte in range(256):
        crc = byte
        for _ in range(8):
            crc = ((crc << 1) ^ poly) & 0xFF if crc & 0x80 else (crc << 1) & 0xFF
        table.append(crc)
    return tuple(table)


_CRC_TABLE = _make_crc_table()


def crc8(data: bytes, init: int = 0x00) -> int:
    """CRC-8, polynomial 0x07, init 0x00, no reflection or final xor."""
    crc = init
    for b in data:
        crc = _CRC_TABLE[crc ^ b]
    return crc


class ProtocolError(ValueError):
    """Base class for frame decode failures."""


class ShortFrame(ProtocolError):
    """Frame shorter than its fixed size."""


class BadMagic(ProtocolError):
    """Wrong magic or frame-type byte."""


class BadCrc(ProtocolError):
    """Checksum mismatch."""


class ContradictoryButtons(ProtocolError):
    """Button mask sets both halves of an exclusive pair."""


@dataclass(frozen=True)
class CommandFrame:
    seq: int
    buttons: int

    def __post_init__(self):
        if not 0 <= self.seq <= 0xFFFF:
            raise ValueError("seq must fit u16")
        validate_buttons(self.buttons)


def encode_command(frame: CommandFrame) -> bytes:
    body = _COMMAND_STRUCT.pack(MAGIC, TYPE_COMMAND, frame.seq, frame.buttons)
    return body + bytes([crc8(body)])


def decode_command(data: bytes) -> CommandFrame:
    if len(data) < COMMAND_SIZE:
        raise ShortFrame(f"command frame needs {COMMAND_SIZE} bytes, got {len(data)}")
    data = data[:COMMAND_SIZE]
    magic, ftype, seq, buttons = _COMMAND_STRUCT.unpack(data[:5])
    if magic != MAGIC or ftype != TYPE_COMMAND:
        raise BadMagic(f"bad magic/type {magic:#04x} {ftype:#04x}")
    if crc8(data[:5]) != data[5]:
        raise BadCrc(f"crc mismatch on command seq {seq}")
    try:
        validate_buttons(buttons)
    except CommandRejected as exc:
        raise ContradictoryButtons(str(exc)) from exc
    return CommandFrame(seq=seq, buttons=buttons)


def _wrap_pi(angle: float) -> float:
    return math.remainder(angle, 2.0 * math.pi)


def _quant(value: float, scale: float, lo: int, hi: int) -> int:
    q = int(round(value * scale))
    return min(max(q, lo), hi)


@dataclass(frozen=True)
class TelemetryFrame:
    """One telemetry sample in wire units (integers as transmitted).

    Physical values are available through the ``*_m`` / ``*_rad`` style
    properties; quantization error is at most half a wire quantum per field.
    """

    seq: int
    t_ms: int
    x_mm: int
    y_mm: int
    z_mm: int
    psi_mrad: int
    v1_mms: int
    v2_mms: int
    w_mms: int
    v6_mrads: int
    temp_c: int
    humidity: int
    battery_mv: int
    gripper: int

    @classmethod
    def from_state(cls, state, sensors, seq: int,
                   gripper_max_open: float = 1.0) -> "TelemetryFrame":
        frac = 0.0 if gripper_max_open <= 0 else state.gripper_angle / gripper_max_open
        return cls(
            seq=seq & 0xFFFF,
            t_ms=_quant(state.t, 1000.0, 0, 0xFFFFFFFF),
            x_mm=_quant(state.x, 1000.0, -(1 << 31), (1 << 31) - 1),
            y_mm=_quant(state.y, 1000.0, -(1 << 31), (1 << 31) - 1),
            z_mm=_quant(state.z, 1000.0, -(1 << 31), (1 << 31) - 1),
            psi_mrad=_quant(_wrap_pi(state.psi), 1000.0, -(1 << 15), (1 << 15) - 1),
            v1_mms=_quant(state.v1, 1000.0, -(1 << 15), (1 << 15) - 1),
            v2_mms=_quant(state.v2, 1000.0, -(1 << 15), (1 << 15) - 1),
            w_mms=_quant(state.w, 1000.0, -(1 << 15), (1 << 15) - 1),
            v6_mrads=_quant(state.v6, 1000.0, -(1 << 15), (1 << 15) - 1),
            temp_c=_quant(sensors.temperature, 1.0, -128, 127),
            humidity=_quant(sensors.humidity, 1.0, 0, 255),
            battery_mv=_quant(sensors.battery, 1000.0, 0, 0xFFFF),
            gripper=_quant(frac, 255.0, 0, 255),
        )

    @property
    def x_m(self):
        return self.x_mm / 1000.0

    @property
    def y_m(self):
        return self.y_mm / 1000.0

    @property
    def z_m(self):
        return self.z_mm / 1000.0

    @property
    def psi_rad(self):
        return self.psi_mrad / 1000.0

    @property
    def v1_ms(self):
        return self.v1_mms / 1000.0

    @property
    def v2_ms(self):
        return self.v2_mms / 1000.0

    @property
    def w_ms(self):
        return self.w_mms / 1000.0

    @property
    def v6_rads(self):
        return self.v6_mrads / 1000.0

    @property
    def battery_v(self):
        return self.battery_mv / 1000.0

    @property
    def t_s(self):
        return self.t_ms / 1000.0


def encode_telemetry(frame: TelemetryFrame) -> bytes:
    body = _TELEMETRY_STRUCT.pack(
        MAGIC, TYPE_TELEMETRY, frame.seq, frame.t_ms,
        frame.x_mm, frame.y_mm, frame.z_mm, frame.psi_mrad,
        frame.v1_mms, frame.v2_mms, frame.w_mms, frame.v6_mrads,
        frame.temp_c, frame.humidity, frame.battery_mv, frame.gripper)
    return body + bytes([crc8(body)])


def decode_telemetry(data: bytes) -> TelemetryFrame:
    if len(data) < TELEMETRY_SIZE:
        raise ShortFrame(f"telemetry frame needs {TELEMETRY_SIZE} bytes, got {len(data)}")
    data = data[:TELEMETRY_SIZE]
    fields = _TELEMETRY_STRUCT.unpack(data[:-1])
    if fields[0] != MAGIC or fields[1] != TYPE_TELEMETRY:
        raise BadMagic(f"bad magic/type {fields[0]:#04x} {fields[1]:#04x}")
    if crc8(data[:-1]) != data[-1]:
        raise BadCrc(f"crc mismatch on telemetry seq {fields[2]}")
    return TelemetryFrame(*fields[2:])


@dataclass(frozen=True)
class WaveFrame:
    """Console request to inject a disturbance, in wire units."""

    seq: int
    amplitude_cn: int   # centinewtons
    duration_ds: int    # deciseconds
    profile: int        # 0 pulse, 1 sinusoid
    frequency_dhz: int  # decihertz, sinusoid only

    @property
    def amplitude_n(self):
        return self.amplitude_cn / 100.0

    @property
    def duration_s(self):
        return self.duration_ds / 10.0

    @property
    def frequency_hz(self):
        return self.frequency_dhz / 10.0


def encode_wave(frame: WaveFrame) -> bytes:
    body = _WAVE_STRUCT.pack(MAGIC, TYPE_WAVE, frame.seq, frame.amplitude_cn,
                             frame.duration_ds, frame.profile, frame.frequency_dhz)
    return body + bytes([crc8(body)])


def decode_wave(data: bytes) -> WaveFrame:
    if len(data) < WAVE_SIZE:
        raise ShortFrame(f"wave frame needs {WAVE_SIZE} bytes, got {len(data)}")
    data = data[:WAVE_SIZE]
    fields = _WAVE_STRUCT.unpack(data[:-1])
    if fields[0] != MAGIC or fields[1] != TYPE_WAVE:
        raise BadMagic(f"bad magic/type {fields[0]:#04x} {fields[1]:#04x}")
    if crc8(data[:-1]) != data[-1]:
        raise BadCrc(f"crc mismatch on wave seq {fields[2]}")
    if fields[5] not in (0, 1):
        raise ProtocolError(f"unknown wave profile code {fields[5]}")
    return WaveFrame(*fields[2:])


@dataclass(frozen=True)
class LatencyProfile:
    """Seeded link delays: one startup sample per session, one navigation
    sample per later frame, optional loss probability."""

    startup_range: tuple[float, float] = (6.0, 8.0)
    nav_range: tuple[float, float] = (2.0, 3.0)
    loss: float = 0.0
    delay_telemetry: bool = False  # symmetrize: telemetry also rides the link

    def __post_init__(self):
        for lo, hi in (self.startup_range, self.nav_range):
            if lo < 0.0 or hi < lo:
                raise ValueError("delay ranges need 0 <= low <= high")
        if not 0.0 <= self.loss <= 1.0:
            raise ValueError("loss must be a probability")


class LinkEmulator:
    """FIFO link with per-frame sampled delay, seeded loss and a bounded queue.

    The first frame enqueued after :meth:`open` is held for the startup-delay
    sample; every later frame gets a navigation-delay sample.  Delivery times
    are clamped to be non-decreasing so surviving frames keep their order.
    A full queue drops its oldest entry and counts the drop.
    """

    QUEUE_LIMIT = 1024

    def __init__(self, profile: LatencyProfile, seed: int = 0):
        self.profile = profile
        self._rng = Random(seed)
        self._queue: deque = deque()
        self._last_sched = -math.inf
        self._awaiting_first = False
        self.startup_sample: Optional[float] = None
        self.active_at = -math.inf
        self.dropped_loss = 0
        self.dropped_overflow = 0

    def open(self, t: float) -> float:
        """Start a session at time t; returns the startup-delay sample."""
        lo, hi = self.profile.startup_range
        self.startup_sample = self._rng.uniform(lo, hi)
        self.active_at = t + self.startup_sample
        self._awaiting_first = True
        return self.startup_sample

    @classmethod
    def already_active(cls, profile: LatencyProfile, seed: int = 0) -> "LinkEmulator":
        """Link for a session whose startup completed before the clock began.

        The startup sample is still drawn (and discarded) so the delay stream
        for a given seed does not depend on how the session was opened.
        """
        link = cls(profile, seed)
        link.open(0.0)
        link.active_at = 0.0
        link._awaiting_first = False
        return link

    def is_active(self, t: float) -> bool:
        return t >= self.active_at

    def enqueue(self, item, t: float) -> Optional[float]:
        """Schedule a frame sent at time t; returns its delivery time, or
        None if the seeded coin dropped it."""
        if self.startup_sample is None:
            raise RuntimeError("link not opened")
        if self._awaiting_first:
            delay = self.startup_sample
            self._awaiting_first = False
        else:
            lo, hi = self.profile.nav_range
            delay = self._rng.uniform(lo, hi)
        if self.profile.loss > 0.0 and self._rng.random() < self.profile.loss:
            self.dropped_loss += 1
            return None
        deliver_at = max(t + delay, self._last_sched)
        self._last_sched = deliver_at
        if len(self._queue) >= self.QUEUE_LIMIT:
            self._queue.popleft()
            self.dropped_overflow += 1
        self._queue.append((deliver_at, item))
        return deliver_at

    def poll(self, t: float) -> list:
        """Pop and return every (deliver_at, item) due at or before time t."""
        out = []
        while self._queue and self._queue[0][0] <= t:
            out.append(self._queue.popleft())
        return out

    def pending(self) -> int:
        return len(self._queue)


class LiveSession:
    """Sim-time session state machine between one operator and the vehicle.

    Phases: LISTENING until a client completes the hello, HANDSHAKE while the
    startup delay runs, then ACTIVE.  Malformed frames are counted and
    dropped without ending the session.  The failsafe neutralizes the command
    when the link has been silent longer than the watchdog, and immediately
    on disconnect.
    """

    def __init__(self, profile: LatencyProfile, seed: int = 0,
                 watchdog: float = 5.0):
        self.link = LinkEmulator(profile, seed)
        self.watchdog = watchdog
        self.connected = False
        self.opened_at: Optional[float] = None
        self.malformed = 0
        self._buttons = Buttons.NONE
        self._last_delivery: Optional[float] = None

    def open(self, t: float) -> float:
        self.connected = True
        self.opened_at = t
        return self.link.open(t)

    def phase(self, t: float) -> str:
        if not self.connected or self.opened_at is None:
            return "LISTENING"
        return "ACTIVE" if self.link.is_active(t) else "HANDSHAKE"

    def handle_frame(self, data: bytes, t: float):
        """Decode one framed payload; commands enter the delayed link.

        Returns ("command", frame, deliver_at) or ("wave", frame, t), or None
        when the frame was malformed (counted) or lost.
        """
        try:
            if len(data) >= 2 and data[0] == MAGIC and data[1] == TYPE_WAVE:
                return ("wave", decode_wave(data), t)
            frame = decode_command(data)
        except ProtocolError:
            self.malformed += 1
            return None
        deliver_at = self.link.enqueue(frame.buttons, t)
        if deliver_at is None:
            return None
        return ("command", frame, deliver_at)

    def poll_command(self, t: float) -> Buttons:
        """Latest delivered command at time t, after the failsafe rules."""
        for deliver_at, buttons in self.link.poll(t):
            self._buttons = Buttons(buttons)
            self._last_delivery = deliver_at
        if not self.connected:
            return Buttons.NONE
        if (self._last_delivery is not None
                and t - self._last_delivery > self.watchdog):
            return Buttons.NONE
        return self._buttons

    def disconnect(self):
        self.connected = False
        self._buttons = Buttons.NONE


async def _read_frame(reader: asyncio.StreamReader) -> Optional[bytes]:
    """Read one length-prefixed frame; None on EOF."""
    try:
        prefix = await reader.readexactly(1)
        return await reader.readexactly(prefix[0])
    except (asyncio.IncompleteReadError, ConnectionError):
        return None


def frame_bytes(payload: bytes) -> bytes:
    """Length-prefix a frame for the stream transport."""
    if len(payload) > 0xFF:
        raise ValueError("frame too long for 1-byte length prefix")
    return bytes([len(payload)]) + payload


class TeleopServer:
    """One-operator teleoperation endpoint bound to a live scenario runner.

    The socket handler and the simulation loop run as independent asyncio
    tasks; they share nothing but the session object's two queues (commands
    in through the latency link, telemetry snapshots out).
    """

    def __init__(self, cfg, host: str = "127.0.0.1", port: int = 8700,
                 pace: float | None = None):
        from .simengine import ScenarioRunner  # runtime import, avoids a cycle

        self.cfg = cfg
        self.host = host
        self.port = port
        self.pace = pace if pace is not None else cfg.pace
        self.runner = ScenarioRunner(cfg)
        self.session = LiveSession(cfg.latency, seed=cfg.seed,
                                   watchdog=cfg.watchdog_s)
        self._writer: Optional[asyncio.StreamWriter] = None
        self._claimed = False
        self._server: Optional[asyncio.AbstractServer] = None
        self._stop = asyncio.Event()
        self._telemetry_seq = 0
        self._telemetry_link: Optional[LinkEmulator] = None
        self.rejected_operators = 0

    async def start(self):
        self._server = await asyncio.start_server(
            self._on_client, self.host, self.port)

    async def _on_client(self, reader: asyncio.StreamReader,
                         writer: asyncio.StreamWriter):
        if self._claimed:  # one operator at a time
            self.rejected_operators += 1
            writer.close()
            return
        self._claimed = True
        try:
            hello = await reader.readexactly(4)
        except (asyncio.IncompleteReadError, ConnectionError):
            self._claimed = False
            writer.close()
            return
        if hello != HELLO:
            self._claimed = False
            writer.close()
            return
        writer.write(HELLO)
        await writer.drain()
        self._writer = writer
        self.session.open(self.runner.t)
        if self.cfg.latency.delay_telemetry:
            self._telemetry_link = LinkEmulator.already_active(
                self.cfg.latency, seed=self.cfg.seed + 1)
        try:
            while True:
                data = await _read_frame(reader)
                if data is None:
                    break
                event = self.session.handle_frame(data, self.runner.t)
                if event is not None and event[0] == "wave":
                    self.runner.inject_wave(event[1])
        finally:
            self.session.disconnect()
            self._writer = None
            self._claimed = False
            writer.close()

    def _publish_telemetry(self):
        frame = TelemetryFrame.from_state(
            self.runner.state, self.runner.sensors, self._telemetry_seq,
            self.cfg.vehicle.gripper_max_open)
        self._telemetry_seq = (self._telemetry_seq + 1) & 0xFFFF
        payload = encode_telemetry(frame)
        if self._telemetry_link is not None:
            self._telemetry_link.enqueue(payload, self.runner.t)
        elif self._writer is not None:
            self._writer.write(frame_bytes(payload))

    async def run(self):
        """Paced simulation loop; returns the trial log when the run ends."""
        await self.start()
        loop = asyncio.get_running_loop()
        dt = self.cfg.dt
        t_wall0 = loop.time()
        t_sim0 = self.runner.t
        tick = 0
        try:
            while not self._stop.is_set() and self.runner.status is None:
                buttons = self.session.poll_command(self.runner.t)
                self.runner.tick(buttons)
                active = self.session.phase(self.runner.t) == "ACTIVE"
                if active and tick % self.cfg.telemetry_every == 0:
                    self._publish_telemetry()
                if self._telemetry_link is not None and self._writer is not None:
                    for _, payload in self._telemetry_link.poll(self.runner.t):
                        self._writer.write(frame_bytes(payload))
                tick += 1
                if self.pace > 0:
                    target = t_wall0 + (self.runner.t - t_sim0) / self.pace
                    delay = target - loop.time()
                    if delay > 0:
                        await asyncio.sleep(delay)
                    else:
                        await asyncio.sleep(0)
                else:
                    await asyncio.sleep(0)
        finally:
            await self.close()
        return self.runner.finish()

    def stop(self):
        self._stop.set()

    async def close(self):
        if self._writer is not None:
            self._writer.close()
            self._writer = None
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None


def serve(cfg, host: str = "127.0.0.1", port: int = 8700,
          pace: float | None = None):
    """Blocking wrapper: run a live teleoperated scenario until it ends.

    An interrupt shuts the session down cleanly and still returns the
    complete log accumulated so far.
    """
    server = TeleopServer(cfg, host, port, pace)
    try:
        return asyncio.run(server.run())
    except KeyboardInterrupt:
        return server.runner.finish()
