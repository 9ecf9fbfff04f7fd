/** Session state machine against a scripted fake transport. */

import { describe, expect, it, vi } from "vitest";

import { frameBytes } from "../src/framing.js";
import {
  HELLO,
  TelemetryFrame,
  decodeCommand,
  decodeWave,
  encodeTelemetry,
} from "../src/protocol.js";
import { ConsoleSession, SessionPhase } from "../src/session.js";
import { Transport } from "../src/transport.js";
import { ConsoleViewModel } from "../src/viewmodel.js";

class FakeTransport implements Transport {
  sent: Uint8Array[] = [];
  closed = false;
  private dataCb: ((chunk: Uint8Array) => void) | null = null;
  private closeCb: (() => void) | null = null;

  send(data: Uint8Array): void {
    this.sent.push(data.slice());
  }
  close(): void {
    this.closed = true;
  }
  onData(cb: (chunk: Uint8Array) => void): void {
    this.dataCb = cb;
  }
  onClose(cb: () => void): void {
    this.closeCb = cb;
  }
  feed(data: Uint8Array): void {
    this.dataCb?.(data);
  }
  drop(): void {
    this.closeCb?.();
  }
}

function sampleTelemetry(overrides: Partial<TelemetryFrame> = {}): TelemetryFrame {
  return {
    seq: 1, tMs: 1000, xMm: 100, yMm: 0, zMm: 0, psiMrad: 0,
    v1Mms: 135, v2Mms: 0, wMms: 0, v6Mrads: 0,
    tempC: 25, humidity: 60, batteryMv: 12500, gripper: 0,
    ...overrides,
  };
}

async function activeSession() {
  const transport = new FakeTransport();
  const phases: SessionPhase[] = [];
  const vm = new ConsoleViewModel();
  const session = new ConsoleSession(
    async () => transport,
    { host: "h", port: 1, commandPeriodMs: 10_000 },
    {
      phase: (p) => phases.push(p),
      telemetry: (frame, arrival) => vm.apply(frame, arrival),
    },
  );
  await session.start();
  transport.feed(HELLO);
  transport.feed(frameBytes(encodeTelemetry(sampleTelemetry())));
  return { session, transport, phases, vm };
}

describe("handshake", () => {
  it("sends the hello and walks CONNECTING -> HANDSHAKE -> ACTIVE", async () => {
    const { session, transport, phases } = await activeSession();
    expect(Array.from(transport.sent[0]!)).toEqual(Array.from(HELLO));
    expect(phases).toEqual(["CONNECTING", "HANDSHAKE", "ACTIVE"]);
    session.stop();
  });

  it("stays in HANDSHAKE until telemetry arrives", async () => {
    const transport = new FakeTransport();
    const session = new ConsoleSession(async () => transport, { host: "h", port: 1 });
    await session.start();
    transport.feed(HELLO);
    expect(session.phase).toBe("HANDSHAKE");
    session.stop();
  });

  it("wrong hello magic is a hard error with no retry", async () => {
    const transport = new FakeTransport();
    const session = new ConsoleSession(
      async () => transport,
      { host: "h", port: 1, retryDelayMs: 5 },
    );
    await session.start();
    transport.feed(new TextEncoder().encode("NOPE"));
    expect(session.phase).toBe("ERROR");
    expect(transport.closed).toBe(true);
    await new Promise((r) => setTimeout(r, 30));
    expect(session.phase).toBe("ERROR"); // no silent reconnect
    session.stop();
  });

  it("handles the hello ack split across chunks", async () => {
    const transport = new FakeTransport();
    const session = new ConsoleSession(async () => transport, { host: "h", port: 1 });
    await session.start();
    transport.feed(HELLO.subarray(0, 2));
    expect(session.phase).toBe("CONNECTING");
    transport.feed(HELLO.subarray(2));
    expect(session.phase).toBe("HANDSHAKE");
    session.stop();
  });
});

describe("retry behavior", () => {
  it("unreachable server lands in RETRY and keeps trying", async () => {
    let attempts = 0;
    const session = new ConsoleSession(
      async () => {
        attempts += 1;
        throw new Error("refused");
      },
      { host: "h", port: 1, retryDelayMs: 5 },
    );
    await session.start();
    expect(session.phase).toBe("RETRY");
    await new Promise((r) => setTimeout(r, 40));
    expect(attempts).toBeGreaterThanOrEqual(2);
    session.stop();
  });

  it("a dropped connection goes back to RETRY", async () => {
    const { session, transport } = await activeSession();
    transport.drop();
    expect(session.phase).toBe("RETRY");
    session.stop();
  });
});

describe("telemetry path", () => {
  it("feeds the view-model and counts frames", async () => {
    const { session, transport, vm } = await activeSession();
    transport.feed(frameBytes(encodeTelemetry(sampleTelemetry({ seq: 2, xMm: 1234 }))));
    expect(session.framesReceived).toBe(2);
    expect(vm.latest?.xM).toBe(1.234);
    expect(vm.track.length).toBe(2);
    session.stop();
  });

  it("decodes frames split across arbitrary chunk boundaries", async () => {
    const { session, transport } = await activeSession();
    const framed = frameBytes(encodeTelemetry(sampleTelemetry({ seq: 3 })));
    for (const byte of framed) {
      transport.feed(new Uint8Array([byte]));
    }
    expect(session.framesReceived).toBe(2);
    session.stop();
  });

  it("counts corrupted frames without dying", async () => {
    const { session, transport } = await activeSession();
    const bad = encodeTelemetry(sampleTelemetry());
    bad[10]! ^= 0xff;
    transport.feed(frameBytes(bad));
    expect(session.decodeErrors).toBe(1);
    expect(session.phase).toBe("ACTIVE");
    session.stop();
  });
});

describe("command path", () => {
  it("only sends while ACTIVE", async () => {
    const transport = new FakeTransport();
    const session = new ConsoleSession(async () => transport, { host: "h", port: 1 });
    await session.start();
    transport.feed(HELLO);
    session.keyboard.keyDown("w");
    session.sendHeldCommand(); // HANDSHAKE: must be a no-op
    expect(session.framesSent).toBe(0);
    transport.feed(frameBytes(encodeTelemetry(sampleTelemetry())));
    session.sendHeldCommand();
    expect(session.framesSent).toBe(1);
    session.stop();
  });

  it("emits decodable, never-contradictory command frames", async () => {
    const { session, transport } = await activeSession();
    transport.sent.length = 0;
    session.keyboard.keyDown("w");
    session.keyboard.keyDown("s"); // opposite pair held together
    session.sendHeldCommand();
    const framed = transport.sent[0]!;
    expect(framed[0]).toBe(framed.length - 1);
    const frame = decodeCommand(framed.subarray(1));
    expect(frame.buttons).toBe(2); // BACK: last pressed wins
    session.stop();
  });

  it("starts the 10 Hz loop on ACTIVE", async () => {
    vi.useFakeTimers();
    try {
      const transport = new FakeTransport();
      const session = new ConsoleSession(
        async () => transport,
        { host: "h", port: 1, commandPeriodMs: 100 },
      );
      await session.start();
      transport.feed(HELLO);
      transport.feed(frameBytes(encodeTelemetry(sampleTelemetry())));
      session.keyboard.keyDown("w");
      vi.advanceTimersByTime(1000);
      expect(session.framesSent).toBe(10); // bounded at 10 Hz
      session.stop();
    } finally {
      vi.useRealTimers();
    }
  });

  it("wave injection emits a well-formed wave frame", async () => {
    const { session, transport } = await activeSession();
    transport.sent.length = 0;
    session.injectWave(3.12, 4.0, "pulse", 0.5);
    const frame = decodeWave(transport.sent[0]!.subarray(1));
    expect(frame.amplitudeCn).toBe(312);
    expect(frame.durationDs).toBe(40);
    expect(frame.profile).toBe(0);
    session.stop();
  });
});
