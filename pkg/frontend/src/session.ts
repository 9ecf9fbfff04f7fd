/**
 * Operator session state machine.
 *
 * Connect, exchange the raw 4-byte "TRZ1" hello, then sit in HANDSHAKE
 * until the first telemetry frame arrives: the simulator stays silent for
 * the startup-delay window (6-8 s on stock settings), so the HANDSHAKE
 * phase visibly spans it.  Once ACTIVE, held keys are encoded into command
 * frames at a fixed 10 Hz (never faster, regardless of key repeat), each
 * guaranteed non-contradictory by construction.  An unreachable or dropped
 * server puts the session into RETRY with a timer; a server that answers
 * the hello with the wrong magic is a hard ERROR (no retry).
 */

import { FrameChunker, frameBytes } from "./framing.js";
import { KeyboardState } from "./keyboard.js";
import {
  HELLO,
  MAGIC,
  TYPE_TELEMETRY,
  TelemetryFrame,
  WaveFrame,
  decodeTelemetry,
  encodeCommand,
  encodeWave,
} from "./protocol.js";
import { Transport, TransportFactory } from "./transport.js";

export type SessionPhase =
  | "IDLE"
  | "CONNECTING"
  | "HANDSHAKE"
  | "ACTIVE"
  | "RETRY"
  | "ERROR"
  | "CLOSED";

export interface SessionOptions {
  host: string;
  port: number;
  commandPeriodMs?: number; // default 100 (10 Hz)
  retryDelayMs?: number; // default 1000
  now?: () => number; // injectable clock (ms)
}

export interface SessionEvents {
  phase?: (phase: SessionPhase, detail: string) => void;
  telemetry?: (frame: TelemetryFrame, arrivalMs: number) => void;
  sent?: (payload: Uint8Array) => void;
}

export class ConsoleSession {
  readonly keyboard = new KeyboardState();

  phase: SessionPhase = "IDLE";
  phaseChangedAt = 0;
  framesReceived = 0;
  framesSent = 0;
  decodeErrors = 0;

  private transport: Transport | null = null;
  private chunker = new FrameChunker();
  private helloBuffer = new Uint8Array(0);
  private helloDone = false;
  private seq = 0;
  private commandTimer: ReturnType<typeof setInterval> | null = null;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;
  private readonly now: () => number;
  private readonly commandPeriodMs: number;
  private readonly retryDelayMs: number;

  constructor(
    private readonly factory: TransportFactory,
    private readonly opts: SessionOptions,
    private readonly events: SessionEvents = {},
  ) {
    this.now = opts.now ?? (() => Date.now());
    this.commandPeriodMs = opts.commandPeriodMs ?? 100;
    this.retryDelayMs = opts.retryDelayMs ?? 1000;
  }

  private setPhase(phase: SessionPhase, detail = ""): void {
    this.phase = phase;
    this.phaseChangedAt = this.now();
    this.events.phase?.(phase, detail);
  }

  async start(): Promise<void> {
    if (this.stopped) {
      return;
    }
    this.setPhase("CONNECTING", `${this.opts.host}:${this.opts.port}`);
    try {
      this.transport = await this.factory(this.opts.host, this.opts.port);
    } catch (err) {
      this.scheduleRetry(`connect failed: ${String(err)}`);
      return;
    }
    this.helloBuffer = new Uint8Array(0);
    this.helloDone = false;
    this.chunker = new FrameChunker();
    this.transport.onData((chunk) => this.onData(chunk));
    this.transport.onClose(() => {
      if (!this.stopped && this.phase !== "ERROR") {
        this.stopCommandLoop();
        this.scheduleRetry("connection lost");
      }
    });
    this.transport.send(HELLO);
  }

  private scheduleRetry(detail: string): void {
    this.transport?.close();
    this.transport = null;
    if (this.stopped) {
      return;
    }
    this.setPhase("RETRY", detail);
    this.retryTimer = setTimeout(() => void this.start(), this.retryDelayMs);
  }

  private onData(chunk: Uint8Array): void {
    if (!this.helloDone) {
      const merged = new Uint8Array(this.helloBuffer.length + chunk.length);
      merged.set(this.helloBuffer);
      merged.set(chunk, this.helloBuffer.length);
      if (merged.length < HELLO.length) {
        this.helloBuffer = merged;
        return;
      }
      const ack = merged.subarray(0, HELLO.length);
      if (!bytesEqual(ack, HELLO)) {
        this.setPhase("ERROR", "server answered the hello with the wrong magic");
        this.transport?.close();
        this.transport = null;
        return;
      }
      this.helloDone = true;
      this.setPhase("HANDSHAKE", "waiting for the vehicle to come up");
      chunk = merged.subarray(HELLO.length);
      this.helloBuffer = new Uint8Array(0);
      if (chunk.length === 0) {
        return;
      }
    }
    const arrival = this.now();
    for (const frame of this.chunker.push(chunk)) {
      if (frame.length >= 2 && frame[0] === MAGIC && frame[1] === TYPE_TELEMETRY) {
        let telemetry: TelemetryFrame;
        try {
          telemetry = decodeTelemetry(frame);
        } catch {
          this.decodeErrors += 1;
          continue;
        }
        this.framesReceived += 1;
        if (this.phase === "HANDSHAKE") {
          this.setPhase("ACTIVE", "telemetry flowing");
          this.startCommandLoop();
        }
        this.events.telemetry?.(telemetry, arrival);
      } else {
        this.decodeErrors += 1;
      }
    }
  }

  private startCommandLoop(): void {
    this.stopCommandLoop();
    this.commandTimer = setInterval(() => this.sendHeldCommand(), this.commandPeriodMs);
  }

  private stopCommandLoop(): void {
    if (this.commandTimer !== null) {
      clearInterval(this.commandTimer);
      this.commandTimer = null;
    }
  }

  /** Encode and send the currently held buttons; ACTIVE sessions only. */
  sendHeldCommand(): void {
    if (this.phase !== "ACTIVE" || this.transport === null) {
      return;
    }
    this.seq = (this.seq + 1) & 0xffff;
    const payload = encodeCommand({ seq: this.seq, buttons: this.keyboard.mask() });
    this.transport.send(frameBytes(payload));
    this.framesSent += 1;
    this.events.sent?.(payload);
  }

  /** Ask the simulator for a what-if disturbance starting now. */
  injectWave(amplitudeN: number, durationS: number, profile: "pulse" | "sinusoid", frequencyHz = 0.5): void {
    if (this.phase !== "ACTIVE" || this.transport === null) {
      return;
    }
    this.seq = (this.seq + 1) & 0xffff;
    const frame: WaveFrame = {
      seq: this.seq,
      amplitudeCn: Math.max(0, Math.min(0xffff, Math.round(amplitudeN * 100))),
      durationDs: Math.max(0, Math.min(0xff, Math.round(durationS * 10))),
      profile: profile === "sinusoid" ? 1 : 0,
      frequencyDhz: Math.max(0, Math.min(0xff, Math.round(frequencyHz * 10))),
    };
    const payload = encodeWave(frame);
    this.transport.send(frameBytes(payload));
    this.framesSent += 1;
    this.events.sent?.(payload);
  }

  stop(): void {
    this.stopped = true;
    this.stopCommandLoop();
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
      this.retryTimer = null;
    }
    this.transport?.close();
    this.transport = null;
    this.setPhase("CLOSED");
  }
}

function bytesEqual(a: Uint8Array, b: Uint8Array): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}
