/**
 * Wire codec for the vehicle teleoperation link.
 *
 * Every frame starts with the magic byte 0xA7 and a type byte, ends with a
 * CRC-8 (polynomial 0x07, init 0x00) over all preceding bytes, and uses
 * little-endian multi-byte fields.  Layouts are locked by the conformance
 * vectors in ../shared/frame_fixtures.json, which the simulator generates;
 * both ends test against those exact bytes.
 */

export const MAGIC = 0xa7;
export const TYPE_COMMAND = 0x01;
export const TYPE_TELEMETRY = 0x02;
export const TYPE_WAVE = 0x03;
export const HELLO = new Uint8Array([0x54, 0x52, 0x5a, 0x31]); // "TRZ1"

export const COMMAND_SIZE = 6;
export const TELEMETRY_SIZE = 36;
export const WAVE_SIZE = 10;

export enum Buttons {
  NONE = 0,
  FWD = 1,
  BACK = 2,
  LEFT = 4,
  RIGHT = 8,
  UP = 16,
  DOWN = 32,
  GRIP_OPEN = 64,
  GRIP_CLOSE = 128,
}

const EXCLUSIVE_PAIRS: Array<[number, number]> = [
  [Buttons.FWD, Buttons.BACK],
  [Buttons.UP, Buttons.DOWN],
  [Buttons.GRIP_OPEN, Buttons.GRIP_CLOSE],
];

export function isContradictory(mask: number): boolean {
  return EXCLUSIVE_PAIRS.some(([a, b]) => (mask & a) !== 0 && (mask & b) !== 0);
}

const CRC_TABLE = buildCrcTable(0x07);

function buildCrcTable(poly: number): Uint8Array {
  const table = new Uint8Array(256);
  for (let byte = 0; byte < 256; byte++) {
    let crc = byte;
    for (let bit = 0; bit < 8; bit++) {
      crc = crc & 0x80 ? ((crc << 1) ^ poly) & 0xff : (crc << 1) & 0xff;
    }
    table[byte] = crc;
  }
  return table;
}

export function crc8(data: Uint8Array, init = 0): number {
  let crc = init;
  for (const byte of data) {
    crc = CRC_TABLE[(crc ^ byte) & 0xff]!;
  }
  return crc;
}

export class ProtocolError extends Error {}

export interface CommandFrame {
  seq: number;
  buttons: number;
}

export function encodeCommand(frame: CommandFrame): Uint8Array {
  if (isContradictory(frame.buttons)) {
    throw new ProtocolError(`contradictory button mask 0x${frame.buttons.toString(16)}`);
  }
  const out = new Uint8Array(COMMAND_SIZE);
  const view = new DataView(out.buffer);
  view.setUint8(0, MAGIC);
  view.setUint8(1, TYPE_COMMAND);
  view.setUint16(2, frame.seq & 0xffff, true);
  view.setUint8(4, frame.buttons & 0xff);
  out[5] = crc8(out.subarray(0, 5));
  return out;
}

export function decodeCommand(data: Uint8Array): CommandFrame {
  if (data.length < COMMAND_SIZE) {
    throw new ProtocolError(`short command frame: ${data.length} bytes`);
  }
  const view = new DataView(data.buffer, data.byteOffset, COMMAND_SIZE);
  if (view.getUint8(0) !== MAGIC || view.getUint8(1) !== TYPE_COMMAND) {
    throw new ProtocolError("bad command magic/type");
  }
  if (crc8(data.subarray(0, 5)) !== view.getUint8(5)) {
    throw new ProtocolError("command crc mismatch");
  }
  const frame = { seq: view.getUint16(2, true), buttons: view.getUint8(4) };
  if (isContradictory(frame.buttons)) {
    throw new ProtocolError("contradictory buttons on the wire");
  }
  return frame;
}

/** Telemetry sample in wire units (integers exactly as transmitted). */
export interface TelemetryFrame {
  seq: number;
  tMs: number;
  xMm: number;
  yMm: number;
  zMm: number;
  psiMrad: number;
  v1Mms: number;
  v2Mms: number;
  wMms: number;
  v6Mrads: number;
  tempC: number;
  humidity: number;
  batteryMv: number;
  gripper: number;
}

export function decodeTelemetry(data: Uint8Array): TelemetryFrame {
  if (data.length < TELEMETRY_SIZE) {
    throw new ProtocolError(`short telemetry frame: ${data.length} bytes`);
  }
  const view = new DataView(data.buffer, data.byteOffset, TELEMETRY_SIZE);
  if (view.getUint8(0) !== MAGIC || view.getUint8(1) !== TYPE_TELEMETRY) {
    throw new ProtocolError("bad telemetry magic/type");
  }
  if (crc8(data.subarray(0, TELEMETRY_SIZE - 1)) !== view.getUint8(TELEMETRY_SIZE - 1)) {
    throw new ProtocolError("telemetry crc mismatch");
  }
  return {
    seq: view.getUint16(2, true),
    tMs: view.getUint32(4, true),
    xMm: view.getInt32(8, true),
    yMm: view.getInt32(12, true),
    zMm: view.getInt32(16, true),
    psiMrad: view.getInt16(20, true),
    v1Mms: view.getInt16(22, true),
    v2Mms: view.getInt16(24, true),
    wMms: view.getInt16(26, true),
    v6Mrads: view.getInt16(28, true),
    tempC: view.getInt8(30),
    humidity: view.getUint8(31),
    batteryMv: view.getUint16(32, true),
    gripper: view.getUint8(34),
  };
}

export function encodeTelemetry(frame: TelemetryFrame): Uint8Array {
  const out = new Uint8Array(TELEMETRY_SIZE);
  const view = new DataView(out.buffer);
  view.setUint8(0, MAGIC);
  view.setUint8(1, TYPE_TELEMETRY);
  view.setUint16(2, frame.seq & 0xffff, true);
  view.setUint32(4, frame.tMs >>> 0, true);
  view.setInt32(8, frame.xMm, true);
  view.setInt32(12, frame.yMm, true);
  view.setInt32(16, frame.zMm, true);
  view.setInt16(20, frame.psiMrad, true);
  view.setInt16(22, frame.v1Mms, true);
  view.setInt16(24, frame.v2Mms, true);
  view.setInt16(26, frame.wMms, true);
  view.setInt16(28, frame.v6Mrads, true);
  view.setInt8(30, frame.tempC);
  view.setUint8(31, frame.humidity);
  view.setUint16(32, frame.batteryMv, true);
  view.setUint8(34, frame.gripper);
  out[TELEMETRY_SIZE - 1] = crc8(out.subarray(0, TELEMETRY_SIZE - 1));
  return out;
}

/** Disturbance-injection request, for what-if experiments from the console. */
export interface WaveFrame {
  seq: number;
  amplitudeCn: number; // centinewtons
  durationDs: number; // deciseconds
  profile: number; // 0 pulse, 1 sinusoid
  frequencyDhz: number; // decihertz
}

export function encodeWave(frame: WaveFrame): Uint8Array {
  const out = new Uint8Array(WAVE_SIZE);
  const view = new DataView(out.buffer);
  view.setUint8(0, MAGIC);
  view.setUint8(1, TYPE_WAVE);
  view.setUint16(2, frame.seq & 0xffff, true);
  view.setUint16(4, frame.amplitudeCn & 0xffff, true);
  view.setUint8(6, frame.durationDs & 0xff);
  view.setUint8(7, frame.profile & 0xff);
  view.setUint8(8, frame.frequencyDhz & 0xff);
  out[WAVE_SIZE - 1] = crc8(out.subarray(0, WAVE_SIZE - 1));
  return out;
}

export function decodeWave(data: Uint8Array): WaveFrame {
  if (data.length < WAVE_SIZE) {
    throw new ProtocolError(`short wave frame: ${data.length} bytes`);
  }
  const view = new DataView(data.buffer, data.byteOffset, WAVE_SIZE);
  if (view.getUint8(0) !== MAGIC || view.getUint8(1) !== TYPE_WAVE) {
    throw new ProtocolError("bad wave magic/type");
  }
  if (crc8(data.subarray(0, WAVE_SIZE - 1)) !== view.getUint8(WAVE_SIZE - 1)) {
    throw new ProtocolError("wave crc mismatch");
  }
  return {
    seq: view.getUint16(2, true),
    amplitudeCn: view.getUint16(4, true),
    durationDs: view.getUint8(6),
    profile: view.getUint8(7),
    frequencyDhz: view.getUint8(8),
  };
}

export function toHex(data: Uint8Array): string {
  return Array.from(data, (b) => b.toString(16).padStart(2, "0")).join("");
}

export function fromHex(hex: string): Uint8Array {
  const out = new Uint8Array(hex.length / 2);
  for (let i = 0; i < out.length; i++) {
    out[i] = parseInt(hex.slice(2 * i, 2 * i + 2), 16);
  }
  return out;
}
