/**
 * Stream framing: each frame travels behind a single length byte.  The
 * chunker reassembles frames from arbitrary transport chunk boundaries.
 */

export function frameBytes(payload: Uint8Array): Uint8Array {
  if (payload.length > 0xff) {
    throw new Error("frame too long for 1-byte length prefix");
  }
  const out = new Uint8Array(payload.length + 1);
  out[0] = payload.length;
  out.set(payload, 1);
  return out;
}

export class FrameChunker {
  private buffer = new Uint8Array(0);

  /** Feed a transport chunk; returns every complete frame it finished. */
  push(chunk: Uint8Array): Uint8Array[] {
    const merged = new Uint8Array(this.buffer.length + chunk.length);
    merged.set(this.buffer);
    merged.set(chunk, this.buffer.length);
    this.buffer = merged;

    const frames: Uint8Array[] = [];
    let offset = 0;
    while (offset < this.buffer.length) {
      const length = this.buffer[offset]!;
      if (offset + 1 + length > this.buffer.length) {
        break;
      }
      frames.push(this.buffer.slice(offset + 1, offset + 1 + length));
      offset += 1 + length;
    }
    this.buffer = this.buffer.slice(offset);
    return frames;
  }

  pendingBytes(): number {
    return this.buffer.length;
  }
}
