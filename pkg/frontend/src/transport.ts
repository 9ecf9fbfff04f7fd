/** Byte-stream transport abstraction: TCP under Node, WebSocket bridge in
 * the browser.  The session only ever sees ordered byte chunks. */

export interface Transport {
  send(data: Uint8Array): void;
  close(): void;
  onData(cb: (chunk: Uint8Array) => void): void;
  onClose(cb: () => void): void;
}

export type TransportFactory = (host: string, port: number) => Promise<Transport>;
