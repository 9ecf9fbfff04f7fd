/** Browser WebSocket transport (byte-transparent, via the TCP bridge). */

import { Transport, TransportFactory } from "./transport.js";

export const wsTransport: TransportFactory = (host, port) =>
  new Promise<Transport>((resolve, reject) => {
    const ws = new WebSocket(`ws://${host}:${port}`);
    ws.binaryType = "arraybuffer";
    let dataCb: ((chunk: Uint8Array) => void) | null = null;
    let closeCb: (() => void) | null = null;
    ws.onopen = () =>
      resolve({
        send: (data) => ws.send(data),
        close: () => ws.close(),
        onData: (cb) => {
          dataCb = cb;
        },
        onClose: (cb) => {
          closeCb = cb;
        },
      });
    ws.onmessage = (ev) => dataCb?.(new Uint8Array(ev.data as ArrayBuffer));
    ws.onclose = () => closeCb?.();
    ws.onerror = () => {
      if (ws.readyState !== WebSocket.OPEN) {
        reject(new Error("websocket connect failed"));
      }
      closeCb?.();
    };
  });
