/** Node TCP transport: the direct way to reach the simulator's endpoint. */

import net from "node:net";

import { Transport, TransportFactory } from "./transport.js";

export const tcpTransport: TransportFactory = (host, port) =>
  new Promise<Transport>((resolve, reject) => {
    const socket = net.createConnection({ host, port });
    socket.once("connect", () => {
      socket.removeListener("error", reject);
      resolve({
        send: (data) => socket.write(data),
        close: () => socket.destroy(),
        onData: (cb) => socket.on("data", (buf) => cb(new Uint8Array(buf))),
        onClose: (cb) => {
          socket.on("close", cb);
          socket.on("error", () => socket.destroy());
        },
      });
    });
    socket.once("error", reject);
  });
