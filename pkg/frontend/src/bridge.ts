/**
 * WebSocket-to-TCP bridge for the browser console.
 *
 * Browsers cannot open raw TCP sockets, so the page connects to this bridge
 * over a WebSocket and the bridge shovels bytes unchanged to and from the
 * simulator's endpoint.  The console still speaks the exact wire format;
 * nothing is translated here.
 *
 *   node dist/bridge.js [ws-port] [tcp-host] [tcp-port]
 */

import net from "node:net";
import { WebSocketServer, WebSocket } from "ws";

const wsPort = Number(process.argv[2] ?? 8701);
const tcpHost = process.argv[3] ?? "127.0.0.1";
const tcpPort = Number(process.argv[4] ?? 8700);

const server = new WebSocketServer({ port: wsPort });
console.log(`bridge: ws://127.0.0.1:${wsPort} <-> tcp ${tcpHost}:${tcpPort}`);

server.on("connection", (ws: WebSocket) => {
  const tcp = net.createConnection({ host: tcpHost, port: tcpPort });
  console.log("bridge: operator connected, opening tcp leg");
  ws.binaryType = "nodebuffer";

  ws.on("message", (data: Buffer) => tcp.write(data));
  tcp.on("data", (data) => {
    if (ws.readyState === WebSocket.OPEN) {
      ws.send(data);
    }
  });

  const closeBoth = () => {
    tcp.destroy();
    if (ws.readyState === WebSocket.OPEN) {
      ws.close();
    }
  };
  ws.on("close", closeBoth);
  ws.on("error", closeBoth);
  tcp.on("close", closeBoth);
  tcp.on("error", closeBoth);
});
