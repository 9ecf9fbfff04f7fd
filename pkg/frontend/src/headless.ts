/**
 * Terminal/headless operator: the same session core as the browser console,
 * over TCP, printing telemetry instead of drawing it.
 *
 *   node dist/headless.js [host] [port] [seconds]
 *
 * Holds forward for the whole run, prints one line per second of vehicle
 * time, then reports the session statistics (including the measured render
 * latency, where "render" is the view-model update).
 */

import { ConsoleSession } from "./session.js";
import { tcpTransport } from "./tcp.js";
import { Buttons } from "./protocol.js";
import { ConsoleViewModel } from "./viewmodel.js";

const host = process.argv[2] ?? "127.0.0.1";
const port = Number(process.argv[3] ?? 8700);
const seconds = Number(process.argv[4] ?? 20);

const vm = new ConsoleViewModel();
let lastPrinted = -1;

const session = new ConsoleSession(
  tcpTransport,
  { host, port },
  {
    phase: (phase, detail) => console.log(`[session] ${phase} ${detail}`),
    telemetry: (frame, arrival) => {
      const r = vm.apply(frame, arrival);
      if (Math.floor(r.tS) > lastPrinted) {
        lastPrinted = Math.floor(r.tS);
        console.log(
          `t=${r.tS.toFixed(1)}s  v1=${r.v1Ms.toFixed(3)}m/s  ` +
            `x=${r.xM.toFixed(2)}m  depth=${r.depthM.toFixed(2)}m  ` +
            `battery=${r.batteryV.toFixed(2)}V  gripper=${r.gripperPct}%`,
        );
      }
    },
  },
);

session.keyboard.keyDown("w"); // hold FWD for the whole session
void session.start();

setTimeout(() => {
  session.stop();
  console.log(
    `[stats] received=${session.framesReceived} sent=${session.framesSent} ` +
      `decodeErrors=${session.decodeErrors} ` +
      `maxRenderLatency=${vm.maxRenderLatencyMs().toFixed(1)}ms`,
  );
  process.exit(session.framesReceived > 0 ? 0 : 1);
}, seconds * 1000);
