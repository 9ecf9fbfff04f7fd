/**
 * Browser operator console.
 *
 * Wires the session core to the DOM: phase banner, live gauges (depth,
 * temperature, humidity, battery, gripper), a top-down XY track, strip
 * charts of surge velocity and displacement, keyboard/button teleop and
 * the wave-injection control.  Keys: W/S surge, A/D yaw, Q/E heave,
 * O/C gripper.
 */

import { KEY_BINDINGS } from "./keyboard.js";
import { Buttons } from "./protocol.js";
import { ConsoleSession, SessionPhase } from "./session.js";
import { ConsoleViewModel, SeriesPoint } from "./viewmodel.js";
import { wsTransport } from "./ws.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
};

const vm = new ConsoleViewModel(4000, () => performance.now());
let session: ConsoleSession | null = null;

const phaseBanner = $("phase");
const buttonsRow = $("buttons");

function setBanner(phase: SessionPhase, detail: string): void {
  phaseBanner.textContent = detail ? `${phase} — ${detail}` : phase;
  phaseBanner.className = `phase phase-${phase.toLowerCase()}`;
}

function connect(): void {
  session?.stop();
  const host = ($("host") as HTMLInputElement).value || "127.0.0.1";
  const port = Number(($("port") as HTMLInputElement).value || 8701);
  session = new ConsoleSession(
    wsTransport,
    { host, port, now: () => performance.now() },
    {
      phase: setBanner,
      telemetry: (frame, arrival) => {
        vm.apply(frame, arrival);
        updateGauges();
      },
    },
  );
  void session.start();
}

function updateGauges(): void {
  const r = vm.latest;
  if (r === null) {
    return;
  }
  $("g-depth").textContent = r.depthM.toFixed(2);
  $("g-temp").textContent = String(r.tempC);
  $("g-hum").textContent = String(r.humidity);
  $("g-batt").textContent = r.batteryV.toFixed(2);
  $("g-grip").textContent = String(r.gripperPct);
  $("g-v1").textContent = (100 * r.v1Ms).toFixed(1);
  $("g-x").textContent = r.xM.toFixed(2);
  $("g-psi").textContent = ((r.psiRad * 180) / Math.PI).toFixed(0);
  $("g-t").textContent = r.tS.toFixed(1);
}

// --- canvas drawing ---------------------------------------------------------

function drawSeries(canvas: HTMLCanvasElement, series: SeriesPoint[], color: string, label: string): void {
  const ctx = canvas.getContext("2d")!;
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#334";
  ctx.strokeRect(0.5, 0.5, w - 1, h - 1);
  ctx.fillStyle = "#9ab";
  ctx.font = "11px sans-serif";
  ctx.fillText(label, 6, 14);
  if (series.length < 2) {
    return;
  }
  const t0 = series[0]!.t;
  const t1 = series[series.length - 1]!.t;
  let lo = Infinity;
  let hi = -Infinity;
  for (const p of series) {
    lo = Math.min(lo, p.value);
    hi = Math.max(hi, p.value);
  }
  if (hi - lo < 1e-9) {
    hi = lo + 1e-9;
  }
  ctx.fillText(hi.toFixed(2), 6, 26);
  ctx.fillText(lo.toFixed(2), 6, h - 6);
  ctx.strokeStyle = color;
  ctx.beginPath();
  series.forEach((p, i) => {
    const x = ((p.t - t0) / Math.max(t1 - t0, 1e-9)) * (w - 10) + 5;
    const y = h - 5 - ((p.value - lo) / (hi - lo)) * (h - 30);
    if (i === 0) {
      ctx.moveTo(x, y);
    } else {
      ctx.lineTo(x, y);
    }
  });
  ctx.stroke();
}

function drawTrack(canvas: HTMLCanvasElement): void {
  const ctx = canvas.getContext("2d")!;
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#334";
  ctx.strokeRect(0.5, 0.5, w - 1, h - 1);
  ctx.fillStyle = "#9ab";
  ctx.font = "11px sans-serif";
  ctx.fillText("top-down track (x right, y down)", 6, 14);
  if (vm.track.length === 0) {
    return;
  }
  let xLo = Infinity, xHi = -Infinity, yLo = Infinity, yHi = -Infinity;
  for (const p of vm.track) {
    xLo = Math.min(xLo, p.x); xHi = Math.max(xHi, p.x);
    yLo = Math.min(yLo, p.y); yHi = Math.max(yHi, p.y);
  }
  const span = Math.max(xHi - xLo, yHi - yLo, 0.5);
  const cx = (xLo + xHi) / 2;
  const cy = (yLo + yHi) / 2;
  const scale = (Math.min(w, h) - 30) / span;
  const px = (p: { x: number; y: number }) => ({
    x: w / 2 + (p.x - cx) * scale,
    y: h / 2 + (p.y - cy) * scale,
  });
  ctx.strokeStyle = "#4c8";
  ctx.beginPath();
  vm.track.forEach((p, i) => {
    const q = px(p);
    if (i === 0) {
      ctx.moveTo(q.x, q.y);
    } else {
      ctx.lineTo(q.x, q.y);
    }
  });
  ctx.stroke();
  const last = px(vm.track[vm.track.length - 1]!);
  const psi = vm.latest?.psiRad ?? 0;
  ctx.fillStyle = "#fc3";
  ctx.beginPath();
  ctx.arc(last.x, last.y, 4, 0, 2 * Math.PI);
  ctx.fill();
  ctx.strokeStyle = "#fc3";
  ctx.beginPath();
  ctx.moveTo(last.x, last.y);
  ctx.lineTo(last.x + 12 * Math.cos(psi), last.y + 12 * Math.sin(psi));
  ctx.stroke();
}

function render(): void {
  drawSeries($("chart-v") as HTMLCanvasElement, vm.velocity, "#6cf", "surge velocity (m/s)");
  drawSeries($("chart-x") as HTMLCanvasElement, vm.displacement, "#8d6", "displacement (m)");
  drawTrack($("track") as HTMLCanvasElement);
  requestAnimationFrame(render);
}

// --- teleop inputs ------------------------------------------------------------

function refreshButtonStyles(): void {
  const mask = session?.keyboard.mask() ?? 0;
  for (const el of Array.from(buttonsRow.querySelectorAll("button[data-btn]"))) {
    const bit = Number((el as HTMLElement).dataset.btn);
    el.classList.toggle("held", (mask & bit) !== 0);
  }
}

window.addEventListener("keydown", (ev) => {
  if (ev.repeat || session === null) {
    return; // repeats do not matter: the mask is level-based, 10 Hz loop sends
  }
  if (KEY_BINDINGS[ev.key.toLowerCase()] !== undefined) {
    session.keyboard.keyDown(ev.key);
    refreshButtonStyles();
    ev.preventDefault();
  }
});
window.addEventListener("keyup", (ev) => {
  if (session !== null && KEY_BINDINGS[ev.key.toLowerCase()] !== undefined) {
    session.keyboard.keyUp(ev.key);
    refreshButtonStyles();
  }
});
window.addEventListener("blur", () => {
  session?.keyboard.releaseAll();
  refreshButtonStyles();
});

const BUTTON_KEYS: Array<[string, string, number]> = [
  ["FWD (W)", "w", Buttons.FWD],
  ["BACK (S)", "s", Buttons.BACK],
  ["LEFT (A)", "a", Buttons.LEFT],
  ["RIGHT (D)", "d", Buttons.RIGHT],
  ["UP (Q)", "q", Buttons.UP],
  ["DOWN (E)", "e", Buttons.DOWN],
  ["OPEN (O)", "o", Buttons.GRIP_OPEN],
  ["CLOSE (C)", "c", Buttons.GRIP_CLOSE],
];
for (const [label, key, bit] of BUTTON_KEYS) {
  const btn = document.createElement("button");
  btn.textContent = label;
  btn.dataset.btn = String(bit);
  btn.addEventListener("pointerdown", () => {
    session?.keyboard.keyDown(key);
    refreshButtonStyles();
  });
  const release = () => {
    session?.keyboard.keyUp(key);
    refreshButtonStyles();
  };
  btn.addEventListener("pointerup", release);
  btn.addEventListener("pointerleave", release);
  buttonsRow.appendChild(btn);
}

$("connect").addEventListener("click", connect);
$("inject").addEventListener("click", () => {
  const amplitude = Number(($("wave-amp") as HTMLInputElement).value || 3);
  const duration = Number(($("wave-dur") as HTMLInputElement).value || 4);
  const profile = ($("wave-profile") as HTMLSelectElement).value === "sinusoid" ? "sinusoid" : "pulse";
  session?.injectWave(amplitude, duration, profile);
});

setBanner("IDLE", "not connected");
requestAnimationFrame(render);
