/**
 * Console view-model: everything the operator sees, derived from telemetry.
 *
 * Holds the latest readings (depth, temperature, humidity, battery,
 * gripper), a bounded top-down XY track, and bounded strip-chart series of
 * surge velocity and displacement against time.  Per-frame render latency
 * (arrival to view application) is tracked so an automated session can
 * assert the 200 ms budget.
 */

import { TelemetryFrame } from "./protocol.js";

export interface Readings {
  tS: number;
  xM: number;
  yM: number;
  depthM: number;
  psiRad: number;
  v1Ms: number;
  v2Ms: number;
  wMs: number;
  v6Rads: number;
  tempC: number;
  humidity: number;
  batteryV: number;
  gripperPct: number;
}

export function toReadings(frame: TelemetryFrame): Readings {
  return {
    tS: frame.tMs / 1000,
    xM: frame.xMm / 1000,
    yM: frame.yMm / 1000,
    depthM: Math.max(frame.zMm / 1000, 0),
    psiRad: frame.psiMrad / 1000,
    v1Ms: frame.v1Mms / 1000,
    v2Ms: frame.v2Mms / 1000,
    wMs: frame.wMms / 1000,
    v6Rads: frame.v6Mrads / 1000,
    tempC: frame.tempC,
    humidity: frame.humidity,
    batteryV: frame.batteryMv / 1000,
    gripperPct: Math.round((frame.gripper / 255) * 100),
  };
}

export interface SeriesPoint {
  t: number;
  value: number;
}

export class ConsoleViewModel {
  latest: Readings | null = null;
  readonly track: Array<{ x: number; y: number }> = [];
  readonly velocity: SeriesPoint[] = [];
  readonly displacement: SeriesPoint[] = [];
  readonly renderLatenciesMs: number[] = [];
  framesApplied = 0;

  constructor(
    private readonly maxPoints = 4000,
    private readonly now: () => number = () => Date.now(),
  ) {}

  /** Apply one telemetry frame; arrivalMs is the transport receive time. */
  apply(frame: TelemetryFrame, arrivalMs: number): Readings {
    const readings = toReadings(frame);
    this.latest = readings;
    this.push(this.track, { x: readings.xM, y: readings.yM });
    this.push(this.velocity, { t: readings.tS, value: readings.v1Ms });
    this.push(this.displacement, { t: readings.tS, value: readings.xM });
    this.framesApplied += 1;
    this.renderLatenciesMs.push(this.now() - arrivalMs);
    if (this.renderLatenciesMs.length > this.maxPoints) {
      this.renderLatenciesMs.shift();
    }
    return readings;
  }

  maxRenderLatencyMs(): number {
    return this.renderLatenciesMs.length === 0 ? 0 : Math.max(...this.renderLatenciesMs);
  }

  private push<T>(series: T[], point: T): void {
    series.push(point);
    if (series.length > this.maxPoints) {
      series.shift();
    }
  }
}
