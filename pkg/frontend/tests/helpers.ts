import type { Hello, StateFrame } from "../src/protocol.js";

export function makeHello(overrides: Partial<Hello> = {}): Hello {
  return {
    v: 1,
    type: "hello",
    presets: ["line", "triangle"],
    n_robots: 3,
    safety_radius: [0.1, 0.1, 0.1],
    cable_length: [0.5, 0.5, 0.5],
    vel_max: 0.5,
    obstacles: [],
    ...overrides,
  };
}

export function makeFrame(overrides: Partial<StateFrame> = {}): StateFrame {
  return {
    v: 1,
    type: "state",
    tick: 0,
    t: 0,
    p0: [0, 0, 1],
    v0: [0, 0, 0],
    R0: [1, 0, 0, 0, 1, 0, 0, 0, 1],
    robots: [
      [0, 0.3, 1.4],
      [-0.26, -0.15, 1.4],
      [0.26, -0.15, 1.4],
    ],
    q: [
      [0, -0.6, -0.8],
      [0.52, 0.3, -0.8],
      [-0.52, 0.3, -0.8],
    ],
    mu: [
      [0, 0.02, 0.033],
      [-0.017, -0.01, 0.033],
      [0.017, -0.01, 0.033],
    ],
    halfspaces: [
      { robot: 0, n: [1, 0, 0.2], a: 0 },
      { robot: 1, n: [-1, 0, 0.2], a: 0 },
    ],
    min_dist: 0.45,
    ref: [0, 0, 1],
    preset: "",
    paused: false,
    obstacles: [],
    ...overrides,
  };
}

/** Recording stub standing in for a canvas 2d context. */
export class FakeCtx {
  calls: string[] = [];
  texts: Array<{ text: string; fill: string }> = [];
  private currentFill = "";

  clearRect() { this.calls.push("clearRect"); }
  beginPath() { this.calls.push("beginPath"); }
  moveTo() { this.calls.push("moveTo"); }
  lineTo() { this.calls.push("lineTo"); }
  arc() { this.calls.push("arc"); }
  rect() { this.calls.push("rect"); }
  stroke() { this.calls.push("stroke"); }
  fill() { this.calls.push("fill"); }
  fillText(text: string) {
    this.calls.push("fillText");
    this.texts.push({ text, fill: this.currentFill });
  }
  set strokeStyle(_v: string) {}
  set fillStyle(v: string) { this.currentFill = v; }
  set lineWidth(_v: number) {}
  set font(_v: string) {}
}

export class FakeSocket {
  sent: string[] = [];
  closedByClient = false;
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string) { this.sent.push(data); }
  close() { this.closedByClient = true; this.onclose?.(); }

  serverOpen() { this.onopen?.(); }
  serverSend(data: unknown) {
    this.onmessage?.({ data: typeof data === "string" ? data : JSON.stringify(data) });
  }
  serverDrop() { this.onclose?.(); }
}
