/** Top-down scene renderer with an altitude side gauge.
 *
 * Everything drawn comes from the latest state frame: payload, robots with
 * safety-radius circles, cables, half-space footprints, obstacles, and the
 * min-distance readout (red when inside the warning band). The context is
 * injected so tests can drive the renderer headless.
 */

import type { Hello, StateFrame } from "./protocol.js";

export interface Ctx2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  rect(x: number, y: number, w: number, h: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  set strokeStyle(v: string);
  set fillStyle(v: string);
  set lineWidth(v: number);
  set font(v: string);
}

export const WARN_MARGIN = 0.05; // m added to r_i + r_j for the readout color

export interface RenderInfo {
  minDistColor: string;
  robotPx: Array<[number, number]>;
}

export class SceneRenderer {
  width: number;
  height: number;
  scale: number; // px per metre
  private cx: number;
  private cy: number;

  constructor(private ctx: Ctx2D, width = 800, height = 600, scale = 150) {
    this.width = width;
    this.height = height;
    this.scale = scale;
    this.cx = width / 2;
    this.cy = height / 2;
  }

  toPx(x: number, y: number): [number, number] {
    return [this.cx + x * this.scale, this.cy - y * this.scale];
  }

  minDistanceColor(frame: StateFrame, hello: Hello | null): string {
    if (hello === null || hello.safety_radius.length < 2) {
      return "#9acd32";
    }
    const rr = hello.safety_radius[0] + hello.safety_radius[1];
    return frame.min_dist < rr + WARN_MARGIN ? "#ff3b30" : "#9acd32";
  }

  render(frame: StateFrame, hello: Hello | null): RenderInfo {
    const ctx = this.ctx;
    ctx.clearRect(0, 0, this.width, this.height);

    // obstacles (display-only geometry)
    ctx.fillStyle = "#444a55";
    for (const ob of frame.obstacles) {
      const center = (ob as { center?: number[] }).center;
      const size = (ob as { size?: number[] }).size;
      if (!center || !size) continue;
      const [px, py] = this.toPx(center[0] - size[0] / 2, center[1] + size[1] / 2);
      ctx.beginPath();
      ctx.rect(px, py, size[0] * this.scale, size[1] * this.scale);
      ctx.fill();
    }

    // reference marker
    ctx.strokeStyle = "#7f8c8d";
    ctx.lineWidth = 1;
    const [rx, ry] = this.toPx(frame.ref[0], frame.ref[1]);
    ctx.beginPath();
    ctx.arc(rx, ry, 4, 0, 2 * Math.PI);
    ctx.stroke();

    // cables then robots
    const [p0x, p0y] = this.toPx(frame.p0[0], frame.p0[1]);
    const robotPx: Array<[number, number]> = [];
    ctx.strokeStyle = "#b0b8c4";
    for (const robot of frame.robots) {
      const [qx, qy] = this.toPx(robot[0], robot[1]);
      ctx.beginPath();
      ctx.moveTo(p0x, p0y);
      ctx.lineTo(qx, qy);
      ctx.stroke();
      robotPx.push([qx, qy]);
    }
    frame.robots.forEach((robot, i) => {
      const [qx, qy] = robotPx[i];
      const r = hello ? hello.safety_radius[i] : 0.1;
      ctx.strokeStyle = "#4aa3ff";
      ctx.beginPath();
      ctx.arc(qx, qy, r * this.scale, 0, 2 * Math.PI);
      ctx.stroke();
      ctx.fillStyle = "#4aa3ff";
      ctx.beginPath();
      ctx.arc(qx, qy, 5, 0, 2 * Math.PI);
      ctx.fill();
    });

    // payload
    ctx.fillStyle = "#ffd166";
    ctx.beginPath();
    ctx.arc(p0x, p0y, 7, 0, 2 * Math.PI);
    ctx.fill();

    // half-space footprints: separating line segments through the payload
    ctx.strokeStyle = "#6c5ce7";
    for (const hs of frame.halfspaces) {
      const n = hs.n;
      const norm = Math.hypot(n[0], n[1]);
      if (norm < 1e-9) continue;
      const tx = -n[1] / norm;
      const ty = n[0] / norm;
      const len = 0.6;
      const [ax, ay] = this.toPx(frame.p0[0] - tx * len, frame.p0[1] - ty * len);
      const [bx, by] = this.toPx(frame.p0[0] + tx * len, frame.p0[1] + ty * len);
      ctx.beginPath();
      ctx.moveTo(ax, ay);
      ctx.lineTo(bx, by);
      ctx.stroke();
    }

    // altitude gauge on the right edge
    ctx.strokeStyle = "#b0b8c4";
    ctx.beginPath();
    ctx.moveTo(this.width - 30, 40);
    ctx.lineTo(this.width - 30, this.height - 40);
    ctx.stroke();
    const zFrac = Math.min(Math.max(frame.p0[2] / 2.0, 0), 1);
    const zy = this.height - 40 - zFrac * (this.height - 80);
    ctx.fillStyle = "#ffd166";
    ctx.beginPath();
    ctx.arc(this.width - 30, zy, 5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#b0b8c4";
    ctx.font = "12px sans-serif";
    ctx.fillText(`z ${frame.p0[2].toFixed(2)} m`, this.width - 90, 24);

    // min-distance readout
    const color = this.minDistanceColor(frame, hello);
    ctx.fillStyle = color;
    ctx.font = "14px sans-serif";
    ctx.fillText(`min dist ${frame.min_dist.toFixed(3)} m`, 12, 20);
    ctx.fillText(frame.preset ? `preset: ${frame.preset}` : "preset: off", 12, 40);

    return { minDistColor: color, robotPx };
  }
}
