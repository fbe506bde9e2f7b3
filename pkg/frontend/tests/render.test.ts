import { describe, expect, it } from "vitest";

import { SceneRenderer, WARN_MARGIN } from "../src/render.js";
import { FakeCtx, makeFrame, makeHello } from "./helpers.js";

describe("scene renderer", () => {
  it("renders a symmetric hover frame and reports the frame's min distance", () => {
    const ctx = new FakeCtx();
    const r = new SceneRenderer(ctx as never, 800, 600, 150);
    const frame = makeFrame({ min_dist: 0.451 });
    const info = r.render(frame, makeHello());
    expect(info.robotPx).toHaveLength(3);
    const readout = ctx.texts.find((t) => t.text.startsWith("min dist"));
    expect(readout?.text).toBe("min dist 0.451 m");
    expect(info.minDistColor).not.toBe("#ff3b30");
  });

  it("colors the min-distance readout red inside the warning band", () => {
    const ctx = new FakeCtx();
    const r = new SceneRenderer(ctx as never, 800, 600, 150);
    const hello = makeHello({ safety_radius: [0.1, 0.1, 0.1] });
    const rr = 0.2;
    const near = r.render(makeFrame({ min_dist: rr + WARN_MARGIN - 0.01 }), hello);
    expect(near.minDistColor).toBe("#ff3b30");
    const clear = r.render(makeFrame({ min_dist: rr + WARN_MARGIN + 0.05 }), hello);
    expect(clear.minDistColor).toBe("#9acd32");
    const readout = ctx.texts.filter((t) => t.text.startsWith("min dist"));
    expect(readout[0].fill).toBe("#ff3b30");
    expect(readout[1].fill).toBe("#9acd32");
  });

  it("draws collinear markers for a line-formation frame", () => {
    const ctx = new FakeCtx();
    const r = new SceneRenderer(ctx as never, 800, 600, 150);
    const frame = makeFrame({
      robots: [
        [-0.4, 0, 1.35],
        [0, 0, 1.45],
        [0.4, 0, 1.35],
      ],
    });
    const info = r.render(frame, makeHello());
    const ys = info.robotPx.map(([, y]) => y);
    expect(Math.max(...ys) - Math.min(...ys)).toBeLessThan(1e-9);
    const xs = info.robotPx.map(([x]) => x).sort((a, b) => a - b);
    expect(xs[0]).toBeLessThan(xs[1]);
    expect(xs[1]).toBeLessThan(xs[2]);
  });

  it("renders 1800 frames without state carryover (soak)", () => {
    const ctx = new FakeCtx();
    const r = new SceneRenderer(ctx as never, 800, 600, 150);
    for (let k = 0; k < 1800; k++) {
      const info = r.render(makeFrame({ tick: k, min_dist: 0.3 + (k % 7) * 0.01 }), makeHello());
      expect(info.robotPx).toHaveLength(3);
    }
    // every render starts from a clean canvas
    const clears = ctx.calls.filter((c) => c === "clearRect");
    expect(clears).toHaveLength(1800 + 0);
  });
});
